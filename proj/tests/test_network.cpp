#include "gnar/network.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <set>

using namespace gnar;
using namespace gnar::testing;

namespace {

std::vector<NodeId> members(const Network& net, NodeId i, int r, const ObservedMask& mask = {},
                            MaskMode mode = MaskMode::reweight) {
    return neighbour_set(net, i, r, mask, mode).members;
}

ObservedMask all_but(NodeId missing, std::size_t n = 5) {
    ObservedMask mask(n, true);
    mask[missing] = false;
    return mask;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("stage neighbour sets of the five-node graph") {
    const Network net = five_net();
    CHECK(members(net, D, 1) == std::vector<NodeId>{A, B, C});
    CHECK(members(net, E, 1) == std::vector<NodeId>{A});
    CHECK(members(net, E, 2) == std::vector<NodeId>{D});
    CHECK(members(net, E, 3) == std::vector<NodeId>{B, C});
    CHECK(members(net, E, 5).empty());
    CHECK(members(net, A, 2) == std::vector<NodeId>{B, C});
    CHECK_THROWS_AS(neighbour_set(net, 7, 1), std::invalid_argument);
    CHECK_THROWS_AS(neighbour_set(net, A, 0), std::invalid_argument);
}

TEST_CASE("unweighted connection weights") {
    const Network net = five_net();
    const auto e1 = connection_weights(net, E, 1);
    REQUIRE(e1.entries.size() == 1);
    CHECK(e1.weight_of(A) == 1.0);

    const auto a1 = connection_weights(net, A, 1);
    CHECK(a1.weight_of(D) == 0.5);
    CHECK(a1.weight_of(E) == 0.5);

    // not symmetric even though the graph is undirected
    CHECK(connection_weights(net, E, 1).weight_of(A) == 1.0);
    CHECK(connection_weights(net, A, 1).weight_of(E) == 0.5);

    const auto d1 = connection_weights(net, D, 1);
    CHECK(d1.weight_of(A) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("missing node reweighting follows the reweight-not-redraw rule") {
    const Network net = five_net();
    SUBCASE("A unobserved") {
        const auto mask = all_but(A);
        const auto d1 = connection_weights(net, D, 1, mask);
        CHECK(d1.weight_of(A) == 0.0);
        CHECK(d1.weight_of(B) == 0.5);
        CHECK(d1.weight_of(C) == 0.5);
        CHECK(connection_weights(net, E, 1, mask).total() == 0.0);
        // deeper stages of E are kept and unchanged
        CHECK(connection_weights(net, E, 2, mask).weight_of(D) == 1.0);
        CHECK(connection_weights(net, E, 3, mask).weight_of(B) == 0.5);
        CHECK(connection_weights(net, E, 3, mask).weight_of(C) == 0.5);
    }
    SUBCASE("C unobserved") {
        const auto d1 = connection_weights(net, D, 1, all_but(C));
        CHECK(d1.weight_of(A) == 0.5);
        CHECK(d1.weight_of(B) == 0.5);
        CHECK(d1.weight_of(C) == 0.0);
    }
    SUBCASE("strict mode removes the node before layering") {
        const auto mask = all_but(A);
        CHECK(members(net, E, 2, mask, MaskMode::strict).empty());
        CHECK(members(net, D, 1, mask, MaskMode::strict) == std::vector<NodeId>{B, C});
        CHECK(members(net, B, 2, mask, MaskMode::strict).empty());
        CHECK(members(net, B, 2, mask, MaskMode::reweight) == std::vector<NodeId>{A});
    }
}

TEST_CASE("distance-weighted connection weights") {
    // 0 -1.0- 1, 0 -3.0- 2: inverse distances 1 and 1/3
    const Network net(3, {{0, 1, 1.0, 1}, {0, 2, 3.0, 1}}, false);
    const auto w = connection_weights(net, 0, 1);
    CHECK(w.weight_of(1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w.weight_of(2) == doctest::Approx(0.25).epsilon(1e-15));

    // stage-2 length is the sum along the two-edge path
    const Network chain(4, {{0, 1, 2.0, 1}, {1, 2, 0.5, 1}, {0, 3, 1.0, 1}}, false);
    const auto members2 = stage_members(chain, 0, 2);
    REQUIRE(members2.size() == 1);
    CHECK(members2[0].node == 2);
    CHECK(members2[0].length == 2.5);
}

TEST_CASE("adjacency conversion") {
    SUBCASE("printed five-node matrix") {
        const Network net = Network::from_adjacency(five_net_adjacency(), AdjacencyKind::weights);
        CHECK_FALSE(net.directed());
        CHECK(net.edges().size() == 5);
        CHECK(net.edges() == five_net().edges());
        CHECK(net.to_adjacency() == five_net_adjacency());
        CHECK(five_net().to_adjacency() == five_net_adjacency());
    }
    SUBCASE("symmetrize flag") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
        a(0, 1) = 2.0;
        const Network directed = Network::from_adjacency(a, AdjacencyKind::distances);
        CHECK(directed.directed());
        const Network sym = Network::from_adjacency(a, AdjacencyKind::distances, true);
        CHECK_FALSE(sym.directed());
        CHECK(sym.to_adjacency()(1, 0) == 2.0);
    }
    SUBCASE("zero matrix gives no edges") {
        const Network net = Network::from_adjacency(Eigen::MatrixXd::Zero(4, 4), AdjacencyKind::weights);
        CHECK(net.edges().empty());
        CHECK(net.to_adjacency().isZero());
    }
    SUBCASE("single directed distance edge") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
        a(0, 2) = 2.0;
        const Network net = Network::from_adjacency(a, AdjacencyKind::distances);
        REQUIRE(net.edges().size() == 1);
        CHECK(net.directed());
        CHECK(net.edges()[0] == Edge{0, 2, 2.0, 1});
        CHECK(Network::from_adjacency(a, AdjacencyKind::weights).edges()[0].dist == 0.5);
    }
    SUBCASE("invalid matrices") {
        CHECK_THROWS_AS(Network::from_adjacency(Eigen::MatrixXd::Zero(2, 3), AdjacencyKind::weights),
                        std::invalid_argument);
        Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
        neg(0, 1) = -1.0;
        CHECK_THROWS_AS(Network::from_adjacency(neg, AdjacencyKind::weights), std::invalid_argument);
        Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
        diag(1, 1) = 1.0;
        CHECK_THROWS_AS(Network::from_adjacency(diag, AdjacencyKind::weights), std::invalid_argument);
    }
    SUBCASE("round trip on random networks") {
        RngStream rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            RandomNetOptions o;
            o.directed = trial % 2 == 0;
            const Network net = random_network(rng, 10, o);
            for (auto kind : {AdjacencyKind::distances, AdjacencyKind::weights}) {
                const Network back = Network::from_adjacency(net.to_adjacency(kind), kind);
                REQUIRE(back.edges().size() == net.edges().size());
                for (std::size_t k = 0; k < net.edges().size(); ++k) {
                    CHECK(back.edges()[k].from == net.edges()[k].from);
                    CHECK(back.edges()[k].to == net.edges()[k].to);
                    CHECK(back.edges()[k].dist == doctest::Approx(net.edges()[k].dist).epsilon(1e-15));
                }
            }
        }
    }
}

TEST_CASE("network validation") {
    CHECK_THROWS_AS(Network(3, {{0, 0, 1.0, 1}}, false), std::invalid_argument);
    CHECK_THROWS_AS(Network(3, {{0, 1, 0.0, 1}}, false), std::invalid_argument);
    CHECK_THROWS_AS(Network(3, {{0, 1, 1.0, 2}}, false, 1), std::invalid_argument);
    CHECK_THROWS_AS(Network(3, {{0, 5, 1.0, 1}}, false), std::invalid_argument);
    CHECK_THROWS_AS(Network(3, {{0, 1, 1.0, 1}, {1, 0, 1.0, 1}}, false), std::invalid_argument);
    CHECK_NOTHROW(Network(3, {{0, 1, 1.0, 1}, {1, 0, 1.0, 1}}, true));
    // undirected edges are stored canonically
    const Network net(3, {{2, 0, 1.0, 1}}, false);
    CHECK(net.edges()[0].from == 0);
    CHECK(net.edges()[0].to == 2);
}

TEST_CASE("weight matrices") {
    const Network net = five_net();
    const Eigen::MatrixXd w = weight_matrix(net, 1, 1);
    Eigen::RowVectorXd row_e(5);
    row_e << 1, 0, 0, 0, 0;
    CHECK(w.row(E) == row_e);
    CHECK(weight_matrix(Network(4, {}, false), 1, 1).isZero());

    RngStream rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        RandomNetOptions o;
        o.n_covariates = 2;
        o.directed = trial % 3 == 0;
        o.prob = 0.3;
        const Network g = random_network(rng, 7, o);
        for (int r = 1; r <= 4; ++r) {
            const Eigen::VectorXd sums = (weight_matrix(g, r, 1) + weight_matrix(g, r, 2)).rowwise().sum();
            for (Eigen::Index i = 0; i < sums.size(); ++i) {
                const bool empty = neighbour_set(g, static_cast<NodeId>(i), r).members.empty();
                CHECK(std::abs(sums(i) - (empty ? 0.0 : 1.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("layer and weight properties on random graphs") {
    RngStream rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        RandomNetOptions o;
        o.directed = trial % 2 == 1;
        o.prob = 0.25 + 0.05 * (trial % 5);
        o.n_covariates = 1 + trial % 3;
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 5);
        const Network net = random_network(rng, n, o);
        for (NodeId i = 0; i < n; ++i) {
            const auto hops = hop_distances(net, i);
            std::set<NodeId> seen;
            for (int r = 1; r <= 6; ++r) {
                const auto set = members(net, i, r);
                std::vector<NodeId> expected;
                for (NodeId k = 0; k < n; ++k)
                    if (hops[k] == r) expected.push_back(k);
                CHECK(set == expected);
                for (NodeId k : set) CHECK(seen.insert(k).second);  // layers are disjoint
                CHECK(std::find(set.begin(), set.end(), i) == set.end());
                const auto w = connection_weights(net, i, r);
                if (!set.empty()) CHECK(std::abs(w.total() - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("layered distance DP agrees with brute-force path enumeration") {
    RngStream rng(2024);
    for (int trial = 0; trial < 80; ++trial) {
        RandomNetOptions o;
        o.directed = trial % 2 == 0;
        o.unit_lengths = trial % 4 == 1;  // many ties: exercises the tie-break
        o.n_covariates = 3;
        o.prob = 0.35;
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 6);  // <= 8 nodes
        const Network net = random_network(rng, n, o);
        for (NodeId i = 0; i < n; ++i) {
            for (int r = 1; r <= 5; ++r) {
                for (const auto& m : stage_members(net, i, r)) {
                    const BrutePath brute = brute_force_stage_path(net, i, m.node, r);
                    CHECK(m.length == brute.length);
                    CHECK(m.covariate == brute.covariate);
                }
            }
        }
    }
}

TEST_CASE("masking a node leaves other nodes' same-stage weights unchanged") {
    RngStream rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 6;
        const Network net = random_network(rng, n, {0.4, trial % 2 == 0, false, 1});
        const auto masked = static_cast<NodeId>(uniform_int(rng, 0, static_cast<int>(n) - 1));
        const ObservedMask mask = all_but(masked, n);
        for (NodeId i = 0; i < n; ++i) {
            for (int r = 1; r <= 3; ++r) {
                const auto set = members(net, i, r);
                if (std::find(set.begin(), set.end(), masked) != set.end()) continue;
                const auto before = connection_weights(net, i, r);
                const auto after = connection_weights(net, i, r, mask);
                REQUIRE(before.entries.size() == after.entries.size());
                for (std::size_t k = 0; k < before.entries.size(); ++k)
                    CHECK(before.entries[k].weight == after.entries[k].weight);
            }
        }
    }
}

TEST_CASE("covariate attribution and the covariate normalisation property") {
    // 0 -> 1 (cov 1), 0 -> 2 (cov 2), 1 -> 3 (cov 2), 2 -> 3 (cov 1), all unit:
    // two tied paths to 3; 0-1-3 is lexicographically smaller so cov 2 wins.
    const Network net(4, {{0, 1, 1.0, 1}, {0, 2, 1.0, 2}, {1, 3, 1.0, 2}, {2, 3, 1.0, 1}}, true, 2);
    const auto m = stage_members(net, 0, 2);
    REQUIRE(m.size() == 1);
    CHECK(m[0].covariate == 2);

    const auto w1 = connection_weights(net, 0, 1);
    double by_cov[2] = {0, 0};
    for (const auto& e : w1.entries) by_cov[e.covariate - 1] += e.weight;
    CHECK(by_cov[0] == 0.5);
    CHECK(by_cov[1] == 0.5);
}

}  // TEST_SUITE
