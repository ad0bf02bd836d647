#include "gnar/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace gnar {

namespace {

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i + 1));
    return names;
}

bool is_observed(const ObservedMask& mask, NodeId node) {
    return mask.empty() || mask[node];
}

void check_node(const Network& net, NodeId node) {
    if (node >= net.n_nodes())
        throw std::invalid_argument("node id " + std::to_string(node) + " out of range");
}

}  // namespace

Network::Network(std::vector<std::string> node_names, std::vector<Edge> edges, bool directed,
                 int n_covariates)
    : names_(std::move(node_names)),
      edges_(std::move(edges)),
      directed_(directed),
      n_covariates_(n_covariates) {
    build();
}

Network::Network(std::size_t n_nodes, std::vector<Edge> edges, bool directed, int n_covariates)
    : Network(default_names(n_nodes), std::move(edges), directed, n_covariates) {}

void Network::build() {
    const std::size_t n = names_.size();
    if (n == 0) throw std::invalid_argument("network must have at least one node");
    if (n_covariates_ < 1) throw std::invalid_argument("covariate count must be >= 1");

    for (Edge& e : edges_) {
        if (e.from >= n || e.to >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.from == e.to) throw std::invalid_argument("self-loops are not allowed");
        if (!(e.dist > 0.0) || !std::isfinite(e.dist))
            throw std::invalid_argument("edge distances must be positive and finite");
        if (e.covariate < 1 || e.covariate > n_covariates_)
            throw std::invalid_argument("edge covariate outside 1..C");
        if (!directed_ && e.from > e.to) std::swap(e.from, e.to);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
        if (edges_[k].from == edges_[k - 1].from && edges_[k].to == edges_[k - 1].to)
            throw std::invalid_argument("duplicate edge " + std::to_string(edges_[k].from + 1) +
                                        "-" + std::to_string(edges_[k].to + 1));
    }

    arcs_.assign(n, {});
    for (const Edge& e : edges_) {
        arcs_[e.from].push_back({e.to, e.dist, e.covariate});
        if (!directed_) arcs_[e.to].push_back({e.from, e.dist, e.covariate});
    }
    for (auto& list : arcs_)
        std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
}

std::optional<NodeId> Network::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
}

Network Network::from_adjacency(const Eigen::MatrixXd& adjacency, AdjacencyKind kind,
                                bool symmetrize, std::vector<std::string> node_names) {
    if (adjacency.rows() != adjacency.cols())
        throw std::invalid_argument("adjacency matrix must be square");
    const auto n = static_cast<std::size_t>(adjacency.rows());
    if (n == 0) throw std::invalid_argument("adjacency matrix is empty");
    if (!adjacency.allFinite()) throw std::invalid_argument("adjacency entries must be finite");
    if ((adjacency.array() < 0.0).any())
        throw std::invalid_argument("adjacency entries must be non-negative");
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0)
            throw std::invalid_argument("adjacency diagonal must be zero (no self-loops)");
    }
    if (node_names.empty()) node_names = default_names(n);
    if (node_names.size() != n) throw std::invalid_argument("node name count mismatch");

    Eigen::MatrixXd a = adjacency;
    if (symmetrize) a = a.cwiseMax(a.transpose()).eval();
    const bool directed = a != a.transpose();

    auto length = [kind](double entry) {
        return kind == AdjacencyKind::distances ? entry : 1.0 / entry;
    };

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
            if (a(i, j) > 0.0) edges.push_back({i, j, length(a(i, j)), 1});
        }
    }
    return Network(std::move(node_names), std::move(edges), directed, 1);
}

Eigen::MatrixXd Network::to_adjacency(AdjacencyKind kind) const {
    const auto n = static_cast<Eigen::Index>(n_nodes());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < n_nodes(); ++i) {
        for (const Arc& arc : arcs_[i])
            a(i, arc.to) = kind == AdjacencyKind::distances ? arc.dist : 1.0 / arc.dist;
    }
    return a;
}

std::vector<std::vector<NodeId>> stage_layers(const Network& net, NodeId origin, int max_stage,
                                              const ObservedMask& mask, MaskMode mode) {
    check_node(net, origin);
    if (!mask.empty() && mask.size() != net.n_nodes())
        throw std::invalid_argument("observation mask size does not match network");
    const bool strict = mode == MaskMode::strict && !mask.empty();

    std::vector<std::vector<NodeId>> layers{{origin}};
    if (strict && !mask[origin]) return layers;

    std::vector<bool> seen(net.n_nodes(), false);
    seen[origin] = true;
    for (int stage = 1; stage <= max_stage; ++stage) {
        std::vector<NodeId> next;
        for (NodeId u : layers.back()) {
            for (const auto& arc : net.out_arcs(u)) {
                if (seen[arc.to]) continue;
                if (strict && !mask[arc.to]) continue;
                seen[arc.to] = true;
                next.push_back(arc.to);
            }
        }
        std::sort(next.begin(), next.end());
        if (next.empty()) break;
        layers.push_back(std::move(next));
    }
    return layers;
}

NeighbourSet neighbour_set(const Network& net, NodeId origin, int stage, const ObservedMask& mask,
                           MaskMode mode) {
    if (stage < 1) throw std::invalid_argument("neighbour stage must be >= 1");
    auto layers = stage_layers(net, origin, stage, mask, mode);
    NeighbourSet set{origin, stage, {}};
    if (static_cast<int>(layers.size()) > stage)
        set.members = std::move(layers[static_cast<std::size_t>(stage)]);
    return set;
}

std::vector<StageMember> stage_members(const Network& net, NodeId origin, int stage,
                                       const ObservedMask& mask, MaskMode mode) {
    if (stage < 1) throw std::invalid_argument("neighbour stage must be >= 1");
    const auto layers = stage_layers(net, origin, stage, mask, mode);
    if (static_cast<int>(layers.size()) <= stage) return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = net.n_nodes();
    std::vector<int> depth(n, -1);
    for (std::size_t m = 0; m < layers.size(); ++m)
        for (NodeId k : layers[m]) depth[k] = static_cast<int>(m);

    struct Best {
        double length = inf;
        int covariate = 0;
        std::vector<NodeId> path;
    };
    std::vector<Best> best(n);
    best[origin] = {0.0, 0, {origin}};

    for (int m = 1; m <= stage; ++m) {
        for (NodeId u : layers[static_cast<std::size_t>(m - 1)]) {
            for (const auto& arc : net.out_arcs(u)) {
                if (depth[arc.to] != m) continue;
                Best& target = best[arc.to];
                const double candidate = best[u].length + arc.dist;
                bool better = candidate < target.length;
                if (!better && candidate == target.length) {
                    // equal length: keep the lexicographically smaller node sequence
                    better = std::lexicographical_compare(best[u].path.begin(), best[u].path.end(),
                                                          target.path.begin(),
                                                          target.path.end() - 1);
                }
                if (better) {
                    target.length = candidate;
                    target.covariate = arc.covariate;
                    target.path = best[u].path;
                    target.path.push_back(arc.to);
                }
            }
        }
    }

    std::vector<StageMember> out;
    for (NodeId k : layers[static_cast<std::size_t>(stage)])
        out.push_back({k, best[k].length, best[k].covariate});
    return out;
}

double WeightMap::total() const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.weight;
    return sum;
}

double WeightMap::weight_of(NodeId node) const {
    double w = 0.0;
    for (const auto& e : entries)
        if (e.node == node) w += e.weight;
    return w;
}

WeightMap connection_weights(const Network& net, NodeId origin, int stage, const ObservedMask& mask,
                             MaskMode mode) {
    WeightMap map{origin, stage, {}};
    const auto members = stage_members(net, origin, stage, mask, mode);
    double norm = 0.0;
    for (const auto& m : members)
        if (is_observed(mask, m.node)) norm += 1.0 / m.length;
    for (const auto& m : members) {
        const double w = (is_observed(mask, m.node) && norm > 0.0) ? (1.0 / m.length) / norm : 0.0;
        map.entries.push_back({m.node, m.covariate, w});
    }
    return map;
}

Eigen::MatrixXd weight_matrix(const Network& net, int stage, int covariate,
                              const ObservedMask& mask, MaskMode mode) {
    if (covariate < 1 || covariate > net.n_covariates())
        throw std::invalid_argument("covariate outside 1..C");
    const auto n = static_cast<Eigen::Index>(net.n_nodes());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (NodeId row = 0; row < net.n_nodes(); ++row) {
        for (const auto& e : connection_weights(net, row, stage, mask, mode).entries)
            if (e.covariate == covariate) w(row, e.node) = e.weight;
    }
    return w;
}

StageTable::StageTable(const Network& net, int max_stage) : max_stage_(max_stage) {
    members_.resize(net.n_nodes());
    for (NodeId i = 0; i < net.n_nodes(); ++i) {
        for (int r = 1; r <= max_stage; ++r) members_[i].push_back(stage_members(net, i, r));
    }
}

}  // namespace gnar
