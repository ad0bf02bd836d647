#include "gnar/estimate.hpp"
#include "gnar/sim.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace gnar;
using namespace gnar::testing;

namespace {

ModelSpec global_spec(int p, std::vector<int> s) {
    ModelSpec spec;
    spec.p = p;
    spec.s = std::move(s);
    return spec;
}

CoefficientSet coefs(std::initializer_list<double> gamma, double sigma = 1.0) {
    CoefficientSet c;
    c.gamma = Eigen::VectorXd(static_cast<Eigen::Index>(gamma.size()));
    Eigen::Index k = 0;
    for (double g : gamma) c.gamma(k++) = g;
    c.sigma = Eigen::VectorXd::Constant(1, sigma);
    return c;
}

double lag1_autocorrelation(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    double num = 0.0, den = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        den += (x(t) - mean) * (x(t) - mean);
        if (t > 0) num += (x(t) - mean) * (x(t - 1) - mean);
    }
    return num / den;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("splitmix64 reference stream") {
    RngStream rng(0);
    CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next_u64() == 0x06C45D188009454FULL);

    RngStream u(0);
    CHECK(u.uniform() == static_cast<double>(0xE220A8397B1DCDAFULL >> 11) / 9007199254740992.0);

    // child seeds are consecutive outputs of the master stream
    RngStream master(17);
    for (std::uint64_t k = 0; k < 5; ++k) CHECK(RngStream::child_seed(17, k) == master.next_u64());
}

TEST_CASE("normals follow the documented Box-Muller pairing") {
    RngStream words(8);
    const double u1 = words.uniform();
    const double u2 = words.uniform();
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    RngStream rng(8);
    CHECK(rng.normal() == radius * std::cos(2.0 * std::numbers::pi * u2));
    CHECK(rng.normal() == radius * std::sin(2.0 * std::numbers::pi * u2));

    RngStream many(1);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = many.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("simulation is deterministic per seed") {
    const Network net = five_net();
    SimulationOptions o;
    o.n = 100;
    RngStream a(5), b(5), c(6);
    const auto x = gnar_simulate(net, global_spec(1, {1}), coefs({0.2, 0.3}), o, a);
    const auto y = gnar_simulate(net, global_spec(1, {1}), coefs({0.2, 0.3}), o, b);
    const auto z = gnar_simulate(net, global_spec(1, {1}), coefs({0.2, 0.3}), o, c);
    CHECK(x.values == y.values);
    CHECK(x.values != z.values);
    CHECK(x.length() == 100);
    CHECK(x.node_names == net.node_names());
    CHECK_FALSE(x.has_missing());
}

TEST_CASE("zero noise from a zero state stays at zero") {
    RngStream rng(1);
    SimulationOptions o;
    o.n = 30;
    const auto x = gnar_simulate(five_net(), global_spec(2, {1, 1}), coefs({0.2, 0.3, 0.1, 0.1}, 0.0), o, rng);
    CHECK(x.values.isZero());
}

TEST_CASE("node recursion matches the VAR recursion") {
    RngStream gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = static_cast<std::size_t>(uniform_int(gen, 1, 6));
        const int n_cov = uniform_int(gen, 1, 2);
        const Network net = random_network(gen, n, {0.5, trial % 2 == 0, false, n_cov});
        const ModelSpec spec = random_spec(gen, n, 3, 3, n_cov);
        CoefficientSet coef;
        coef.gamma = random_gamma(gen, ParameterLayout(spec, n), 0.95);
        coef.sigma = Eigen::VectorXd(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < coef.sigma.size(); ++i) coef.sigma(i) = 0.5 + gen.uniform();
        SimulationOptions o;
        o.n = 60;
        o.burn_in = trial % 3 == 0 ? 0 : 10;
        o.initial = Eigen::MatrixXd::Random(spec.p, static_cast<Eigen::Index>(n));
        const std::uint64_t seed = gen.next_u64();
        RngStream a(seed), b(seed);
        const auto x = gnar_simulate(net, spec, coef, o, a);
        const auto y = var_simulate(to_var_matrices(net, spec, coef.gamma), coef.sigma, o, b);
        CHECK((x.values - y.values).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("VAR simulation sanity") {
    SimulationOptions o;
    o.n = 5000;
    RngStream rng(2);
    const auto ar = var_simulate({Eigen::MatrixXd::Constant(1, 1, 0.5)}, Eigen::VectorXd::Ones(1), o, rng);
    CHECK(std::abs(lag1_autocorrelation(ar.values.col(0)) - 0.5) <= 0.1);

    RngStream rng2(3);
    o.n = 20000;
    const auto noise = var_simulate({Eigen::MatrixXd::Zero(2, 2)}, Eigen::VectorXd::Ones(2), o, rng2);
    CHECK(std::abs(noise.values.col(0).mean()) < 0.05);
    CHECK(std::abs(noise.values.col(1).mean()) < 0.05);
}

TEST_CASE("stationary simulations stay bounded") {
    const Network net = five_net();
    RngStream gen(4);
    SimulationOptions o;
    o.n = 10000;
    for (int run = 0; run < 100; ++run) {
        const ModelSpec spec = random_spec(gen, 5, 2, 3);
        CoefficientSet coef{random_gamma(gen, ParameterLayout(spec, 5), 0.95), Eigen::VectorXd::Ones(1)};
        RngStream rng(static_cast<std::uint64_t>(run));
        const auto x = gnar_simulate(net, spec, coef, o, rng);
        CHECK(x.values.allFinite());
        CHECK(x.values.cwiseAbs().maxCoeff() < 1e3);
    }
}

TEST_CASE("nonstationary parameters warn but still simulate") {
    RngStream rng(1);
    std::vector<std::string> warnings;
    SimulationOptions o;
    o.n = 200;
    const auto x = gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2, 0.85}), o, rng, &warnings);
    CHECK(warnings.size() == 1);
    CHECK(x.length() == 200);

    warnings.clear();
    RngStream rng2(1);
    gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2, 0.3}), o, rng2, &warnings);
    CHECK(warnings.empty());
}

TEST_CASE("simulation argument errors") {
    RngStream rng(1);
    SimulationOptions o;
    o.n = 0;
    CHECK_THROWS_AS(gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2, 0.3}), o, rng),
                    std::invalid_argument);
    o.n = 10;
    o.burn_in = -1;
    CHECK_THROWS_AS(gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2, 0.3}), o, rng),
                    std::invalid_argument);
    o.burn_in = 0;
    CHECK_THROWS_AS(gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2}), o, rng), std::invalid_argument);
    CoefficientSet two_sigmas = coefs({0.2, 0.3});
    two_sigmas.sigma = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(gnar_simulate(five_net(), global_spec(1, {1}), two_sigmas, o, rng), std::invalid_argument);
    o.initial = Eigen::MatrixXd::Zero(2, 5);
    CHECK_THROWS_AS(gnar_simulate(five_net(), global_spec(1, {1}), coefs({0.2, 0.3}), o, rng),
                    std::invalid_argument);
}

TEST_CASE("simulating from a fit") {
    const Network net = five_net();
    SimulationOptions o;
    o.n = 3000;
    RngStream rng(10);
    const auto data = gnar_simulate(net, global_spec(1, {1}), coefs({0.3, 0.4}), o, rng);
    const FitResult f = fit(data, net, global_spec(1, {1}));

    RngStream again(11);
    const auto sim = simulate_from_fit(f, net, 3000, again);
    CHECK(sim.length() == 3000);
    const FitResult refit = fit(sim, net, global_spec(1, {1}));
    CHECK(std::abs(refit.gamma(0) - 0.3) < 0.1);
    CHECK(std::abs(refit.gamma(1) - 0.4) < 0.1);

    // fitted innovation scale is carried over
    RngStream a(12), b(12);
    o.n = 50;
    const CoefficientSet direct{f.gamma, f.sigma_u_hat.diagonal().cwiseSqrt()};
    CHECK(simulate_from_fit(f, net, 50, a).values == gnar_simulate(net, f.spec, direct, o, b).values);

    RngStream c(13);
    CHECK_THROWS_AS(simulate_from_fit(f, net, 0, c), std::invalid_argument);
}

}  // TEST_SUITE
