#include "gnar/forecast.hpp"
#include "gnar/io.hpp"
#include "gnar/sim.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef GNAR_CLI_PATH
#error "GNAR_CLI_PATH must point at the gnar executable"
#endif

using namespace gnar;
using namespace gnar::testing;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("gnar_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
    std::string read(const std::string& name) const { return io::read_text_file(dir / name); }
};

/// Runs the CLI with the given argument string; returns its exit code.
int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" GNAR_CLI_PATH "\" " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFiveAdjacency = "A,B,C,D,E\n0,0,0,1,1\n0,0,1,1,0\n0,1,0,1,0\n1,1,1,0,0\n1,0,0,0,0\n";

SeriesMatrix simulated_five(long n, std::uint64_t seed) {
    ModelSpec spec;
    spec.p = 2;
    spec.s = {1, 1};
    Eigen::VectorXd gamma(4);
    gamma << 0.2, 0.3, 0.1, 0.1;
    RngStream rng(seed);
    SimulationOptions o;
    o.n = n;
    return gnar_simulate(five_net(), spec, {gamma, Eigen::VectorXd::Ones(1)}, o, rng);
}

std::string series_text(const SeriesMatrix& s) {
    std::ostringstream os;
    io::write_series_csv(os, s);
    return os.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("convert round trip") {
    Workspace ws;
    ws.write("adj.csv", kFiveAdjacency);
    REQUIRE(run("convert --adjacency " + ws.path("adj.csv") + " --out " + ws.path("net.json")) == 0);
    const Network net = io::network_from_json(io::read_json_file(ws.path("net.json")));
    CHECK(net.edges() == five_net().edges());
    REQUIRE(run("convert --network " + ws.path("net.json") + " --out " + ws.path("back.csv")) == 0);
    CHECK(ws.read("back.csv") == kFiveAdjacency);
    CHECK(run("convert --out " + ws.path("x") + " 2>/dev/null") == 2);
}

TEST_CASE("fit") {
    Workspace ws;
    ws.write("net.json", io::network_to_json(five_net()).dump());
    const SeriesMatrix x = simulated_five(200, 1);
    ws.write("series.csv", series_text(x));

    REQUIRE(run("fit --series " + ws.path("series.csv") + " --net " + ws.path("net.json") +
                " --p 2 --s 1,1 --alpha-mode global --out " + ws.path("fit.json")) == 0);
    const auto j = io::read_json_file(ws.path("fit.json"));
    REQUIRE(j.at("coefficients").size() == 4);
    const std::vector<std::string> names{"alpha1", "beta1.1", "alpha2", "beta2.1"};
    for (std::size_t k = 0; k < 4; ++k) CHECK(j.at("coefficients")[k].at("name") == names[k]);
    ModelSpec spec;
    spec.p = 2;
    spec.s = {1, 1};
    const FitResult direct = fit(x, five_net(), spec);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(j.at("coefficients")[k].at("estimate").get<double>() == direct.gamma(static_cast<Eigen::Index>(k)));

    SUBCASE("columns are matched by name") {
        SeriesMatrix shuffled{Eigen::MatrixXd(x.values.rows(), 5), {"E", "D", "C", "B", "A"}};
        for (Eigen::Index i = 0; i < 5; ++i) shuffled.values.col(i) = x.values.col(4 - i);
        ws.write("shuffled.csv", series_text(shuffled));
        REQUIRE(run("fit --series " + ws.path("shuffled.csv") + " --net " + ws.path("net.json") +
                    " --p 2 --s 1,1 --out " + ws.path("fit2.json")) == 0);
        CHECK(ws.read("fit2.json") == ws.read("fit.json"));
        CHECK(run("fit --series " + ws.path("shuffled.csv") + " --net " + ws.path("net.json") +
                  " --p 2 --s 1,1 --by-position --out " + ws.path("fit3.json")) == 0);
        CHECK(ws.read("fit3.json") != ws.read("fit.json"));
    }
    SUBCASE("s longer than p is a usage error") {
        CHECK(run("fit --series " + ws.path("series.csv") + " --net " + ws.path("net.json") +
                  " --p 1 --s 1,1 2>" + ws.path("err.txt")) == 2);
        const auto err = io::json::parse(ws.read("err.txt"));
        CHECK(err.at("error").at("kind") == "usage");
    }
    SUBCASE("unknown node names fail") {
        SeriesMatrix renamed = x;
        renamed.node_names[0] = "Z";
        ws.write("renamed.csv", series_text(renamed));
        CHECK(run("fit --series " + ws.path("renamed.csv") + " --net " + ws.path("net.json") +
                  " --p 1 2>/dev/null") == 1);
    }
    SUBCASE("missing window") {
        SeriesMatrix holes = x;
        for (Eigen::Index t = 49; t <= 149; ++t) holes.values(t, C) = kMissing;
        ws.write("holes.csv", series_text(holes));
        REQUIRE(run("fit --series " + ws.path("holes.csv") + " --net " + ws.path("net.json") +
                    " --p 1 --s 1 --out " + ws.path("holes.json")) == 0);
        const auto h = io::read_json_file(ws.path("holes.json"));
        const auto& fitted = h.at("fitted");
        for (std::size_t t = 0; t < 200; ++t)
            for (std::size_t i = 0; i < 5; ++i) {
                const bool dropped = t == 0 || (i == C && t >= 49 && t <= 150);
                CHECK(fitted[t][i].is_null() == dropped);
            }
    }
}

TEST_CASE("simulate") {
    Workspace ws;
    ws.write("net.json", io::network_to_json(five_net()).dump());
    ws.write("spec.json", R"({"p": 1, "s": [1]})");
    ws.write("zero.json", R"({"coefficients": {"alpha1": 0.2, "beta1.1": 0.3}, "sigma": 0})");
    ws.write("coef.json", R"({"coefficients": {"alpha1": 0.2, "beta1.1": 0.3}})");
    ws.write("hot.json", R"({"coefficients": {"alpha1": 0.2, "beta1.1": 0.85}})");
    const std::string base = "simulate --net " + ws.path("net.json") + " --spec " + ws.path("spec.json");

    REQUIRE(run(base + " --coef " + ws.path("zero.json") + " --n 20 --out " + ws.path("zero.csv")) == 0);
    std::istringstream zero(ws.read("zero.csv"));
    CHECK(io::read_series_csv(zero).values.isZero());

    REQUIRE(run(base + " --coef " + ws.path("coef.json") + " --n 50 --seed 7 --out " + ws.path("a.csv")) == 0);
    REQUIRE(run(base + " --coef " + ws.path("coef.json") + " --n 50 --seed 7 --out " + ws.path("b.csv")) == 0);
    REQUIRE(run(base + " --coef " + ws.path("coef.json") + " --n 50 --out " + ws.path("c.csv"), "GNAR_SEED=7") == 0);
    CHECK(ws.read("a.csv") == ws.read("b.csv"));
    CHECK(ws.read("a.csv") == ws.read("c.csv"));

    // matches the library with the same seed
    RngStream rng(7);
    SimulationOptions o;
    o.n = 50;
    Eigen::VectorXd gamma(2);
    gamma << 0.2, 0.3;
    ModelSpec spec;
    spec.s = {1};
    CHECK(ws.read("a.csv") == series_text(gnar_simulate(five_net(), spec, {gamma, Eigen::VectorXd::Ones(1)}, o, rng)));

    REQUIRE(run(base + " --coef " + ws.path("hot.json") + " --n 50 --out " + ws.path("hot.csv") + " 2>" +
                ws.path("warn.txt")) == 0);
    CHECK(ws.read("warn.txt").find("stationarity") != std::string::npos);

    CHECK(run(base + " --coef " + ws.path("coef.json") + " --n 0 2>/dev/null") == 2);
    CHECK(run(base + " --coef " + ws.path("coef.json") + " --n 5 2>/dev/null", "GNAR_SEED=abc") == 2);
}

TEST_CASE("predict") {
    Workspace ws;
    ws.write("net.json", io::network_to_json(five_net()).dump());
    const SeriesMatrix x = simulated_five(120, 2);
    ws.write("train.csv", series_text(x.rows(0, 100)));
    ws.write("actual.csv", series_text(x.rows(100, 3)));
    REQUIRE(run("fit --series " + ws.path("train.csv") + " --net " + ws.path("net.json") +
                " --p 2 --s 1,1 --out " + ws.path("fit.json")) == 0);
    REQUIRE(run("predict --fit " + ws.path("fit.json") + " --series " + ws.path("train.csv") + " --h 3 --actuals " +
                ws.path("actual.csv") + " --out " + ws.path("pred.csv") + " --score-out " + ws.path("score.json")) == 0);

    ModelSpec spec;
    spec.p = 2;
    spec.s = {1, 1};
    const SeriesMatrix train = x.rows(0, 100);
    const FitResult f = fit(train, five_net(), spec);
    const Eigen::MatrixXd expected = predict(five_net(), spec, f.gamma, train, 3);
    std::istringstream pred_text(ws.read("pred.csv"));
    const SeriesMatrix pred = io::read_series_csv(pred_text);
    CHECK(pred.values == expected);

    const auto score = io::read_json_file(ws.path("score.json"));
    double total = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) {
        const double e = prediction_error(Eigen::VectorXd(expected.row(k).transpose()),
                                          Eigen::VectorXd(x.values.row(100 + k).transpose()));
        CHECK(score.at("steps")[static_cast<std::size_t>(k)].at("error").get<double>() == e);
        total += e;
    }
    CHECK(score.at("total").get<double>() == total);

    SeriesMatrix partial{x.values.block(100, 0, 3, 4), {"A", "B", "C", "D"}};
    ws.write("partial.csv", series_text(partial));
    CHECK(run("predict --fit " + ws.path("fit.json") + " --series " + ws.path("train.csv") + " --h 1 --actuals " +
              ws.path("partial.csv") + " --out " + ws.path("p2.csv") + " 2>/dev/null") == 1);
}

TEST_CASE("ic-grid and net-search") {
    Workspace ws;
    ws.write("net.json", io::network_to_json(five_net()).dump());
    ws.write("series.csv", series_text(simulated_five(200, 3)));
    REQUIRE(run("ic-grid --series " + ws.path("series.csv") + " --net " + ws.path("net.json") +
                " --alpha-orders 2 --max-stage 2 --out " + ws.path("grid.csv")) == 0);
    std::istringstream grid(ws.read("grid.csv"));
    std::string header;
    std::getline(grid, header);
    CHECK(header == "p,b1,b2,n_params,value,best");
    int rows = 0, best = 0;
    for (std::string line; std::getline(grid, line); ++rows) best += line.back() == '1' ? 1 : 0;
    CHECK(rows == 9);
    CHECK(best == 1);

    const std::string search = "net-search --series " + ws.path("series.csv") +
                                " --alpha-orders 1,2 --max-stage 1 --networks 12 --train-end 150 --seed 3";
    REQUIRE(run(search + " --jobs 1 --out " + ws.path("s1.csv") + " --best-net " + ws.path("b1.json")) == 0);
    REQUIRE(run(search + " --jobs 8 --out " + ws.path("s8.csv") + " --best-net " + ws.path("b8.json")) == 0);
    CHECK(ws.read("s1.csv") == ws.read("s8.csv"));
    CHECK(ws.read("b1.json") == ws.read("b8.json"));
    CHECK_NOTHROW(io::network_from_json(io::read_json_file(ws.path("b1.json"))));
}

TEST_CASE("check-stationarity") {
    Workspace ws;
    ws.write("net.json", io::network_to_json(five_net()).dump());
    ws.write("spec.json", R"({"p": 1, "s": [1], "alpha_mode": "per_node"})");
    ws.write("coef.json",
             R"({"coefficients": {"alpha1node1": 0.4, "alpha1node2": 0, "alpha1node3": -0.6, "alpha1node4": 0, "alpha1node5": 0, "beta1.1": 0.3}})");
    REQUIRE(run("check-stationarity --net " + ws.path("net.json") + " --spec " + ws.path("spec.json") + " --coef " +
                ws.path("coef.json") + " --out " + ws.path("st.json")) == 0);
    const auto j = io::read_json_file(ws.path("st.json"));
    CHECK(j.at("margins").at("C").get<double>() == doctest::Approx(0.9));
    CHECK(j.at("sufficient_condition_holds") == true);
    CHECK(j.at("companion_spectral_radius").get<double>() < 1.0);
}

}  // TEST_SUITE
