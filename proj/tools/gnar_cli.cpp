// gnar: command-line front end for fitting, simulating and forecasting GNAR models.

#include "gnar/errors.hpp"
#include "gnar/estimate.hpp"
#include "gnar/forecast.hpp"
#include "gnar/io.hpp"
#include "gnar/model.hpp"
#include "gnar/netsearch.hpp"
#include "gnar/sim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using gnar::io::json;

/// Bad flags or flag combinations; reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

void warn(const std::string& message) { std::cerr << json{{"warning", message}}.dump() << '\n'; }

/// Writes to the file if a path was given, else to stdout.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

gnar::SeriesMatrix read_series(const std::string& path) {
    std::istringstream in(gnar::io::read_text_file(path));
    return gnar::io::read_series_csv(in);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(flag + " expects comma-separated integers, got '" + text + "'");
        }
    }
    return out;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("GNAR_SEED");
    if (!env || !*env) return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("GNAR_SEED must be a non-negative integer, got '") + env + "'");
    }
}

/**
 * Reorders series columns into network node order, matching by name.
 * With by_position the columns are taken in file order and renamed.
 */
gnar::SeriesMatrix align(const gnar::SeriesMatrix& vts, const gnar::Network& net, bool by_position) {
    if (vts.n_nodes() != net.n_nodes())
        throw std::invalid_argument("series has " + std::to_string(vts.n_nodes()) + " columns but network has " +
                                    std::to_string(net.n_nodes()) + " nodes");
    gnar::SeriesMatrix out{vts.values, net.node_names()};
    if (by_position) return out;
    for (std::size_t c = 0; c < vts.n_nodes(); ++c) {
        const auto node = net.find(vts.node_names[c]);
        if (!node) throw std::invalid_argument("series column '" + vts.node_names[c] + "' is not a network node");
        out.values.col(static_cast<Eigen::Index>(*node)) = vts.values.col(static_cast<Eigen::Index>(c));
    }
    for (std::size_t c = 0; c < vts.n_nodes(); ++c)
        for (std::size_t d = c + 1; d < vts.n_nodes(); ++d)
            if (vts.node_names[c] == vts.node_names[d])
                throw std::invalid_argument("series column '" + vts.node_names[c] + "' appears twice");
    return out;
}

gnar::ModelSpec spec_from_flags(int p, const std::string& s_text, const std::string& mode, int n_covariates,
                                const std::string& groups_path, const std::vector<std::string>& names) {
    if (p < 1) throw UsageError("--p must be at least 1");
    std::vector<int> s = parse_int_list(s_text, "--s");
    if (s.empty()) s.assign(static_cast<std::size_t>(p), 0);
    if (s.size() != static_cast<std::size_t>(p))
        throw UsageError("--s has " + std::to_string(s.size()) + " entries but --p is " + std::to_string(p));
    for (int v : s)
        if (v < 0) throw UsageError("--s entries must be non-negative");
    json j{{"p", p}, {"s", s}, {"C", n_covariates}, {"alpha_mode", mode}};
    try {
        gnar::alpha_mode_from_string(mode);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (!groups_path.empty()) j["groups"] = gnar::io::read_json_file(groups_path);
    return gnar::io::spec_from_json(j, names);
}

void write_csv(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
    std::ostringstream os;
    gnar::io::write_matrix_csv(os, values, header);
    emit(path, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalised network autoregressive (GNAR) models for network time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gnar 0.1.0");

    // fit
    struct {
        std::string series, net, s, alpha_mode = "global", groups, out;
        int p = 1;
        bool by_position = false;
    } fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit of a GNAR(p,[s]) model");
    fit_cmd->add_option("--series", fit_args.series, "Series CSV (header of node names)")->required();
    fit_cmd->add_option("--net", fit_args.net, "Network JSON")->required();
    fit_cmd->add_option("--p", fit_args.p, "Autoregressive order")->required();
    fit_cmd->add_option("--s", fit_args.s, "Neighbour stages per lag, e.g. 2,0 (default all 0)");
    fit_cmd->add_option("--alpha-mode", fit_args.alpha_mode, "global | per_node | per_group");
    fit_cmd->add_option("--groups", fit_args.groups, "JSON map node name -> group label");
    fit_cmd->add_flag("--by-position", fit_args.by_position, "Match series columns to nodes by position");
    fit_cmd->add_option("--out", fit_args.out, "Output file (default stdout)");

    // simulate
    struct {
        std::string net, spec, coef, out;
        long n = 200, burn_in = 50;
        std::optional<std::uint64_t> seed;
    } sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a GNAR process");
    sim_cmd->add_option("--net", sim_args.net, "Network JSON")->required();
    sim_cmd->add_option("--spec", sim_args.spec, "Model spec JSON")->required();
    sim_cmd->add_option("--coef", sim_args.coef, "Coefficient JSON")->required();
    sim_cmd->add_option("--n", sim_args.n, "Series length");
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed (default $GNAR_SEED or 0)");
    sim_cmd->add_option("--burn-in", sim_args.burn_in, "Discarded initial steps");
    sim_cmd->add_option("--out", sim_args.out, "Output CSV (default stdout)");

    // predict
    struct {
        std::string fit, series, actuals, out, score_out;
        int h = 1;
        bool by_position = false;
    } pred_args;
    auto* pred_cmd = app.add_subcommand("predict", "Forecast from a stored fit");
    pred_cmd->set_help_flag("--help", "Print this help message and exit");
    pred_cmd->add_option("--fit", pred_args.fit, "Fit JSON written by 'gnar fit'")->required();
    pred_cmd->add_option("--series", pred_args.series, "History CSV; the last p rows are used")->required();
    pred_cmd->add_option("--h", pred_args.h, "Forecast horizon");
    pred_cmd->add_option("--actuals", pred_args.actuals, "CSV of observed values for steps 1..h");
    pred_cmd->add_flag("--by-position", pred_args.by_position, "Match columns to nodes by position");
    pred_cmd->add_option("--out", pred_args.out, "Forecast CSV (default stdout)");
    pred_cmd->add_option("--score-out", pred_args.score_out, "Score JSON (default stderr)");

    // ic-grid
    struct {
        std::string series, net, alpha_orders = "1", alpha_mode = "global", criterion = "bic", out;
        int max_stage = 1;
        unsigned jobs = 1;
        bool by_position = false;
    } grid_args;
    auto* grid_cmd = app.add_subcommand("ic-grid", "Information criterion over a grid of model orders");
    grid_cmd->add_option("--series", grid_args.series, "Series CSV")->required();
    grid_cmd->add_option("--net", grid_args.net, "Network JSON")->required();
    grid_cmd->add_option("--alpha-orders", grid_args.alpha_orders, "Comma-separated p values");
    grid_cmd->add_option("--max-stage", grid_args.max_stage, "Largest stage per lag");
    grid_cmd->add_option("--alpha-mode", grid_args.alpha_mode, "global | per_node");
    grid_cmd->add_option("--criterion", grid_args.criterion, "bic | aic");
    grid_cmd->add_option("--jobs", grid_args.jobs, "Worker threads");
    grid_cmd->add_flag("--by-position", grid_args.by_position, "Match series columns to nodes by position");
    grid_cmd->add_option("--out", grid_args.out, "Long-format CSV (default stdout)");

    // net-search
    struct {
        std::string series, alpha_orders = "1", out, best_net;
        int max_stage = 1;
        std::size_t n_networks = 100, train_end = 0, target = 0;
        double prob = 0.15;
        std::optional<std::uint64_t> seed;
        unsigned jobs = 1;
        bool normalize = false;
    } search_args;
    auto* search_cmd = app.add_subcommand("net-search", "Score random networks by held-out prediction error");
    search_cmd->add_option("--series", search_args.series, "Series CSV")->required();
    search_cmd->add_option("--alpha-orders", search_args.alpha_orders, "Comma-separated p values");
    search_cmd->add_option("--max-stage", search_args.max_stage, "Largest stage per lag");
    search_cmd->add_option("--networks", search_args.n_networks, "Number of random networks");
    search_cmd->add_option("--prob", search_args.prob, "Edge probability");
    search_cmd->add_option("--seed", search_args.seed, "Master seed (default $GNAR_SEED or 0)");
    search_cmd->add_option("--train-end", search_args.train_end, "Fit on rows 1..train-end")->required();
    search_cmd->add_option("--target", search_args.target, "Row scored (default train-end + 1)");
    search_cmd->add_option("--jobs", search_args.jobs, "Worker threads");
    search_cmd->add_flag("--normalize", search_args.normalize,
                         "Divide each node by its standard deviation over the training rows");
    search_cmd->add_option("--out", search_args.out, "Score table CSV (default stdout)");
    search_cmd->add_option("--best-net", search_args.best_net, "Write the best network JSON here");

    // convert
    struct {
        std::string adjacency, network, kind = "weights", out;
        bool symmetrize = false;
    } conv_args;
    auto* conv_cmd = app.add_subcommand("convert", "Convert between adjacency CSV and network JSON");
    auto* adj_opt = conv_cmd->add_option("--adjacency", conv_args.adjacency, "Adjacency CSV to convert to JSON");
    auto* net_opt = conv_cmd->add_option("--network", conv_args.network, "Network JSON to convert to CSV");
    adj_opt->excludes(net_opt);
    conv_cmd->add_option("--kind", conv_args.kind, "Matrix entries are 'weights' or 'distances'");
    conv_cmd->add_flag("--symmetrize", conv_args.symmetrize, "Treat the adjacency as undirected");
    conv_cmd->add_option("--out", conv_args.out, "Output file (default stdout)");

    // check-stationarity
    struct {
        std::string net, spec, coef, out;
    } stat_args;
    auto* stat_cmd = app.add_subcommand("check-stationarity", "Per-node margins and companion spectral radius");
    stat_cmd->add_option("--net", stat_args.net, "Network JSON")->required();
    stat_cmd->add_option("--spec", stat_args.spec, "Model spec JSON")->required();
    stat_cmd->add_option("--coef", stat_args.coef, "Coefficient JSON (or a fit JSON)")->required();
    stat_cmd->add_option("--out", stat_args.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (fit_cmd->parsed()) {
            const gnar::Network net = gnar::io::network_from_json(gnar::io::read_json_file(fit_args.net));
            const gnar::ModelSpec spec = spec_from_flags(fit_args.p, fit_args.s, fit_args.alpha_mode,
                                                         net.n_covariates(), fit_args.groups, net.node_names());
            const gnar::SeriesMatrix vts = align(read_series(fit_args.series), net, fit_args.by_position);
            const gnar::FitResult f = gnar::fit(vts, net, spec);
            for (const auto& w : f.warnings) warn(w);
            emit(fit_args.out, json_text(gnar::io::fit_to_json(f, net)));
        } else if (sim_cmd->parsed()) {
            const gnar::Network net = gnar::io::network_from_json(gnar::io::read_json_file(sim_args.net));
            const gnar::ModelSpec spec =
                gnar::io::spec_from_json(gnar::io::read_json_file(sim_args.spec), net.node_names());
            const gnar::CoefficientSet coef =
                gnar::io::coefficients_from_json(gnar::io::read_json_file(sim_args.coef), spec, net.n_nodes());
            gnar::SimulationOptions options;
            options.n = sim_args.n;
            options.burn_in = sim_args.burn_in;
            if (options.n <= 0) throw UsageError("--n must be positive");
            if (options.burn_in < 0) throw UsageError("--burn-in must be non-negative");
            gnar::RngStream rng(sim_args.seed.value_or(default_seed()));
            std::vector<std::string> warnings;
            const auto x = gnar::gnar_simulate(net, spec, coef, options, rng, &warnings);
            for (const auto& w : warnings) warn(w);
            std::ostringstream os;
            gnar::io::write_series_csv(os, x);
            emit(sim_args.out, os.str());
        } else if (pred_cmd->parsed()) {
            if (pred_args.h <= 0) throw UsageError("--h must be positive");
            const auto stored = gnar::io::fit_from_json(gnar::io::read_json_file(pred_args.fit));
            const gnar::SeriesMatrix history =
                align(read_series(pred_args.series), stored.network, pred_args.by_position);
            const Eigen::MatrixXd forecast =
                gnar::predict(stored.network, stored.spec, stored.gamma, history, pred_args.h);
            write_csv(pred_args.out, forecast, stored.network.node_names());
            if (!pred_args.actuals.empty()) {
                const gnar::SeriesMatrix actual =
                    align(read_series(pred_args.actuals), stored.network, pred_args.by_position);
                if (actual.length() < static_cast<std::size_t>(pred_args.h))
                    throw std::invalid_argument("actuals CSV has fewer than h rows");
                json steps = json::array();
                double total = 0.0;
                for (int k = 0; k < pred_args.h; ++k) {
                    const double e = gnar::prediction_error(Eigen::VectorXd(forecast.row(k).transpose()),
                                                            Eigen::VectorXd(actual.values.row(k).transpose()));
                    steps.push_back({{"step", k + 1}, {"error", e}});
                    total += e;
                }
                const json score{{"steps", steps}, {"total", total}};
                if (pred_args.score_out.empty()) std::cerr << score.dump() << '\n';
                else emit(pred_args.score_out, json_text(score));
            }
        } else if (grid_cmd->parsed()) {
            const gnar::Network net = gnar::io::network_from_json(gnar::io::read_json_file(grid_args.net));
            const gnar::SeriesMatrix vts = align(read_series(grid_args.series), net, grid_args.by_position);
            const auto orders = parse_int_list(grid_args.alpha_orders, "--alpha-orders");
            if (orders.empty()) throw UsageError("--alpha-orders is empty");
            if (grid_args.max_stage < 0) throw UsageError("--max-stage must be non-negative");
            gnar::AlphaMode mode;
            gnar::Criterion criterion;
            try {
                mode = gnar::alpha_mode_from_string(grid_args.alpha_mode);
                criterion = gnar::criterion_from_string(grid_args.criterion);
                for (int p : orders)
                    if (p < 1) throw std::invalid_argument("--alpha-orders entries must be >= 1");
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            if (mode == gnar::AlphaMode::per_group) throw UsageError("ic-grid does not support per_group models");
            const auto specs = gnar::order_grid(orders, grid_args.max_stage, mode, net.n_covariates());
            const gnar::IcGrid grid = gnar::ic_grid(vts, net, specs, criterion, grid_args.jobs);
            int max_p = 0;
            for (int p : orders) max_p = std::max(max_p, p);
            std::ostringstream os;
            os << "p";
            for (int j = 1; j <= max_p; ++j) os << ",b" << j;
            os << ",n_params,value,best\n";
            for (std::size_t k = 0; k < grid.entries.size(); ++k) {
                const auto& e = grid.entries[k];
                os << e.spec.p;
                for (int j = 1; j <= max_p; ++j)
                    os << ',' << (j <= e.spec.p ? std::to_string(e.spec.s[static_cast<std::size_t>(j - 1)]) : "NA");
                os << ',' << e.n_params << ',' << (e.value ? gnar::io::format_double(*e.value) : "NA") << ','
                   << (k == grid.best ? 1 : 0) << '\n';
                if (!e.value) warn(e.spec.label() + ": " + e.error);
            }
            emit(grid_args.out, os.str());
        } else if (search_cmd->parsed()) {
            gnar::SeriesMatrix vts = read_series(search_args.series);
            const auto orders = parse_int_list(search_args.alpha_orders, "--alpha-orders");
            if (orders.empty()) throw UsageError("--alpha-orders is empty");
            for (int p : orders)
                if (p < 1) throw UsageError("--alpha-orders entries must be >= 1");
            if (search_args.max_stage < 0) throw UsageError("--max-stage must be non-negative");
            if (!(search_args.prob >= 0.0 && search_args.prob <= 1.0)) throw UsageError("--prob must be in [0, 1]");
            gnar::SearchOptions options;
            options.n_networks = search_args.n_networks;
            options.prob = search_args.prob;
            options.master_seed = search_args.seed.value_or(default_seed());
            options.train_end = search_args.train_end;
            options.target = search_args.target ? search_args.target : search_args.train_end + 1;
            options.jobs = search_args.jobs;
            if (search_args.normalize) vts = gnar::normalize_by_node_sd(vts, search_args.train_end).series;
            const auto specs = gnar::order_grid(orders, search_args.max_stage);
            const gnar::SearchResult result = gnar::search(vts, specs, options);
            std::ostringstream os;
            os << "seed,spec_id,spec,error\n";
            for (const auto& e : result.table)
                os << e.seed << ',' << e.spec_id << ',' << '"' << specs[e.spec_id].label() << '"' << ','
                   << (std::isfinite(e.error) ? gnar::io::format_double(e.error) : "Inf") << '\n';
            emit(search_args.out, os.str());
            if (!search_args.best_net.empty())
                emit(search_args.best_net, json_text(gnar::io::network_to_json(result.best_network)));
        } else if (conv_cmd->parsed()) {
            gnar::AdjacencyKind kind;
            if (conv_args.kind == "weights") kind = gnar::AdjacencyKind::weights;
            else if (conv_args.kind == "distances") kind = gnar::AdjacencyKind::distances;
            else throw UsageError("--kind must be 'weights' or 'distances'");
            if (!conv_args.adjacency.empty()) {
                std::istringstream in(gnar::io::read_text_file(conv_args.adjacency));
                const auto adj = gnar::io::read_adjacency_csv(in);
                const auto net = gnar::Network::from_adjacency(adj.matrix, kind, conv_args.symmetrize, adj.names);
                emit(conv_args.out, json_text(gnar::io::network_to_json(net)));
            } else if (!conv_args.network.empty()) {
                const auto net = gnar::io::network_from_json(gnar::io::read_json_file(conv_args.network));
                std::ostringstream os;
                gnar::io::write_adjacency_csv(os, net.to_adjacency(kind), net.node_names());
                emit(conv_args.out, os.str());
            } else {
                throw UsageError("convert needs --adjacency or --network");
            }
        } else if (stat_cmd->parsed()) {
            const gnar::Network net = gnar::io::network_from_json(gnar::io::read_json_file(stat_args.net));
            const gnar::ModelSpec spec =
                gnar::io::spec_from_json(gnar::io::read_json_file(stat_args.spec), net.node_names());
            const gnar::CoefficientSet coef =
                gnar::io::coefficients_from_json(gnar::io::read_json_file(stat_args.coef), spec, net.n_nodes());
            const auto report = gnar::stationarity_margin(spec, coef, net.n_nodes());
            json margins = json::object();
            for (std::size_t i = 0; i < net.n_nodes(); ++i) margins[net.node_names()[i]] = report.margins[i];
            const double radius =
                gnar::spectral_radius(gnar::companion_matrix(gnar::to_var_matrices(net, spec, coef.gamma)));
            emit(stat_args.out, json_text({{"margins", margins},
                                           {"sufficient_condition_holds", report.sufficient_condition_holds},
                                           {"companion_spectral_radius", radius}}));
        }
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const gnar::InsufficientData& e) {
        print_error("insufficient_data", e.what());
        return 1;
    } catch (const json::exception& e) {
        print_error("input", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        print_error("input", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return 1;
    }
    return 0;
}
