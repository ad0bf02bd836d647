#include "gnar/netsearch.hpp"

#include "gnar/forecast.hpp"
#include "gnar/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace gnar {

namespace {

// Runs task(k) for k in [0, count) on up to `jobs` threads. Each task writes only its own slot.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) task(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, count); ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) task(k);
        });
    }
}

}  // namespace

Network erdos_renyi(std::uint64_t seed, std::size_t n_nodes, double prob,
                    std::vector<std::string> node_names) {
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("edge probability must be in [0, 1]");
    RngStream rng(seed);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = i + 1; j < n_nodes; ++j)
            if (rng.uniform() < prob) edges.push_back({i, j, 1.0, 1});
    if (node_names.empty()) return Network(n_nodes, std::move(edges), false);
    return Network(std::move(node_names), std::move(edges), false);
}

std::vector<std::uint64_t> network_seeds(std::uint64_t master_seed, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t k = 0; k < count; ++k) seeds[k] = RngStream::child_seed(master_seed, k);
    return seeds;
}

SearchResult search(const SeriesMatrix& vts, const std::vector<ModelSpec>& specs,
                    const SearchOptions& options) {
    if (specs.empty()) throw std::invalid_argument("no candidate model orders");
    if (options.train_end == 0 || options.train_end >= vts.length())
        throw std::invalid_argument("train_end must lie inside the series");
    if (options.target <= options.train_end || options.target > vts.length())
        throw std::invalid_argument("target must be after train_end and inside the series");
    const int horizon = static_cast<int>(options.target - options.train_end);

    const SeriesMatrix train = vts.rows(0, options.train_end);
    const Eigen::VectorXd actual = vts.values.row(static_cast<Eigen::Index>(options.target - 1)).transpose();
    const auto seeds = network_seeds(options.master_seed, options.n_networks);

    std::vector<SearchEntry> table(options.n_networks * specs.size());
    parallel_for(options.n_networks, options.jobs, [&](std::size_t k) {
        const Network net = erdos_renyi(seeds[k], vts.n_nodes(), options.prob, vts.node_names);
        for (std::size_t s = 0; s < specs.size(); ++s) {
            SearchEntry& entry = table[k * specs.size() + s];
            entry = {k, seeds[k], s, std::numeric_limits<double>::infinity()};
            try {
                const FitResult f = fit(train, net, specs[s]);
                const Eigen::MatrixXd pred = predict(net, specs[s], f.gamma, train, horizon);
                entry.error = prediction_error(Eigen::VectorXd(pred.row(horizon - 1).transpose()), actual);
            } catch (const std::exception&) {
                // unfit candidates keep an infinite score
            }
        }
    });

    std::vector<SearchEntry> ranked = table;
    std::stable_sort(ranked.begin(), ranked.end(), [](const SearchEntry& a, const SearchEntry& b) {
        return std::tie(a.error, a.seed, a.spec_id) < std::tie(b.error, b.seed, b.spec_id);
    });
    if (ranked.empty() || !std::isfinite(ranked.front().error))
        throw std::runtime_error("no candidate model could be fitted");

    const SearchEntry best = ranked.front();
    return {std::move(table), std::move(ranked),
            erdos_renyi(best.seed, vts.n_nodes(), options.prob, vts.node_names), specs[best.spec_id], best};
}

std::vector<ModelSpec> order_grid(const std::vector<int>& alpha_orders, int max_stage, AlphaMode mode,
                                  int n_covariates) {
    if (max_stage < 0) throw std::invalid_argument("maximum stage must be non-negative");
    std::vector<ModelSpec> out;
    for (int p : alpha_orders) {
        if (p < 1) throw std::invalid_argument("alpha order must be >= 1");
        std::vector<int> s(static_cast<std::size_t>(p), 0);
        while (true) {
            ModelSpec spec;
            spec.p = p;
            spec.s = s;
            spec.alpha_mode = mode;
            spec.n_covariates = n_covariates;
            out.push_back(spec);
            // odometer over s, last lag fastest
            int pos = p - 1;
            while (pos >= 0 && s[static_cast<std::size_t>(pos)] == max_stage) s[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
            ++s[static_cast<std::size_t>(pos)];
        }
    }
    return out;
}

IcGrid ic_grid(const SeriesMatrix& vts, const Network& net, const std::vector<ModelSpec>& specs,
               Criterion criterion, unsigned jobs) {
    if (specs.empty()) throw std::invalid_argument("no candidate model orders");
    IcGrid grid;
    grid.entries.resize(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t k) {
        GridEntry& entry = grid.entries[k];
        entry.spec = specs[k];
        try {
            entry.n_params = specs[k].n_params(vts.n_nodes());
            entry.value = criterion_value(fit(vts, net, specs[k]), criterion);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
    });

    auto order_key = [](const ModelSpec& s) {
        std::vector<int> key{s.p};
        key.insert(key.end(), s.s.begin(), s.s.end());
        return key;
    };
    bool found = false;
    for (std::size_t k = 0; k < grid.entries.size(); ++k) {
        const auto& e = grid.entries[k];
        if (!e.value) continue;
        if (!found) {
            grid.best = k;
            found = true;
            continue;
        }
        const auto& b = grid.entries[grid.best];
        if (std::make_tuple(*e.value, e.n_params, order_key(e.spec)) <
            std::make_tuple(*b.value, b.n_params, order_key(b.spec)))
            grid.best = k;
    }
    if (!found) throw std::runtime_error("no candidate model could be fitted");
    return grid;
}

Normalized normalize_by_node_sd(const SeriesMatrix& vts, std::size_t window_end) {
    if (window_end == 0 || window_end > vts.length())
        throw std::invalid_argument("normalisation window outside the series");
    Normalized out{vts, Eigen::VectorXd(static_cast<Eigen::Index>(vts.n_nodes()))};
    for (std::size_t i = 0; i < vts.n_nodes(); ++i) {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < window_end; ++t) {
            if (vts.missing(t, i)) continue;
            const double v = vts.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
            sum += v;
            ++count;
        }
        if (count < 2)
            throw std::invalid_argument("node '" + vts.node_names[i] + "' has fewer than two observations");
        const double mean = sum / static_cast<double>(count);
        for (std::size_t t = 0; t < window_end; ++t) {
            if (vts.missing(t, i)) continue;
            const double d = vts.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) - mean;
            sum_sq += d * d;
        }
        const double sd = std::sqrt(sum_sq / static_cast<double>(count - 1));
        if (!(sd > 0.0) || !std::isfinite(sd))
            throw std::invalid_argument("node '" + vts.node_names[i] + "' has zero standard deviation");
        out.scales(static_cast<Eigen::Index>(i)) = sd;
        out.series.values.col(static_cast<Eigen::Index>(i)) /= sd;
    }
    return out;
}

Eigen::MatrixXd denormalize(const Eigen::MatrixXd& values, const Eigen::VectorXd& scales) {
    if (values.cols() != scales.size()) throw std::invalid_argument("scale vector size mismatch");
    return values * scales.asDiagonal();
}

}  // namespace gnar
