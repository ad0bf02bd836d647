#pragma once

#include "gnar/estimate.hpp"
#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gnar {

/**
 * @brief Undirected G(n, prob) graph with unit distances.
 *
 * Pairs (i, j), i < j, are visited in lexicographic order and each is kept
 * when the next uniform from RngStream(seed) is below @p prob.
 */
Network erdos_renyi(std::uint64_t seed, std::size_t n_nodes, double prob,
                    std::vector<std::string> node_names = {});

/// Seeds of the candidate networks derived from a master seed.
std::vector<std::uint64_t> network_seeds(std::uint64_t master_seed, std::size_t count);

struct SearchOptions {
    std::size_t n_networks = 100;
    double prob = 0.15;
    std::uint64_t master_seed = 0;
    std::size_t train_end = 0;  // fit on rows 1..train_end
    std::size_t target = 0;     // one-based row scored against
    unsigned jobs = 1;
};

struct SearchEntry {
    std::size_t network_index = 0;
    std::uint64_t seed = 0;
    std::size_t spec_id = 0;
    double error = 0.0;  // +inf when the candidate could not be fitted
};

struct SearchResult {
    std::vector<SearchEntry> table;   // candidate order: network-major, spec-minor
    std::vector<SearchEntry> ranked;  // ascending error, ties by (seed, spec id)
    Network best_network;
    ModelSpec best_spec;
    SearchEntry best;
};

/**
 * @brief Score every (random network, model order) pair by held-out prediction error.
 *
 * Each candidate is fitted on rows 1..train_end and forecast
 * target - train_end steps ahead. Results do not depend on @c jobs.
 *
 * @throws std::runtime_error if no candidate can be fitted.
 */
SearchResult search(const SeriesMatrix& vts, const std::vector<ModelSpec>& specs,
                    const SearchOptions& options);

struct GridEntry {
    ModelSpec spec;
    std::size_t n_params = 0;
    std::optional<double> value;  // empty when the fit failed
    std::string error;
};

struct IcGrid {
    std::vector<GridEntry> entries;
    std::size_t best = 0;
};

/// All specs with alpha order in @p alpha_orders and every stage vector with s_j <= max_stage.
std::vector<ModelSpec> order_grid(const std::vector<int>& alpha_orders, int max_stage,
                                  AlphaMode mode = AlphaMode::global, int n_covariates = 1);

/**
 * @brief Information criterion of each candidate on the same data.
 *
 * Ties in the criterion go to the smaller parameter count, then to the
 * lexicographically smaller (p, s) order.
 */
IcGrid ic_grid(const SeriesMatrix& vts, const Network& net, const std::vector<ModelSpec>& specs,
               Criterion criterion, unsigned jobs = 1);

struct Normalized {
    SeriesMatrix series;
    Eigen::VectorXd scales;
};

/// Divide each column by its sample standard deviation over rows 1..window_end.
Normalized normalize_by_node_sd(const SeriesMatrix& vts, std::size_t window_end);

/// Undo normalize_by_node_sd on a matrix with one column per node.
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& values, const Eigen::VectorXd& scales);

}  // namespace gnar
