#pragma once

#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/rng.hpp"
#include "gnar/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gnar {

struct FitResult;

struct SimulationOptions {
    long n = 200;
    long burn_in = 50;
    /// Optional p x N presample (oldest row first). Zeros when empty.
    Eigen::MatrixXd initial;
};

/**
 * @brief Simulate a GNAR process node by node.
 *
 * Each step draws one standard normal per node (time-major, node-minor)
 * and scales it by sigma_i. The first burn_in generated rows are dropped.
 * If the stationarity margin condition fails a warning is appended to
 * @p warnings; simulation still proceeds.
 */
SeriesMatrix gnar_simulate(const Network& net, const ModelSpec& spec, const CoefficientSet& coef,
                           const SimulationOptions& options, RngStream& rng,
                           std::vector<std::string>* warnings = nullptr);

/// Same recursion through the lag matrices phi_k, consuming noise in the same order.
SeriesMatrix var_simulate(const std::vector<Eigen::MatrixXd>& phis, const Eigen::VectorXd& sigma,
                          const SimulationOptions& options, RngStream& rng);

/// Simulate from fitted coefficients with sigma_i = sqrt of the fitted innovation variance.
SeriesMatrix simulate_from_fit(const FitResult& fit, const Network& net, long n, RngStream& rng,
                               long burn_in = 50);

}  // namespace gnar
