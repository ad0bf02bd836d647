#pragma once

#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace gnar {

struct RowIndex {
    std::size_t t;  // zero-based time of the response
    NodeId node;
};

/**
 * @brief Stacked regression y = X gamma + u for a GNAR model.
 *
 * Candidate rows run over t = p..T-1 (time-major, node-minor). A row is
 * kept iff its response and all own lags are observed.
 */
struct DesignProblem {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<RowIndex> rows;  // one per kept row
    std::vector<bool> kept;      // one per candidate row
    std::size_t dropped = 0;
};

/// Network in force at each time point: either one static network or one per row of the series.
using NetworkTimeline = std::span<const Network>;

/**
 * @brief Build the stacked design for @p spec.
 *
 * Beta regressors at lag j use the network at the response time with the
 * nodes unobserved at t-j masked out and the remaining weights renormalised.
 * A neighbour set with no observed member contributes 0.
 *
 * @throws std::invalid_argument on dimension mismatch or T <= p.
 * @throws InsufficientData if every row is dropped.
 */
DesignProblem build_design(const SeriesMatrix& vts, NetworkTimeline nets, const ModelSpec& spec);

inline DesignProblem build_design(const SeriesMatrix& vts, const Network& net, const ModelSpec& spec) {
    return build_design(vts, NetworkTimeline(&net, 1), spec);
}

/**
 * @brief Weighted sum of neighbour values after dropping unobserved members.
 *
 * The weights of observed members are rescaled to sum to one across all
 * covariates; only members with covariate @p covariate (0 = any) are summed.
 * Returns 0 when no member is observed.
 */
double neighbour_regressor(std::span<const double> values_at_lag, const WeightMap& weights,
                           int covariate = 0);

}  // namespace gnar
