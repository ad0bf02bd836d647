#pragma once

#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/series.hpp"

#include <Eigen/Dense>

#include <span>

namespace gnar {

/**
 * @brief Iterated conditional-expectation forecast for h steps.
 *
 * Uses the last p rows of @p history. Unobserved neighbours in the history
 * are dropped from the beta regressors with weights renormalised; an
 * unobserved own lag is an error. Row k of the result is the (k+1)-step
 * forecast.
 */
Eigen::MatrixXd predict(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& gamma,
                        const SeriesMatrix& history, int horizon);

/// Sum of squared differences over the observed entries of @p actual.
double prediction_error(std::span<const double> predicted, std::span<const double> actual);

inline double prediction_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    return prediction_error(std::span<const double>(predicted.data(), static_cast<std::size_t>(predicted.size())),
                            std::span<const double>(actual.data(), static_cast<std::size_t>(actual.size())));
}

}  // namespace gnar
