#pragma once

#include "gnar/design.hpp"
#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace gnar {

enum class Criterion { bic, aic };

std::string to_string(Criterion criterion);
Criterion criterion_from_string(const std::string& text);

struct FitOptions {
    /// Replace a singular innovation covariance by Sigma + 1e-10 I (with a warning) instead of failing.
    bool allow_ridge = true;
};

/**
 * @brief Least-squares fit of a GNAR model.
 *
 * Information criteria use T_eff = T - p as the sample size, and missing
 * residual cells contribute zero to U'U.
 */
struct FitResult {
    ModelSpec spec;
    std::vector<std::string> node_names;
    std::vector<std::string> coef_names;
    Eigen::VectorXd gamma;
    Eigen::VectorXd se;
    Eigen::MatrixXd fitted;     // T x N, missing where the row was dropped
    Eigen::MatrixXd residuals;  // T x N, likewise
    Eigen::MatrixXd sigma_u_hat;
    long dof = 0;
    double residual_variance = 0.0;  // RSS / dof
    double rss = 0.0;
    std::size_t n_obs_used = 0;
    std::size_t dropped_rows = 0;
    std::size_t t_eff = 0;
    std::vector<std::size_t> effective_sample;  // residuals per node
    double bic = 0.0;
    double aic = 0.0;
    double loglik = 0.0;
    std::vector<std::size_t> aliased_columns;
    std::vector<std::string> warnings;

    CoefficientSet coefficients() const { return {gamma, sigma_u_hat.diagonal().cwiseSqrt()}; }
};

/**
 * @brief Fit by orthogonal decomposition of the stacked design.
 *
 * Rank-deficient designs get the minimum-norm solution and a warning
 * naming the aliased columns.
 *
 * @throws InsufficientData when fewer rows than parameters remain.
 */
FitResult fit(const SeriesMatrix& vts, NetworkTimeline nets, const ModelSpec& spec,
              const FitOptions& options = {});

inline FitResult fit(const SeriesMatrix& vts, const Network& net, const ModelSpec& spec,
                     const FitOptions& options = {}) {
    return fit(vts, NetworkTimeline(&net, 1), spec, options);
}

/// T_eff^{-1} U'U over the retained time rows, missing residuals counted as zero.
Eigen::MatrixXd innovation_cov(const FitResult& fit);

struct InformationCriteria {
    double log_det = 0.0;
    double bic = 0.0;
    double aic = 0.0;
    double loglik = 0.0;
};

/**
 * @brief BIC, AIC and Gaussian log-likelihood from an innovation covariance.
 *
 *     BIC = ln|S| + M ln(T_eff) / T_eff
 *     AIC = ln|S| + 2 M / T_eff
 *
 * @throws std::runtime_error if @p sigma is singular and ridge stabilisation is not allowed.
 */
InformationCriteria information_criteria(const Eigen::MatrixXd& sigma, std::size_t t_eff,
                                         std::size_t n_params, bool allow_ridge = true,
                                         std::vector<std::string>* warnings = nullptr);

inline double bic(const FitResult& f) { return f.bic; }
inline double aic(const FitResult& f) { return f.aic; }
inline double loglik(const FitResult& f) { return f.loglik; }
inline double criterion_value(const FitResult& f, Criterion c) {
    return c == Criterion::bic ? f.bic : f.aic;
}

/**
 * @brief Restricted generalised least squares on complete data.
 *
 *     gamma = {R'(ZZ' (x) S^-1) R}^-1 R'(Z (x) S^-1) vec(X)
 *
 * with X = [x_p .. x_{T-1}] and Z the stacked lags. Built from explicit
 * Kronecker products; meant for small problems and cross-checks.
 */
Eigen::VectorXd gls_restricted_estimate(const SeriesMatrix& vts, const Network& net,
                                        const ModelSpec& spec, const Eigen::MatrixXd& sigma_tilde);

struct NodeAutoregression {
    int order = 0;
    Eigen::VectorXd coefficients;  // lag 1 first
    double sigma = 0.0;
    double criterion = 0.0;
    Eigen::VectorXd forecast;
};

/// Zero-mean AR(p*) per node with p* <= max_p chosen by the criterion (N = 1 form).
std::vector<NodeAutoregression> ar_baseline(const SeriesMatrix& vts, int max_p, Criterion criterion,
                                            int horizon = 1);

}  // namespace gnar
