#pragma once

#include "gnar/network.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace gnar {

enum class AlphaMode { global, per_node, per_group };

std::string to_string(AlphaMode mode);
AlphaMode alpha_mode_from_string(const std::string& text);

/**
 * @brief Order and parameterisation of a GNAR(p, [s]) model.
 *
 * For per_group models @c groups assigns each node (by index) a group in
 * 0..G-1 and @c group_labels names the groups. Both alpha and beta
 * coefficients are then estimated per group.
 */
struct ModelSpec {
    int p = 1;
    std::vector<int> s{0};
    int n_covariates = 1;
    AlphaMode alpha_mode = AlphaMode::global;
    std::vector<std::size_t> groups;
    std::vector<std::string> group_labels;

    int max_stage() const;
    int stage_sum() const;
    std::size_t n_groups() const { return alpha_mode == AlphaMode::per_group ? group_labels.size() : 1; }

    /// Number of free parameters M for a network of @p n_nodes nodes.
    std::size_t n_params(std::size_t n_nodes) const;

    /// @throws std::invalid_argument when the spec is inconsistent or does not fit @p n_nodes.
    void validate(std::size_t n_nodes) const;

    /// Short display form, e.g. "GNAR(2,[2,0])".
    std::string label() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/**
 * @brief Index map between model coefficients and the flat parameter vector.
 *
 * Order is lag-major. Within a lag the alpha block comes first (one entry
 * per alpha unit: 1 for global, N for per_node, G for per_group), then
 * beta entries ordered by stage, covariate, group.
 */
class ParameterLayout {
public:
    ParameterLayout(const ModelSpec& spec, std::size_t n_nodes);

    std::size_t size() const { return size_; }
    std::size_t alpha_units() const { return alpha_units_; }
    std::size_t beta_units() const { return beta_units_; }

    std::size_t alpha_index(int lag, std::size_t unit) const;
    std::size_t beta_index(int lag, int stage, int covariate, std::size_t unit) const;

    /// Alpha unit of a node (0 for global, the node itself for per_node, its group otherwise).
    std::size_t alpha_unit_of(NodeId node) const;
    /// Beta unit of a node (its group for per_group models, else 0).
    std::size_t beta_unit_of(NodeId node) const;

    /// Coefficient names in display order: alpha1, beta1.1, alpha1node3, beta1.2"north", ...
    std::vector<std::string> names() const;

    const ModelSpec& spec() const { return spec_; }
    std::size_t n_nodes() const { return n_nodes_; }

private:
    ModelSpec spec_;
    std::size_t n_nodes_;
    std::size_t alpha_units_;
    std::size_t beta_units_;
    std::vector<std::size_t> lag_offset_;
    std::size_t size_ = 0;
};

/// Coefficients in ParameterLayout order plus per-node innovation standard deviations.
struct CoefficientSet {
    Eigen::VectorXd gamma;
    Eigen::VectorXd sigma;
};

/// Expand a coefficient set into per-node alpha values alpha(node, lag-1).
Eigen::MatrixXd alpha_by_node(const ParameterLayout& layout, const Eigen::VectorXd& gamma);

struct StationarityReport {
    std::vector<double> margins;
    /// All margins below one. Sufficient for stationarity, not necessary.
    bool sufficient_condition_holds = false;
};

/// Per-node sum of absolute alpha and beta coefficients over all lags and stages.
StationarityReport stationarity_margin(const ModelSpec& spec, const CoefficientSet& coef,
                                       std::size_t n_nodes);

/// phi_k = diag(alpha_{.,k}) + sum_c sum_{r<=s_k} beta_{k,r,c} W^(r,c), for k = 1..p.
std::vector<Eigen::MatrixXd> to_var_matrices(const Network& net, const ModelSpec& spec,
                                             const Eigen::VectorXd& gamma);

/// Companion matrix with [phi_1 ... phi_p] on top and identity blocks below the diagonal.
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& phis);

/**
 * @brief Largest eigenvalue modulus.
 * @throws std::runtime_error if the eigenvalue iteration does not converge.
 */
double spectral_radius(const Eigen::MatrixXd& a);

/**
 * @brief Constraint matrix R with vec([phi_1 ... phi_p]) = R * gamma.
 *
 * Rows follow column-major vec of the N x Np block matrix; columns follow
 * ParameterLayout.
 */
Eigen::MatrixXd constraint_matrix(const Network& net, const ModelSpec& spec);

}  // namespace gnar
