#include "gnar/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gnar {

std::string to_string(AlphaMode mode) {
    switch (mode) {
        case AlphaMode::global: return "global";
        case AlphaMode::per_node: return "per_node";
        case AlphaMode::per_group: return "per_group";
    }
    return "global";
}

AlphaMode alpha_mode_from_string(const std::string& text) {
    if (text == "global") return AlphaMode::global;
    if (text == "per_node" || text == "individual") return AlphaMode::per_node;
    if (text == "per_group") return AlphaMode::per_group;
    throw std::invalid_argument("unknown alpha mode '" + text + "'");
}

int ModelSpec::max_stage() const {
    return s.empty() ? 0 : *std::max_element(s.begin(), s.end());
}

int ModelSpec::stage_sum() const { return std::accumulate(s.begin(), s.end(), 0); }

std::size_t ModelSpec::n_params(std::size_t n_nodes) const {
    const auto beta = static_cast<std::size_t>(n_covariates * stage_sum());
    const auto lags = static_cast<std::size_t>(p);
    switch (alpha_mode) {
        case AlphaMode::global: return lags + beta;
        case AlphaMode::per_node: return n_nodes * lags + beta;
        case AlphaMode::per_group: return n_groups() * (lags + beta);
    }
    return 0;
}

void ModelSpec::validate(std::size_t n_nodes) const {
    if (p < 1) throw std::invalid_argument("model order p must be >= 1");
    if (static_cast<int>(s.size()) != p)
        throw std::invalid_argument("neighbour stage vector must have exactly p entries");
    if (std::any_of(s.begin(), s.end(), [](int v) { return v < 0; }))
        throw std::invalid_argument("neighbour stages must be non-negative");
    if (n_covariates < 1) throw std::invalid_argument("covariate count must be >= 1");
    if (alpha_mode == AlphaMode::per_group) {
        if (group_labels.empty()) throw std::invalid_argument("per_group model needs groups");
        if (groups.size() != n_nodes)
            throw std::invalid_argument("every node must be assigned a group");
        for (auto g : groups)
            if (g >= group_labels.size()) throw std::invalid_argument("group index out of range");
    }
}

std::string ModelSpec::label() const {
    std::ostringstream os;
    os << "GNAR(" << p << ",[";
    for (std::size_t j = 0; j < s.size(); ++j) os << (j ? "," : "") << s[j];
    os << "])";
    return os.str();
}

ParameterLayout::ParameterLayout(const ModelSpec& spec, std::size_t n_nodes)
    : spec_(spec), n_nodes_(n_nodes) {
    spec_.validate(n_nodes);
    switch (spec_.alpha_mode) {
        case AlphaMode::global: alpha_units_ = 1; break;
        case AlphaMode::per_node: alpha_units_ = n_nodes; break;
        case AlphaMode::per_group: alpha_units_ = spec_.n_groups(); break;
    }
    beta_units_ = spec_.alpha_mode == AlphaMode::per_group ? spec_.n_groups() : 1;
    const auto cov = static_cast<std::size_t>(spec_.n_covariates);
    for (int j = 0; j < spec_.p; ++j) {
        lag_offset_.push_back(size_);
        size_ += alpha_units_ + static_cast<std::size_t>(spec_.s[static_cast<std::size_t>(j)]) *
                                    cov * beta_units_;
    }
}

std::size_t ParameterLayout::alpha_index(int lag, std::size_t unit) const {
    if (lag < 1 || lag > spec_.p || unit >= alpha_units_)
        throw std::out_of_range("alpha index out of range");
    return lag_offset_[static_cast<std::size_t>(lag - 1)] + unit;
}

std::size_t ParameterLayout::beta_index(int lag, int stage, int covariate, std::size_t unit) const {
    if (lag < 1 || lag > spec_.p || stage < 1 || stage > spec_.s[static_cast<std::size_t>(lag - 1)] ||
        covariate < 1 || covariate > spec_.n_covariates || unit >= beta_units_)
        throw std::out_of_range("beta index out of range");
    const auto cov = static_cast<std::size_t>(spec_.n_covariates);
    return lag_offset_[static_cast<std::size_t>(lag - 1)] + alpha_units_ +
           (static_cast<std::size_t>(stage - 1) * cov + static_cast<std::size_t>(covariate - 1)) *
               beta_units_ +
           unit;
}

std::size_t ParameterLayout::alpha_unit_of(NodeId node) const {
    switch (spec_.alpha_mode) {
        case AlphaMode::global: return 0;
        case AlphaMode::per_node: return node;
        case AlphaMode::per_group: return spec_.groups[node];
    }
    return 0;
}

std::size_t ParameterLayout::beta_unit_of(NodeId node) const {
    return spec_.alpha_mode == AlphaMode::per_group ? spec_.groups[node] : 0;
}

std::vector<std::string> ParameterLayout::names() const {
    auto alpha_suffix = [&](std::size_t unit) -> std::string {
        switch (spec_.alpha_mode) {
            case AlphaMode::global: return "";
            case AlphaMode::per_node: return "node" + std::to_string(unit + 1);
            case AlphaMode::per_group: return "\"" + spec_.group_labels[unit] + "\"";
        }
        return "";
    };
    std::vector<std::string> out;
    out.reserve(size_);
    for (int j = 1; j <= spec_.p; ++j) {
        for (std::size_t u = 0; u < alpha_units_; ++u)
            out.push_back("alpha" + std::to_string(j) + alpha_suffix(u));
        for (int r = 1; r <= spec_.s[static_cast<std::size_t>(j - 1)]; ++r) {
            for (int c = 1; c <= spec_.n_covariates; ++c) {
                for (std::size_t u = 0; u < beta_units_; ++u) {
                    std::string name = "beta" + std::to_string(j) + "." + std::to_string(r);
                    if (spec_.n_covariates > 1) name += "." + std::to_string(c);
                    if (spec_.alpha_mode == AlphaMode::per_group) name += alpha_suffix(u);
                    out.push_back(std::move(name));
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd alpha_by_node(const ParameterLayout& layout, const Eigen::VectorXd& gamma) {
    const auto& spec = layout.spec();
    Eigen::MatrixXd alpha(static_cast<Eigen::Index>(layout.n_nodes()), spec.p);
    for (NodeId i = 0; i < layout.n_nodes(); ++i)
        for (int j = 1; j <= spec.p; ++j)
            alpha(static_cast<Eigen::Index>(i), j - 1) =
                gamma(static_cast<Eigen::Index>(layout.alpha_index(j, layout.alpha_unit_of(i))));
    return alpha;
}

namespace {

void check_gamma(const ParameterLayout& layout, const Eigen::VectorXd& gamma) {
    if (static_cast<std::size_t>(gamma.size()) != layout.size())
        throw std::invalid_argument("coefficient vector has " + std::to_string(gamma.size()) +
                                    " entries, model needs " + std::to_string(layout.size()));
}

}  // namespace

StationarityReport stationarity_margin(const ModelSpec& spec, const CoefficientSet& coef,
                                       std::size_t n_nodes) {
    const ParameterLayout layout(spec, n_nodes);
    check_gamma(layout, coef.gamma);
    StationarityReport report;
    report.margins.assign(n_nodes, 0.0);
    for (NodeId i = 0; i < n_nodes; ++i) {
        double margin = 0.0;
        for (int j = 1; j <= spec.p; ++j) {
            margin += std::abs(coef.gamma(static_cast<Eigen::Index>(
                layout.alpha_index(j, layout.alpha_unit_of(i)))));
            for (int r = 1; r <= spec.s[static_cast<std::size_t>(j - 1)]; ++r)
                for (int c = 1; c <= spec.n_covariates; ++c)
                    margin += std::abs(coef.gamma(static_cast<Eigen::Index>(
                        layout.beta_index(j, r, c, layout.beta_unit_of(i)))));
        }
        report.margins[i] = margin;
    }
    report.sufficient_condition_holds =
        std::all_of(report.margins.begin(), report.margins.end(), [](double m) { return m < 1.0; });
    return report;
}

namespace {

void check_covariates(const Network& net, const ModelSpec& spec) {
    if (net.n_covariates() > spec.n_covariates)
        throw std::invalid_argument("network has more edge covariates than the model");
}

// weights[r-1][c-1] = W^(r,c)
std::vector<std::vector<Eigen::MatrixXd>> all_weight_matrices(const Network& net,
                                                              const ModelSpec& spec) {
    std::vector<std::vector<Eigen::MatrixXd>> out;
    const auto n = static_cast<Eigen::Index>(net.n_nodes());
    for (int r = 1; r <= spec.max_stage(); ++r) {
        std::vector<Eigen::MatrixXd> by_cov;
        for (int c = 1; c <= spec.n_covariates; ++c)
            by_cov.push_back(c <= net.n_covariates() ? weight_matrix(net, r, c)
                                                     : Eigen::MatrixXd::Zero(n, n));
        out.push_back(std::move(by_cov));
    }
    return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> to_var_matrices(const Network& net, const ModelSpec& spec,
                                             const Eigen::VectorXd& gamma) {
    check_covariates(net, spec);
    const ParameterLayout layout(spec, net.n_nodes());
    check_gamma(layout, gamma);
    const auto weights = all_weight_matrices(net, spec);
    const auto n = static_cast<Eigen::Index>(net.n_nodes());

    std::vector<Eigen::MatrixXd> phis;
    for (int k = 1; k <= spec.p; ++k) {
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto node = static_cast<NodeId>(i);
            phi(i, i) = gamma(static_cast<Eigen::Index>(layout.alpha_index(k, layout.alpha_unit_of(node))));
            for (int r = 1; r <= spec.s[static_cast<std::size_t>(k - 1)]; ++r) {
                for (int c = 1; c <= spec.n_covariates; ++c) {
                    const double beta = gamma(static_cast<Eigen::Index>(
                        layout.beta_index(k, r, c, layout.beta_unit_of(node))));
                    phi.row(i) += beta * weights[static_cast<std::size_t>(r - 1)]
                                                [static_cast<std::size_t>(c - 1)].row(i);
                }
            }
        }
        phis.push_back(std::move(phi));
    }
    return phis;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& phis) {
    if (phis.empty()) throw std::invalid_argument("companion matrix needs at least one lag");
    const Eigen::Index n = phis.front().rows();
    for (const auto& phi : phis)
        if (phi.rows() != n || phi.cols() != n)
            throw std::invalid_argument("lag matrices must be square and of equal size");
    const auto p = static_cast<Eigen::Index>(phis.size());
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * p, n * p);
    for (Eigen::Index k = 0; k < p; ++k) comp.block(0, k * n, n, n) = phis[static_cast<std::size_t>(k)];
    if (p > 1) comp.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
    return comp;
}

double spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("spectral radius needs a square matrix");
    if (!a.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
    if (a.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver;
    solver.setMaxIterations(10000);
    solver.compute(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue iteration did not converge (ill-conditioned matrix)");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd constraint_matrix(const Network& net, const ModelSpec& spec) {
    check_covariates(net, spec);
    const ParameterLayout layout(spec, net.n_nodes());
    const auto weights = all_weight_matrices(net, spec);
    const auto n = static_cast<Eigen::Index>(net.n_nodes());
    const Eigen::Index block = n * n;

    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(spec.p * block, static_cast<Eigen::Index>(layout.size()));
    // vec of the N x Np matrix [phi_1 ... phi_p]: phi_k(a, b) sits at (k-1)N^2 + b*N + a
    auto row_of = [&](int lag, Eigen::Index a, Eigen::Index b) { return (lag - 1) * block + b * n + a; };

    for (int k = 1; k <= spec.p; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto node = static_cast<NodeId>(i);
            r(row_of(k, i, i), static_cast<Eigen::Index>(layout.alpha_index(k, layout.alpha_unit_of(node)))) = 1.0;
            for (int s = 1; s <= spec.s[static_cast<std::size_t>(k - 1)]; ++s) {
                for (int c = 1; c <= spec.n_covariates; ++c) {
                    const auto col = static_cast<Eigen::Index>(
                        layout.beta_index(k, s, c, layout.beta_unit_of(node)));
                    const auto& w = weights[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(c - 1)];
                    for (Eigen::Index m = 0; m < n; ++m)
                        if (w(i, m) != 0.0) r(row_of(k, i, m), col) = w(i, m);
                }
            }
        }
    }
    return r;
}

}  // namespace gnar
