#include "gnar/estimate.hpp"

#include "gnar/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gnar {

std::string to_string(Criterion criterion) { return criterion == Criterion::bic ? "bic" : "aic"; }

Criterion criterion_from_string(const std::string& text) {
    if (text == "bic" || text == "BIC") return Criterion::bic;
    if (text == "aic" || text == "AIC") return Criterion::aic;
    throw std::invalid_argument("unknown criterion '" + text + "'");
}

InformationCriteria information_criteria(const Eigen::MatrixXd& sigma, std::size_t t_eff,
                                         std::size_t n_params, bool allow_ridge,
                                         std::vector<std::string>* warnings) {
    if (t_eff == 0) throw std::invalid_argument("effective sample size is zero");
    constexpr double ridge = 1e-10;
    const auto n = sigma.rows();

    auto log_det = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
        return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    };

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    double ld = 0.0;
    if (llt.info() == Eigen::Success && std::isfinite(log_det(llt))) {
        ld = log_det(llt);
    } else {
        if (!allow_ridge) throw std::runtime_error("innovation covariance is singular");
        llt.compute(sigma + ridge * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("innovation covariance is not positive semidefinite");
        ld = log_det(llt);
        if (warnings)
            warnings->push_back("innovation covariance is singular; log-determinant uses Sigma + 1e-10 I");
    }

    const double t = static_cast<double>(t_eff);
    const double m = static_cast<double>(n_params);
    InformationCriteria ic;
    ic.log_det = ld;
    ic.bic = ld + m * std::log(t) / t;
    ic.aic = ld + 2.0 * m / t;
    ic.loglik = -0.5 * t * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + ld +
                            static_cast<double>(n));
    return ic;
}

Eigen::MatrixXd innovation_cov(const FitResult& fit) {
    const Eigen::Index p = fit.spec.p;
    const Eigen::Index rows = fit.residuals.rows() - p;
    Eigen::MatrixXd u = fit.residuals.bottomRows(rows).unaryExpr(
        [](double v) { return is_missing(v) ? 0.0 : v; });
    return (u.transpose() * u) / static_cast<double>(fit.t_eff);
}

FitResult fit(const SeriesMatrix& vts, NetworkTimeline nets, const ModelSpec& spec,
              const FitOptions& options) {
    const DesignProblem problem = build_design(vts, nets, spec);
    const ParameterLayout layout(spec, vts.n_nodes());
    const auto m = static_cast<Eigen::Index>(layout.size());
    const Eigen::Index rows = problem.X.rows();
    if (rows < m) {
        std::ostringstream os;
        os << "insufficient data for order " << spec.label() << ": " << rows << " usable rows, " << m
           << " parameters";
        throw InsufficientData(os.str());
    }

    FitResult result;
    result.spec = spec;
    result.node_names = vts.node_names;
    result.coef_names = layout.names();
    result.n_obs_used = static_cast<std::size_t>(rows);
    result.dropped_rows = problem.dropped;
    result.dof = static_cast<long>(rows - m);

    Eigen::MatrixXd unscaled_cov;  // (X'X)^{-1} or its pseudo-inverse
    if (m == 0) {
        result.gamma = Eigen::VectorXd(0);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.X);
        if (qr.rank() == m) {
            result.gamma = qr.solve(problem.y);
            const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
            const Eigen::MatrixXd r_inv =
                r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
            const auto& perm = qr.colsPermutation();
            unscaled_cov = perm * (r_inv * r_inv.transpose()) * perm.transpose();
        } else {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(problem.X);
            result.gamma = cod.solve(problem.y);
            const Eigen::MatrixXd pinv = cod.pseudoInverse();
            unscaled_cov = pinv * pinv.transpose();
            const auto& perm = qr.colsPermutation().indices();
            for (Eigen::Index k = qr.rank(); k < m; ++k)
                result.aliased_columns.push_back(static_cast<std::size_t>(perm(k)));
            std::sort(result.aliased_columns.begin(), result.aliased_columns.end());
            std::ostringstream os;
            os << "design is rank deficient (rank " << qr.rank() << " of " << m
               << "); minimum-norm solution used; aliased columns:";
            for (auto c : result.aliased_columns) os << ' ' << result.coef_names[c];
            result.warnings.push_back(os.str());
        }
    }

    const Eigen::VectorXd fitted = problem.X * result.gamma;
    const Eigen::VectorXd resid = problem.y - fitted;
    result.rss = resid.squaredNorm();
    if (result.dof > 0) {
        result.residual_variance = result.rss / static_cast<double>(result.dof);
        result.se = (unscaled_cov.diagonal() * result.residual_variance).cwiseSqrt();
    } else {
        result.residual_variance = std::numeric_limits<double>::quiet_NaN();
        result.se = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
        result.warnings.push_back("no residual degrees of freedom; standard errors undefined");
    }

    const auto length = static_cast<Eigen::Index>(vts.length());
    const auto n = static_cast<Eigen::Index>(vts.n_nodes());
    result.fitted = Eigen::MatrixXd::Constant(length, n, kMissing);
    result.residuals = Eigen::MatrixXd::Constant(length, n, kMissing);
    result.effective_sample.assign(vts.n_nodes(), 0);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const auto& idx = problem.rows[static_cast<std::size_t>(k)];
        const auto t = static_cast<Eigen::Index>(idx.t);
        const auto i = static_cast<Eigen::Index>(idx.node);
        result.fitted(t, i) = fitted(k);
        result.residuals(t, i) = resid(k);
        ++result.effective_sample[idx.node];
    }

    result.t_eff = vts.length() - static_cast<std::size_t>(spec.p);
    result.sigma_u_hat = innovation_cov(result);
    const auto ic = information_criteria(result.sigma_u_hat, result.t_eff, layout.size(),
                                         options.allow_ridge, &result.warnings);
    result.bic = ic.bic;
    result.aic = ic.aic;
    result.loglik = ic.loglik;
    return result;
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

Eigen::VectorXd gls_restricted_estimate(const SeriesMatrix& vts, const Network& net,
                                        const ModelSpec& spec, const Eigen::MatrixXd& sigma_tilde) {
    if (vts.has_missing()) throw std::invalid_argument("restricted GLS needs complete data");
    const auto n = static_cast<Eigen::Index>(vts.n_nodes());
    if (static_cast<std::size_t>(n) != net.n_nodes())
        throw std::invalid_argument("series and network node counts differ");
    if (sigma_tilde.rows() != n || sigma_tilde.cols() != n)
        throw std::invalid_argument("sigma_tilde must be N x N");
    const Eigen::Index p = spec.p;
    const auto length = static_cast<Eigen::Index>(vts.length());
    if (length <= p) throw std::invalid_argument("series too short for model order");
    const Eigen::Index cols = length - p;

    // Column t of Z stacks x_{t-1}, ..., x_{t-p}.
    Eigen::MatrixXd x(n, cols), z(n * p, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const Eigen::Index t = c + p;
        x.col(c) = vts.values.row(t).transpose();
        for (Eigen::Index k = 1; k <= p; ++k) z.block((k - 1) * n, c, n, 1) = vts.values.row(t - k).transpose();
    }

    const Eigen::MatrixXd r = constraint_matrix(net, spec);
    Eigen::FullPivLU<Eigen::MatrixXd> sigma_lu(sigma_tilde);
    if (!sigma_lu.isInvertible()) throw std::invalid_argument("sigma_tilde is singular");
    const Eigen::MatrixXd sigma_inv = sigma_lu.inverse();

    const Eigen::Map<const Eigen::VectorXd> vec_x(x.data(), x.size());
    const Eigen::MatrixXd gram = r.transpose() * kron(z * z.transpose(), sigma_inv) * r;
    const Eigen::VectorXd rhs = r.transpose() * (kron(z, sigma_inv) * vec_x);

    Eigen::FullPivLU<Eigen::MatrixXd> gram_lu(gram);
    if (!gram_lu.isInvertible()) throw std::runtime_error("restricted GLS Gram matrix is singular");
    return gram_lu.solve(rhs);
}

std::vector<NodeAutoregression> ar_baseline(const SeriesMatrix& vts, int max_p, Criterion criterion,
                                            int horizon) {
    if (max_p < 0) throw std::invalid_argument("maximum AR order must be non-negative");
    if (horizon < 0) throw std::invalid_argument("forecast horizon must be non-negative");
    std::vector<NodeAutoregression> out;
    for (std::size_t node = 0; node < vts.n_nodes(); ++node) {
        std::vector<double> x;
        bool started = false;
        for (std::size_t t = 0; t < vts.length(); ++t) {
            const double v = vts.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(node));
            if (!started && is_missing(v)) continue;
            started = true;
            x.push_back(v);
        }
        const auto len = static_cast<long>(x.size());
        if (len == 0 || len - max_p < std::max(max_p, 1))
            throw InsufficientData("series '" + vts.node_names[node] +
                                   "' is too short for AR order " + std::to_string(max_p));

        NodeAutoregression best;
        bool have_best = false;
        for (int p = 0; p <= max_p; ++p) {
            std::vector<long> rows;
            for (long t = p; t < len; ++t) {
                bool ok = !is_missing(x[static_cast<std::size_t>(t)]);
                for (int j = 1; ok && j <= p; ++j) ok = !is_missing(x[static_cast<std::size_t>(t - j)]);
                if (ok) rows.push_back(t);
            }
            const auto n_rows = static_cast<Eigen::Index>(rows.size());
            if (n_rows < std::max<Eigen::Index>(p, 1)) continue;
            Eigen::MatrixXd design(n_rows, p);
            Eigen::VectorXd y(n_rows);
            for (Eigen::Index k = 0; k < n_rows; ++k) {
                const long t = rows[static_cast<std::size_t>(k)];
                y(k) = x[static_cast<std::size_t>(t)];
                for (int j = 1; j <= p; ++j) design(k, j - 1) = x[static_cast<std::size_t>(t - j)];
            }
            Eigen::VectorXd coef = p == 0 ? Eigen::VectorXd(0)
                                          : Eigen::VectorXd(design.colPivHouseholderQr().solve(y));
            const double rss = (y - design * coef).squaredNorm();
            const double t_eff = static_cast<double>(n_rows);
            const double var = rss / t_eff;
            const double penalty = criterion == Criterion::bic ? p * std::log(t_eff) / t_eff : 2.0 * p / t_eff;
            const double value = (var > 0.0 ? std::log(var) : -std::numeric_limits<double>::infinity()) + penalty;
            if (!have_best || value < best.criterion) {
                best.order = p;
                best.coefficients = coef;
                best.sigma = std::sqrt(var);
                best.criterion = value;
                have_best = true;
            }
        }
        if (!have_best) throw InsufficientData("no AR order could be fitted for '" + vts.node_names[node] + "'");

        // Iterated forecast from the end of the observed series.
        std::vector<double> path(x.end() - std::min<long>(len, best.order), x.end());
        best.forecast.resize(horizon);
        for (int h = 0; h < horizon; ++h) {
            double v = 0.0;
            for (int j = 1; j <= best.order; ++j) {
                const double lagged = path[path.size() - static_cast<std::size_t>(j)];
                if (is_missing(lagged))
                    throw std::runtime_error("AR forecast needs the last " + std::to_string(best.order) +
                                             " values of '" + vts.node_names[node] + "'");
                v += best.coefficients(j - 1) * lagged;
            }
            best.forecast(h) = v;
            path.push_back(v);
        }
        out.push_back(std::move(best));
    }
    return out;
}

}  // namespace gnar
