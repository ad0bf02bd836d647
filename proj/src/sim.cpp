#include "gnar/sim.hpp"

#include "gnar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gnar {

namespace {

void check_options(const SimulationOptions& options, Eigen::Index p, Eigen::Index n_nodes) {
    if (options.n <= 0) throw std::invalid_argument("simulation length must be positive");
    if (options.burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
    if (options.initial.size() != 0 &&
        (options.initial.rows() != p || options.initial.cols() != n_nodes))
        throw std::invalid_argument("initial state must be p x N");
}

Eigen::VectorXd expand_sigma(const Eigen::VectorXd& sigma, Eigen::Index n_nodes) {
    if (sigma.size() == 1) return Eigen::VectorXd::Constant(n_nodes, sigma(0));
    if (sigma.size() != n_nodes) throw std::invalid_argument("sigma must have one entry per node");
    if ((sigma.array() < 0.0).any() || !sigma.allFinite())
        throw std::invalid_argument("sigma entries must be finite and non-negative");
    return sigma;
}

Eigen::MatrixXd presample(const SimulationOptions& options, Eigen::Index p, Eigen::Index n_nodes,
                          Eigen::Index total) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(p + total, n_nodes);
    if (options.initial.size() != 0) x.topRows(p) = options.initial;
    return x;
}

SeriesMatrix finish(const Eigen::MatrixXd& x, const SimulationOptions& options,
                    std::vector<std::string> names) {
    return {x.bottomRows(options.n), std::move(names)};
}

}  // namespace

SeriesMatrix gnar_simulate(const Network& net, const ModelSpec& spec, const CoefficientSet& coef,
                           const SimulationOptions& options, RngStream& rng,
                           std::vector<std::string>* warnings) {
    const ParameterLayout layout(spec, net.n_nodes());
    if (static_cast<std::size_t>(coef.gamma.size()) != layout.size())
        throw std::invalid_argument("coefficient vector does not match model");
    const auto n = static_cast<Eigen::Index>(net.n_nodes());
    const Eigen::Index p = spec.p;
    check_options(options, p, n);
    const Eigen::VectorXd sigma = expand_sigma(coef.sigma, n);

    if (warnings) {
        const auto report = stationarity_margin(spec, coef, net.n_nodes());
        if (!report.sufficient_condition_holds) {
            double worst = 0.0;
            for (double m : report.margins) worst = std::max(worst, m);
            std::ostringstream os;
            os << "stationarity margin condition fails (max margin " << worst
               << "); the process may be nonstationary";
            warnings->push_back(os.str());
        }
    }

    // Normalised stage weights per node on the full graph.
    const StageTable table(net, spec.max_stage());
    struct Term {
        NodeId node;
        int covariate;
        double weight;
    };
    std::vector<std::vector<std::vector<Term>>> terms(net.n_nodes());
    for (NodeId i = 0; i < net.n_nodes(); ++i) {
        for (int r = 1; r <= spec.max_stage(); ++r) {
            double norm = 0.0;
            for (const auto& m : table.members(i, r)) norm += 1.0 / m.length;
            std::vector<Term> list;
            for (const auto& m : table.members(i, r))
                list.push_back({m.node, m.covariate, (1.0 / m.length) / norm});
            terms[i].push_back(std::move(list));
        }
    }

    const Eigen::Index total = options.burn_in + options.n;
    Eigen::MatrixXd x = presample(options, p, n, total);
    Eigen::VectorXd noise(n);
    for (Eigen::Index t = p; t < p + total; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) noise(i) = rng.normal();
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto node = static_cast<NodeId>(i);
            double value = 0.0;
            for (int j = 1; j <= spec.p; ++j) {
                value += coef.gamma(static_cast<Eigen::Index>(layout.alpha_index(j, layout.alpha_unit_of(node)))) *
                         x(t - j, i);
                for (int r = 1; r <= spec.s[static_cast<std::size_t>(j - 1)]; ++r) {
                    for (const Term& term : terms[node][static_cast<std::size_t>(r - 1)]) {
                        const double beta = coef.gamma(static_cast<Eigen::Index>(
                            layout.beta_index(j, r, term.covariate, layout.beta_unit_of(node))));
                        value += beta * term.weight * x(t - j, static_cast<Eigen::Index>(term.node));
                    }
                }
            }
            x(t, i) = value + sigma(i) * noise(i);
        }
    }
    return finish(x, options, net.node_names());
}

SeriesMatrix var_simulate(const std::vector<Eigen::MatrixXd>& phis, const Eigen::VectorXd& sigma_in,
                          const SimulationOptions& options, RngStream& rng) {
    if (phis.empty()) throw std::invalid_argument("need at least one lag matrix");
    const Eigen::Index n = phis.front().rows();
    const auto p = static_cast<Eigen::Index>(phis.size());
    for (const auto& phi : phis)
        if (phi.rows() != n || phi.cols() != n) throw std::invalid_argument("lag matrix size mismatch");
    check_options(options, p, n);
    const Eigen::VectorXd sigma = expand_sigma(sigma_in, n);

    const Eigen::Index total = options.burn_in + options.n;
    Eigen::MatrixXd x = presample(options, p, n, total);
    Eigen::VectorXd noise(n);
    for (Eigen::Index t = p; t < p + total; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) noise(i) = rng.normal();
        Eigen::VectorXd next = sigma.cwiseProduct(noise);
        for (Eigen::Index k = 1; k <= p; ++k)
            next += phis[static_cast<std::size_t>(k - 1)] * x.row(t - k).transpose();
        x.row(t) = next.transpose();
    }
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(std::to_string(i + 1));
    return finish(x, options, std::move(names));
}

SeriesMatrix simulate_from_fit(const FitResult& fit, const Network& net, long n, RngStream& rng,
                               long burn_in) {
    CoefficientSet coef{fit.gamma, fit.sigma_u_hat.diagonal().cwiseSqrt()};
    SimulationOptions options;
    options.n = n;
    options.burn_in = burn_in;
    return gnar_simulate(net, fit.spec, coef, options, rng);
}

}  // namespace gnar
