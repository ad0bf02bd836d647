#include "gnar/forecast.hpp"

#include "gnar/errors.hpp"

#include <stdexcept>
#include <string>

namespace gnar {

Eigen::MatrixXd predict(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& gamma,
                        const SeriesMatrix& history, int horizon) {
    if (horizon <= 0) throw std::invalid_argument("forecast horizon must be positive");
    const ParameterLayout layout(spec, net.n_nodes());
    if (static_cast<std::size_t>(gamma.size()) != layout.size())
        throw std::invalid_argument("coefficient vector does not match model");
    if (history.n_nodes() != net.n_nodes())
        throw std::invalid_argument("history and network node counts differ");
    const Eigen::Index p = spec.p;
    if (static_cast<Eigen::Index>(history.length()) < p)
        throw InsufficientData("forecast needs at least " + std::to_string(p) + " history rows");

    const auto n = static_cast<Eigen::Index>(net.n_nodes());
    Eigen::MatrixXd x(p + horizon, n);
    x.topRows(p) = history.values.bottomRows(p);

    const StageTable table(net, spec.max_stage());
    for (Eigen::Index t = p; t < p + horizon; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto node = static_cast<NodeId>(i);
            double value = 0.0;
            for (int j = 1; j <= spec.p; ++j) {
                const Eigen::Index lagged = t - j;
                if (is_missing(x(lagged, i)))
                    throw std::invalid_argument("own lag " + std::to_string(j) + " of node '" +
                                                net.node_names()[node] + "' is missing in the history");
                value += gamma(static_cast<Eigen::Index>(layout.alpha_index(j, layout.alpha_unit_of(node)))) *
                         x(lagged, i);
                for (int r = 1; r <= spec.s[static_cast<std::size_t>(j - 1)]; ++r) {
                    const auto members = table.members(node, r);
                    double norm = 0.0;
                    for (const auto& m : members)
                        if (!is_missing(x(lagged, static_cast<Eigen::Index>(m.node)))) norm += 1.0 / m.length;
                    if (norm <= 0.0) continue;
                    for (const auto& m : members) {
                        const double v = x(lagged, static_cast<Eigen::Index>(m.node));
                        if (is_missing(v)) continue;
                        const double beta = gamma(static_cast<Eigen::Index>(
                            layout.beta_index(j, r, m.covariate, layout.beta_unit_of(node))));
                        value += beta * ((1.0 / m.length) / norm) * v;
                    }
                }
            }
            x(t, i) = value;
        }
    }
    return x.bottomRows(horizon);
}

double prediction_error(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size())
        throw std::invalid_argument("prediction and actual vectors differ in length");
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (is_missing(actual[i])) continue;
        const double d = actual[i] - predicted[i];
        sum += d * d;
        ++used;
    }
    if (used == 0) throw std::invalid_argument("every actual value is missing");
    return sum;
}

}  // namespace gnar
