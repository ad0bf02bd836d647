#include "gnar/design.hpp"

#include "gnar/errors.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace gnar {

double neighbour_regressor(std::span<const double> values_at_lag, const WeightMap& weights,
                           int covariate) {
    double norm = 0.0;
    for (const auto& e : weights.entries) {
        if (e.node >= values_at_lag.size())
            throw std::invalid_argument("weight refers to a node outside the value vector");
        if (!is_missing(values_at_lag[e.node])) norm += e.weight;
    }
    if (norm <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& e : weights.entries) {
        if (covariate != 0 && e.covariate != covariate) continue;
        if (!is_missing(values_at_lag[e.node])) sum += (e.weight / norm) * values_at_lag[e.node];
    }
    return sum;
}

DesignProblem build_design(const SeriesMatrix& vts, NetworkTimeline nets, const ModelSpec& spec) {
    if (nets.empty()) throw std::invalid_argument("no network supplied");
    const std::size_t n = vts.n_nodes();
    const std::size_t length = vts.length();
    if (nets.size() != 1 && nets.size() != length)
        throw std::invalid_argument("time-varying network needs one network per time point");
    for (const auto& net : nets) {
        if (net.n_nodes() != n)
            throw std::invalid_argument("series has " + std::to_string(n) + " columns but network has " +
                                        std::to_string(net.n_nodes()) + " nodes");
        if (net.n_covariates() > spec.n_covariates)
            throw std::invalid_argument("network has more edge covariates than the model");
    }
    const ParameterLayout layout(spec, n);
    const auto p = static_cast<std::size_t>(spec.p);
    if (length <= p)
        throw std::invalid_argument("series length " + std::to_string(length) +
                                    " does not exceed model order " + std::to_string(p));

    // One stage table per distinct network.
    std::vector<std::unique_ptr<StageTable>> tables(nets.size());
    auto table_at = [&](std::size_t t) -> const StageTable& {
        const std::size_t k = nets.size() == 1 ? 0 : t;
        if (!tables[k]) tables[k] = std::make_unique<StageTable>(nets[k], spec.max_stage());
        return *tables[k];
    };

    const std::size_t candidates = (length - p) * n;
    DesignProblem problem;
    problem.kept.assign(candidates, false);
    std::vector<Eigen::RowVectorXd> x_rows;
    std::vector<double> y_values;

    for (std::size_t t = p; t < length; ++t) {
        for (NodeId i = 0; i < n; ++i) {
            bool keep = !vts.missing(t, i);
            for (std::size_t j = 1; keep && j <= p; ++j) keep = !vts.missing(t - j, i);
            if (!keep) continue;
            problem.kept[(t - p) * n + i] = true;

            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
            for (int j = 1; j <= spec.p; ++j) {
                const std::size_t lagged = t - static_cast<std::size_t>(j);
                row(static_cast<Eigen::Index>(layout.alpha_index(j, layout.alpha_unit_of(i)))) =
                    vts.values(static_cast<Eigen::Index>(lagged), static_cast<Eigen::Index>(i));
                for (int r = 1; r <= spec.s[static_cast<std::size_t>(j - 1)]; ++r) {
                    const auto members = table_at(t).members(i, r);
                    double norm = 0.0;
                    for (const auto& m : members)
                        if (!vts.missing(lagged, m.node)) norm += 1.0 / m.length;
                    if (norm <= 0.0) continue;
                    for (const auto& m : members) {
                        if (vts.missing(lagged, m.node)) continue;
                        const auto col = static_cast<Eigen::Index>(
                            layout.beta_index(j, r, m.covariate, layout.beta_unit_of(i)));
                        row(col) += (1.0 / m.length) / norm *
                                    vts.values(static_cast<Eigen::Index>(lagged),
                                               static_cast<Eigen::Index>(m.node));
                    }
                }
            }
            x_rows.push_back(std::move(row));
            y_values.push_back(vts.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)));
            problem.rows.push_back({t, i});
        }
    }

    problem.dropped = candidates - problem.rows.size();
    if (problem.rows.empty()) throw InsufficientData("every design row was dropped for missingness");

    const auto rows = static_cast<Eigen::Index>(problem.rows.size());
    problem.y = Eigen::Map<const Eigen::VectorXd>(y_values.data(), rows);
    problem.X.resize(rows, static_cast<Eigen::Index>(layout.size()));
    for (Eigen::Index k = 0; k < rows; ++k) problem.X.row(k) = x_rows[static_cast<std::size_t>(k)];
    return problem;
}

}  // namespace gnar
