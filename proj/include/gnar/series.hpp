#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace gnar {

/// Marker stored in a SeriesMatrix cell with no observation.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// T x N panel of nodal observations; rows are time points, columns nodes.
struct SeriesMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> node_names;

    std::size_t length() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_nodes() const { return static_cast<std::size_t>(values.cols()); }

    bool missing(std::size_t t, std::size_t i) const {
        return is_missing(values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)));
    }
    bool has_missing() const { return values.hasNaN(); }

    /// Observation mask of row @p t.
    std::vector<bool> observed_row(std::size_t t) const {
        std::vector<bool> mask(n_nodes());
        for (std::size_t i = 0; i < n_nodes(); ++i) mask[i] = !missing(t, i);
        return mask;
    }

    /// Rows [first, first + count).
    SeriesMatrix rows(std::size_t first, std::size_t count) const {
        return {values.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)),
                node_names};
    }
};

}  // namespace gnar
