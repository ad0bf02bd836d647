#pragma once

#include "gnar/estimate.hpp"
#include "gnar/model.hpp"
#include "gnar/network.hpp"
#include "gnar/series.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gnar::io {

using nlohmann::json;

/// Shortest text that parses back to the same double (at most 17 significant digits).
std::string format_double(double v);

// Network file: {"n_nodes", "names", "directed", "C", "edges": [{"from", "to", "dist", "cov"}]}
// with one-based node ids.
json network_to_json(const Network& net);
Network network_from_json(const json& j);

struct Adjacency {
    Eigen::MatrixXd matrix;
    std::vector<std::string> names;
};

/// Square numeric CSV whose header row holds the node names.
Adjacency read_adjacency_csv(std::istream& in);
void write_adjacency_csv(std::ostream& out, const Eigen::MatrixXd& matrix,
                         const std::vector<std::string>& names);

/// Header of node names, one row per time point, "NA" for missing values.
SeriesMatrix read_series_csv(std::istream& in);
void write_series_csv(std::ostream& out, const SeriesMatrix& series);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& header);

/// {"p", "s", "C", "alpha_mode", "groups": {node name: label}}
ModelSpec spec_from_json(const json& j, const std::vector<std::string>& node_names);
json spec_to_json(const ModelSpec& spec, const std::vector<std::string>& node_names);

/**
 * @brief Coefficients from {"coefficients": {name: value} | [{"name", "estimate"}], "sigma": x | [..]}.
 *
 * Names follow ParameterLayout::names(). Every coefficient must be present.
 */
CoefficientSet coefficients_from_json(const json& j, const ModelSpec& spec, std::size_t n_nodes);

json fit_to_json(const FitResult& fit, const Network& net);

struct StoredFit {
    ModelSpec spec;
    Network network;
    Eigen::VectorXd gamma;
    Eigen::VectorXd sigma;
};
StoredFit fit_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gnar::io
