#include "gnar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gnar::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(first, last - first + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        if (ch == ',' && !quoted) {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!trim(line).empty()) return true;
    }
    return false;
}

double parse_cell(const std::string& text, std::size_t row, std::size_t col) {
    if (text.empty() || text == "NA" || text == "NaN" || text == "nan") return kMissing;
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("cannot parse '" + text + "' at data row " + std::to_string(row + 1) +
                                    ", column " + std::to_string(col + 1));
    return value;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t width) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (next_line(in, line)) {
        const auto fields = split_csv_line(line);
        if (fields.size() != width)
            throw std::invalid_argument("CSV row " + std::to_string(rows.size() + 1) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(width));
        std::vector<double> row;
        for (std::size_t c = 0; c < width; ++c) row.push_back(parse_cell(fields[c], rows.size(), c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (is_missing(m(r, c))) row.push_back(nullptr);
            else row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
    if (is_missing(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json network_to_json(const Network& net) {
    json edges = json::array();
    for (const auto& e : net.edges())
        edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"dist", e.dist}, {"cov", e.covariate}});
    return {{"n_nodes", net.n_nodes()},
            {"names", net.node_names()},
            {"directed", net.directed()},
            {"C", net.n_covariates()},
            {"edges", std::move(edges)}};
}

Network network_from_json(const json& j) {
    const auto n = j.at("n_nodes").get<std::size_t>();
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    else
        for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i + 1));
    if (names.size() != n) throw std::invalid_argument("network 'names' length differs from n_nodes");
    const bool directed = j.value("directed", false);
    const int c = j.value("C", 1);
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        const auto from = e.at("from").get<long long>();
        const auto to = e.at("to").get<long long>();
        if (from < 1 || to < 1 || static_cast<std::size_t>(from) > n || static_cast<std::size_t>(to) > n)
            throw std::invalid_argument("edge node id outside 1..n_nodes");
        edges.push_back({static_cast<NodeId>(from - 1), static_cast<NodeId>(to - 1), e.value("dist", 1.0),
                         e.value("cov", 1)});
    }
    return Network(std::move(names), std::move(edges), directed, c);
}

Adjacency read_adjacency_csv(std::istream& in) {
    std::string line;
    if (!next_line(in, line)) throw std::invalid_argument("adjacency CSV is empty");
    Adjacency adj;
    adj.names = split_csv_line(line);
    const auto rows = read_rows(in, adj.names.size());
    if (rows.size() != adj.names.size()) throw std::invalid_argument("adjacency CSV is not square");
    const auto n = static_cast<Eigen::Index>(rows.size());
    adj.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (is_missing(v)) throw std::invalid_argument("adjacency CSV has a missing entry");
            adj.matrix(r, c) = v;
        }
    return adj;
}

void write_adjacency_csv(std::ostream& out, const Eigen::MatrixXd& matrix,
                         const std::vector<std::string>& names) {
    write_matrix_csv(out, matrix, names);
}

SeriesMatrix read_series_csv(std::istream& in) {
    std::string line;
    if (!next_line(in, line)) throw std::invalid_argument("series CSV is empty");
    SeriesMatrix series;
    series.node_names = split_csv_line(line);
    const auto rows = read_rows(in, series.node_names.size());
    series.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(series.node_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            series.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return series;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& header) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, const SeriesMatrix& series) {
    write_matrix_csv(out, series.values, series.node_names);
}

ModelSpec spec_from_json(const json& j, const std::vector<std::string>& node_names) {
    ModelSpec spec;
    spec.p = j.at("p").get<int>();
    spec.s = j.at("s").get<std::vector<int>>();
    spec.n_covariates = j.value("C", 1);
    spec.alpha_mode = alpha_mode_from_string(j.value("alpha_mode", std::string("global")));
    if (spec.alpha_mode == AlphaMode::per_group) {
        if (!j.contains("groups")) throw std::invalid_argument("per_group model needs a 'groups' map");
        const auto map = j.at("groups").get<std::map<std::string, std::string>>();
        std::set<std::string> labels;
        for (const auto& [node, label] : map) labels.insert(label);
        spec.group_labels.assign(labels.begin(), labels.end());
        for (const auto& name : node_names) {
            auto it = map.find(name);
            if (it == map.end()) throw std::invalid_argument("node '" + name + "' has no group");
            spec.groups.push_back(static_cast<std::size_t>(
                std::find(spec.group_labels.begin(), spec.group_labels.end(), it->second) -
                spec.group_labels.begin()));
        }
        for (const auto& [node, label] : map)
            if (std::find(node_names.begin(), node_names.end(), node) == node_names.end())
                throw std::invalid_argument("group map names unknown node '" + node + "'");
    }
    spec.validate(node_names.size());
    return spec;
}

json spec_to_json(const ModelSpec& spec, const std::vector<std::string>& node_names) {
    json j{{"p", spec.p}, {"s", spec.s}, {"C", spec.n_covariates}, {"alpha_mode", to_string(spec.alpha_mode)}};
    if (spec.alpha_mode == AlphaMode::per_group) {
        json groups = json::object();
        for (std::size_t i = 0; i < spec.groups.size() && i < node_names.size(); ++i)
            groups[node_names[i]] = spec.group_labels[spec.groups[i]];
        j["groups"] = std::move(groups);
    }
    return j;
}

CoefficientSet coefficients_from_json(const json& j, const ModelSpec& spec, std::size_t n_nodes) {
    const ParameterLayout layout(spec, n_nodes);
    const auto names = layout.names();
    std::map<std::string, double> given;
    const json& coefs = j.at("coefficients");
    if (coefs.is_object()) {
        for (const auto& [name, value] : coefs.items()) given[name] = value.get<double>();
    } else {
        for (const auto& entry : coefs) given[entry.at("name").get<std::string>()] = entry.at("estimate").get<double>();
    }

    CoefficientSet out;
    out.gamma.resize(static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        auto it = given.find(names[k]);
        if (it == given.end()) throw std::invalid_argument("missing coefficient '" + names[k] + "'");
        out.gamma(static_cast<Eigen::Index>(k)) = it->second;
        given.erase(it);
    }
    if (!given.empty()) throw std::invalid_argument("unknown coefficient '" + given.begin()->first + "'");

    const auto n = static_cast<Eigen::Index>(n_nodes);
    if (!j.contains("sigma")) out.sigma = Eigen::VectorXd::Ones(n);
    else if (j.at("sigma").is_number()) out.sigma = Eigen::VectorXd::Constant(n, j.at("sigma").get<double>());
    else {
        const auto s = j.at("sigma").get<std::vector<double>>();
        if (s.size() != n_nodes) throw std::invalid_argument("sigma must have one entry per node");
        out.sigma = Eigen::Map<const Eigen::VectorXd>(s.data(), n);
    }
    return out;
}

json fit_to_json(const FitResult& fit, const Network& net) {
    json coefs = json::array();
    for (Eigen::Index k = 0; k < fit.gamma.size(); ++k) {
        coefs.push_back({{"name", fit.coef_names[static_cast<std::size_t>(k)]},
                         {"estimate", fit.gamma(k)},
                         {"se", number_or_null(fit.se(k))}});
    }
    std::vector<double> sigma;
    for (Eigen::Index i = 0; i < fit.sigma_u_hat.rows(); ++i) sigma.push_back(std::sqrt(fit.sigma_u_hat(i, i)));
    return {{"model", spec_to_json(fit.spec, fit.node_names)},
            {"label", fit.spec.label()},
            {"network", network_to_json(net)},
            {"node_names", fit.node_names},
            {"coefficients", std::move(coefs)},
            {"sigma", sigma},
            {"sigma_u_hat", matrix_to_json(fit.sigma_u_hat)},
            {"bic", fit.bic},
            {"aic", fit.aic},
            {"loglik", fit.loglik},
            {"dof", fit.dof},
            {"residual_variance", number_or_null(fit.residual_variance)},
            {"n_obs_used", fit.n_obs_used},
            {"dropped_row_count", fit.dropped_rows},
            {"t_eff", fit.t_eff},
            {"sample_size_convention", "T_eff = T - p"},
            {"effective_sample_per_node", fit.effective_sample},
            {"warnings", fit.warnings},
            {"fitted", matrix_to_json(fit.fitted)},
            {"residuals", matrix_to_json(fit.residuals)}};
}

StoredFit fit_from_json(const json& j) {
    Network net = network_from_json(j.at("network"));
    const ModelSpec spec = spec_from_json(j.at("model"), net.node_names());
    json coef_json{{"coefficients", j.at("coefficients")}};
    if (j.contains("sigma")) coef_json["sigma"] = j.at("sigma");
    CoefficientSet coef = coefficients_from_json(coef_json, spec, net.n_nodes());
    return {spec, std::move(net), std::move(coef.gamma), std::move(coef.sigma)};
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

}  // namespace gnar::io
