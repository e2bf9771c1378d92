#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bilap/conditions.hpp"
#include "bilap/graph.hpp"

namespace bilap {

using Json = nlohmann::json;

/// Deterministic run configuration echoed into every output file.
struct RunConfig {
    std::string command;
    std::string graph_path;
    std::string condition_spec;
    int mesh = 16;
    std::string times_spec;
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    std::map<std::string, double> tol_overrides;

    double tol(const std::string& name, double fallback) const;
    Json to_json() const;
};

/// Either a purely combinatorial graph or one with edge lengths, depending
/// on the JSON: all edges carry "length" -> MetricGraph, none -> Graph,
/// a mixture is an error.
using ParsedGraph = std::variant<Graph, MetricGraph>;

ParsedGraph graph_from_json(const Json& j);
ParsedGraph parse_graph_json(const std::string& path);
Json graph_to_json(const Graph& graph);
Json graph_to_json(const MetricGraph& graph);

/// Underlying combinatorial graph regardless of lengths.
const Graph& combinatorial(const ParsedGraph& parsed);
/// Metric graph; requires lengths to be present.
const MetricGraph& metric(const ParsedGraph& parsed);

/// Condition specs: {"preset": name, "params": {...}} or explicit
/// {"yr": {"Y_basis": [...], "R": [...]}} / {"cb": {"C": [...], "B": [...]}}.
/// Complex entries are [re, im] pairs; bare numbers are accepted as reals.
ConditionYR condition_from_json(const Json& j, const MetricGraph& graph);
Json condition_to_json(const ConditionYR& cond);
Json condition_to_json(const ConditionCB& cond);
ConditionCB cb_from_json(const Json& j, int edge_count);

Eigen::MatrixXcd complex_matrix_from_json(const Json& j);
Json complex_matrix_to_json(const Eigen::MatrixXcd& m);

/// Geometric grid "a:b:n" (n points from a to b, log-spaced).
std::vector<double> parse_geometric_grid(const std::string& spec);
/// Linear grid "a:b:n".
std::vector<double> parse_linear_grid(const std::string& spec);

/// Write JSON with the standard envelope (tool version, schema version,
/// config echo); returns the full path.
std::string write_report(const std::string& path, Json body, const RunConfig& config);

/// Write CSV with `# bilap <version>` and `# config <json>` comment lines;
/// numbers printed with %.17g.
std::string write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows,
                      const RunConfig& config);

}  // namespace bilap
