#include "bilap/io.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bilap/errors.hpp"
#include "bilap/numerics.hpp"
#include "bilap/version.hpp"

namespace bilap {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Complex complex_from_json(const Json& j, const char* where) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ValidationError("SchemaError",
                          std::string(where) + ": complex entries are numbers or [re, im]");
}

}  // namespace

double RunConfig::tol(const std::string& name, double fallback) const {
    auto it = tol_overrides.find(name);
    return it == tol_overrides.end() ? fallback : it->second;
}

Json RunConfig::to_json() const {
    Json j;
    j["command"] = command;
    if (!graph_path.empty()) j["graph"] = graph_path;
    if (!condition_spec.empty()) j["condition"] = condition_spec;
    j["mesh"] = mesh;
    if (!times_spec.empty()) j["times"] = times_spec;
    j["seed"] = seed;
    j["out"] = out_dir;
    if (!tol_overrides.empty()) j["tol"] = tol_overrides;
    return j;
}

ParsedGraph graph_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw ValidationError("SchemaError",
                              "graph JSON needs \"vertices\" and \"edges\" fields");
    if (!j["vertices"].is_number_integer())
        throw ValidationError("SchemaError", "\"vertices\" must be an integer");
    const int vertices = j["vertices"].get<int>();
    if (!j["edges"].is_array())
        throw ValidationError("SchemaError", "\"edges\" must be an array");

    std::vector<Edge> edges;
    std::vector<double> lengths;
    int with_length = 0;
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
        const Json& je = j["edges"][i];
        if (!je.is_object() || !je.contains("source") || !je.contains("target"))
            throw ValidationError("SchemaError", "edge " + std::to_string(i) +
                                                     " needs \"source\" and \"target\"");
        edges.push_back({je["source"].get<int>(), je["target"].get<int>()});
        if (je.contains("length")) {
            ++with_length;
            lengths.push_back(je["length"].get<double>());
        }
    }
    if (with_length != 0 && with_length != static_cast<int>(edges.size()))
        throw ValidationError("MixedLengths",
                              "either all edges carry a length or none does");
    if (with_length == 0) return Graph(vertices, std::move(edges));
    return MetricGraph(Graph(vertices, std::move(edges)), std::move(lengths));
}

ParsedGraph parse_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("SchemaError", "cannot open graph file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& err) {
        throw ValidationError("SchemaError", path + ": " + err.what());
    }
    return graph_from_json(j);
}

Json graph_to_json(const Graph& graph) {
    Json j;
    j["vertices"] = graph.vertex_count();
    j["edges"] = Json::array();
    for (const Edge& e : graph.edges())
        j["edges"].push_back({{"source", e.source}, {"target", e.target}});
    return j;
}

Json graph_to_json(const MetricGraph& graph) {
    Json j = graph_to_json(graph.graph());
    for (int e = 0; e < graph.edge_count(); ++e)
        j["edges"][e]["length"] = graph.length(e);
    return j;
}

const Graph& combinatorial(const ParsedGraph& parsed) {
    if (std::holds_alternative<Graph>(parsed)) return std::get<Graph>(parsed);
    return std::get<MetricGraph>(parsed).graph();
}

const MetricGraph& metric(const ParsedGraph& parsed) {
    if (!std::holds_alternative<MetricGraph>(parsed))
        throw ValidationError("SchemaError",
                              "this operation needs edge lengths in the graph JSON");
    return std::get<MetricGraph>(parsed);
}

Eigen::MatrixXcd complex_matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ValidationError("SchemaError", "matrix must be an array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw ValidationError("SchemaError", "matrix rows have unequal lengths");
        for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c], "matrix");
    }
    return m;
}

Json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

ConditionCB cb_from_json(const Json& j, int edge_count) {
    if (!j.is_object() || !j.contains("C") || !j.contains("B"))
        throw ValidationError("SchemaError", "cb spec needs \"C\" and \"B\" matrices");
    ConditionCB cb;
    cb.layout = TraceLayout{edge_count};
    cb.c = complex_matrix_from_json(j["C"]);
    cb.b = complex_matrix_from_json(j["B"]);
    return cb;
}

ConditionYR condition_from_json(const Json& j, const MetricGraph& graph) {
    if (j.contains("preset")) {
        const std::string name = j["preset"].get<std::string>();
        auto preset = preset_from_name(name);
        if (!preset)
            throw ValidationError("SchemaError", "unknown preset \"" + name + "\"");
        KiikParams params;
        if (j.contains("params")) {
            const Json& p = j["params"];
            if (p.contains("alpha")) params.alpha = p["alpha"].get<double>();
            if (p.contains("beta")) params.beta = p["beta"].get<double>();
            if (p.contains("gamma")) params.gamma = p["gamma"].get<double>();
            if (p.contains("outer")) {
                const std::string outer = p["outer"].get<std::string>();
                if (outer == "clamped")
                    params.outer = OuterKind::clamped;
                else if (outer == "hinged")
                    params.outer = OuterKind::hinged;
                else if (outer == "sliding")
                    params.outer = OuterKind::sliding;
                else
                    throw ValidationError("SchemaError",
                                          "outer must be clamped, hinged or sliding");
            }
        }
        return preset_conditions(graph, *preset, params);
    }
    if (j.contains("yr")) {
        const Json& spec = j["yr"];
        if (!spec.contains("Y_basis") || !spec.contains("R"))
            throw ValidationError("SchemaError", "yr spec needs \"Y_basis\" and \"R\"");
        return ConditionYR(TraceLayout{graph.edge_count()},
                           complex_matrix_from_json(spec["Y_basis"]),
                           complex_matrix_from_json(spec["R"]));
    }
    if (j.contains("cb")) return cb_to_yr(cb_from_json(j["cb"], graph.edge_count()));
    throw ValidationError("SchemaError",
                          "condition spec needs \"preset\", \"yr\" or \"cb\"");
}

Json condition_to_json(const ConditionYR& cond) {
    Json j;
    j["name"] = cond.name();
    j["yr"] = {{"Y_basis", complex_matrix_to_json(cond.y_basis())},
               {"R", complex_matrix_to_json(cond.r())}};
    j["dim_Y"] = cond.dim_y();
    j["self_adjoint"] = cond.is_self_adjoint();
    return j;
}

Json condition_to_json(const ConditionCB& cond) {
    Json j;
    j["name"] = cond.name;
    j["cb"] = {{"C", complex_matrix_to_json(cond.c)},
               {"B", complex_matrix_to_json(cond.b)}};
    return j;
}

namespace {

std::array<double, 3> parse_grid_spec(const std::string& spec) {
    double a = 0, b = 0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3)
        throw ValidationError("SchemaError", "grid spec must be a:b:n, got " + spec);
    if (n < 1) throw ValidationError("SchemaError", "grid needs at least one point");
    return {a, b, static_cast<double>(n)};
}

}  // namespace

std::vector<double> parse_geometric_grid(const std::string& spec) {
    const auto [a, b, nd] = parse_grid_spec(spec);
    const int n = static_cast<int>(nd);
    if (!(a > 0.0) || !(b >= a))
        throw ValidationError("SchemaError", "geometric grid needs 0 < a <= b");
    std::vector<double> grid;
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i)
        grid.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    return grid;
}

std::vector<double> parse_linear_grid(const std::string& spec) {
    const auto [a, b, nd] = parse_grid_spec(spec);
    const int n = static_cast<int>(nd);
    std::vector<double> grid;
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i)
        grid.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
    return grid;
}

std::string write_report(const std::string& path, Json body, const RunConfig& config) {
    Json j;
    j["tool"] = std::string("bilap ") + kVersion;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config.to_json();
    j["report"] = std::move(body);
    std::filesystem::create_directories(
        std::filesystem::path(path).parent_path().empty()
            ? "."
            : std::filesystem::path(path).parent_path().string());
    std::ofstream out(path);
    if (!out) throw ValidationError("SchemaError", "cannot write " + path);
    out << j.dump(2) << "\n";
    return path;
}

std::string write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows,
                      const RunConfig& config) {
    std::filesystem::create_directories(
        std::filesystem::path(path).parent_path().empty()
            ? "."
            : std::filesystem::path(path).parent_path().string());
    std::ofstream out(path);
    if (!out) throw ValidationError("SchemaError", "cannot write " + path);
    out << "# bilap " << kVersion << " schema " << kSchemaVersion << "\n";
    out << "# config " << config.to_json().dump() << "\n";
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
    return path;
}

}  // namespace bilap
