#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bilap/battery.hpp"
#include "bilap/classify.hpp"
#include "bilap/errors.hpp"
#include "bilap/fem.hpp"
#include "bilap/io.hpp"
#include "bilap/operators.hpp"
#include "bilap/version.hpp"

namespace {

using namespace bilap;

struct Options {
    RunConfig config;
    std::string graph_path;
    std::string preset;
    std::string yr_path;
    std::string cb_path;
    double alpha = M_PI / 2, beta = M_PI / 2, gamma = M_PI / 2;
    std::string outer = "clamped";
    std::string f0_spec = "const:1";
    std::string p_grid = "2.25:8:24";
    int trials = 64;
    double t_snapshot = 0.1;
    int modes = 8;
    std::string to_form = "cb";
    std::string kind = "path";
    int n = 3;
    double length = 1.0;
    std::string file;
    std::vector<std::string> tol_entries;
};

void add_common(CLI::App* cmd, Options& opt, bool needs_graph) {
    auto* g = cmd->add_option("--graph", opt.graph_path, "graph JSON file");
    if (needs_graph) g->required();
    cmd->add_option("--mesh", opt.config.mesh, "elements per edge")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--times", opt.config.times_spec, "geometric time grid a:b:n");
    cmd->add_option("--seed", opt.config.seed, "deterministic seed");
    cmd->add_option("--out", opt.config.out_dir, "output directory");
    cmd->add_option("--tol", opt.tol_entries, "tolerance override NAME=VALUE")
        ->take_all();
}

void add_condition_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--preset", opt.preset,
                    "condition preset (sliding_kirchhoff, cont_deriv, cont_free, "
                    "friedrichs, krein, kiik, hinged, clamped, free)");
    cmd->add_option("--yr", opt.yr_path, "condition JSON file in (Y,R) form");
    cmd->add_option("--cb", opt.cb_path, "condition JSON file in (C,B) form");
    cmd->add_option("--alpha", opt.alpha, "kiik angle alpha");
    cmd->add_option("--beta", opt.beta, "kiik angle beta");
    cmd->add_option("--gamma", opt.gamma, "kiik angle gamma");
    cmd->add_option("--outer", opt.outer, "kiik outer kind (clamped|hinged|sliding)");
}

void finish_config(Options& opt, const std::string& command) {
    opt.config.command = command;
    opt.config.graph_path = opt.graph_path;
    if (!opt.preset.empty())
        opt.config.condition_spec = opt.preset;
    else if (!opt.yr_path.empty())
        opt.config.condition_spec = opt.yr_path;
    else if (!opt.cb_path.empty())
        opt.config.condition_spec = opt.cb_path;
    for (const std::string& entry : opt.tol_entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw ValidationError("SchemaError", "--tol expects NAME=VALUE");
        opt.config.tol_overrides[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    }
}

Json condition_spec_json(const Options& opt) {
    if (!opt.preset.empty()) {
        Json j;
        j["preset"] = opt.preset;
        if (opt.preset == "kiik")
            j["params"] = {{"alpha", opt.alpha},
                           {"beta", opt.beta},
                           {"gamma", opt.gamma},
                           {"outer", opt.outer}};
        return j;
    }
    const std::string path = !opt.yr_path.empty() ? opt.yr_path : opt.cb_path;
    if (path.empty())
        throw ValidationError("SchemaError",
                              "a condition is required: --preset, --yr or --cb");
    std::ifstream in(path);
    if (!in) throw ValidationError("SchemaError", "cannot open condition file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& err) {
        throw ValidationError("SchemaError", path + ": " + err.what());
    }
    if (!opt.yr_path.empty() && !j.contains("yr") && !j.contains("preset"))
        j = Json{{"yr", j}};
    if (!opt.cb_path.empty() && !j.contains("cb") && !j.contains("preset"))
        j = Json{{"cb", j}};
    return j;
}

std::vector<double> time_grid(const Options& opt, const std::string& fallback) {
    return parse_geometric_grid(opt.config.times_spec.empty() ? fallback
                                                              : opt.config.times_spec);
}

Eigen::VectorXd parse_discrete_f0(const std::string& spec, int vertices) {
    if (spec.rfind("indicator:", 0) == 0) {
        const int v = std::stoi(spec.substr(10));
        if (v < 0 || v >= vertices)
            throw ValidationError("IndexOutOfRange", "indicator vertex out of range");
        Eigen::VectorXd f = Eigen::VectorXd::Zero(vertices);
        f(v) = 1.0;
        return f;
    }
    std::string body = spec;
    if (body.rfind("values:", 0) == 0) body = body.substr(7);
    std::vector<double> entries;
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t next = body.find(',', pos);
        if (next == std::string::npos) next = body.size();
        entries.push_back(std::stod(body.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (static_cast<int>(entries.size()) != vertices)
        throw ValidationError("SchemaError",
                              "--f0 needs one value per vertex (" +
                                  std::to_string(vertices) + ")");
    return Eigen::Map<Eigen::VectorXd>(entries.data(), entries.size());
}

EdgeFunction parse_metric_f0(const std::string& spec, const MetricGraph& graph) {
    if (spec.rfind("const:", 0) == 0) {
        const double c = std::stod(spec.substr(6));
        return [c](int, double) { return c; };
    }
    if (spec.rfind("cospi:", 0) == 0) {
        const double k = std::stod(spec.substr(6));
        std::vector<double> lengths = graph.lengths();
        return [k, lengths](int e, double x) {
            return std::cos(k * M_PI * x / lengths[e]);
        };
    }
    if (spec.rfind("bump:", 0) == 0) {
        double edge = 0, x0 = 0.5, width = 0.1;
        if (std::sscanf(spec.c_str(), "bump:%lf:%lf:%lf", &edge, &x0, &width) != 3)
            throw ValidationError("SchemaError", "--f0 bump spec is bump:edge:x0:width");
        const int e0 = static_cast<int>(edge);
        return [e0, x0, width](int e, double x) {
            if (e != e0) return 0.0;
            const double d = (x - x0) / width;
            return std::exp(-d * d);
        };
    }
    throw ValidationError("SchemaError", "unknown --f0 spec " + spec);
}

ConditionYR load_condition(const Options& opt, const MetricGraph& graph) {
    return condition_from_json(condition_spec_json(opt), graph);
}

std::string out_path(const Options& opt, const std::string& name) {
    return opt.config.out_dir + "/" + name;
}

// ---- command bodies -------------------------------------------------------

int cmd_discrete_check(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const Graph& g = combinatorial(parsed);
    const std::vector<double> grid = time_grid(opt, "1e-5:10:25");
    const MarkovReport report = markov_character(g, grid);
    const SymmetricOperator op = bilaplacian(g);

    Json j;
    j["is_complete"] = report.is_complete;
    j["positive_all_t"] = report.positive_all_t;
    j["linf_contractive"] = report.linf_contractive;
    j["consistent"] = report.consistent;
    j["min_entry"] = report.min_entry;
    j["max_row_sup"] = report.max_row_sup;
    j["row_condition"] = linf_generator_row_condition(op.matrix());
    j["bilaplacian"] = Json::array();
    for (int r = 0; r < op.size(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < op.size(); ++c) row.push_back(op.matrix()(r, c));
        j["bilaplacian"].push_back(row);
    }
    const Eigen::MatrixXd snapshot = op.semigroup(opt.t_snapshot);
    j["semigroup_t"] = opt.t_snapshot;
    j["semigroup"] = Json::array();
    for (int r = 0; r < op.size(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < op.size(); ++c) row.push_back(snapshot(r, c));
        j["semigroup"].push_back(row);
    }
    write_report(out_path(opt, "discrete_check.json"), j, opt.config);

    std::vector<std::vector<double>> rows;
    for (double t : grid) {
        const Eigen::MatrixXd s = op.semigroup(t);
        rows.push_back({t, s.minCoeff(), s.cwiseAbs().rowwise().sum().maxCoeff()});
    }
    write_csv(out_path(opt, "discrete_check.csv"), "t,min_entry,row_sup_norm", rows,
              opt.config);

    std::printf("complete=%s positive=%s linf_contractive=%s (min entry %.6g)\n",
                report.is_complete ? "yes" : "no", report.positive_all_t ? "yes" : "no",
                report.linf_contractive ? "yes" : "no", report.min_entry);
    if (!report.consistent) {
        std::printf("warning: flags disagree with the completeness characterization\n");
        return 3;
    }
    return 0;
}

int cmd_discrete_evolve(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const Graph& g = combinatorial(parsed);
    const Eigen::VectorXd f0 = parse_discrete_f0(opt.f0_spec, g.vertex_count());
    const std::vector<double> grid = time_grid(opt, "1e-4:10:60");
    const SymmetricOperator op = bilaplacian(g);

    std::vector<std::vector<double>> rows, min_rows;
    for (double t : grid) {
        const Eigen::VectorXd u = op.apply_semigroup(t, f0);
        for (int v = 0; v < g.vertex_count(); ++v)
            rows.push_back({t, static_cast<double>(v), u(v)});
        min_rows.push_back({t, u.minCoeff()});
    }
    write_csv(out_path(opt, "discrete_evolve.csv"), "t,vertex,value", rows, opt.config);
    write_csv(out_path(opt, "discrete_transition.csv"), "t,min_value", min_rows,
              opt.config);

    Json j;
    j["f0"] = std::vector<double>(f0.data(), f0.data() + f0.size());
    j["lambda2"] = op.eigenvalues()(1);
    if (f0.minCoeff() >= 0.0 && f0.maxCoeff() > 0.0) {
        const TransitionScan scan =
            discrete_transition_time(g, f0, opt.config.tol("positivity", 1e-10));
        j["t_star"] = scan.t_star;
        j["certified"] = scan.certified;
        std::printf("transition time t* = %.6g\n", scan.t_star);
    }
    write_report(out_path(opt, "discrete_evolve.json"), j, opt.config);
    return 0;
}

int cmd_discrete_scan(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const Graph& g = combinatorial(parsed);
    const std::vector<double> grid = parse_linear_grid(opt.p_grid);
    const ScanResult result = lp_dissipativity_scan(g, grid, opt.trials, opt.config.seed);

    Json j;
    j["witness_found"] = result.witness_found;
    if (result.witness_found) {
        j["p"] = result.p;
        j["kappa"] = result.kappa;
        j["witness"] = std::vector<double>(result.witness.data(),
                                           result.witness.data() + result.witness.size());
        std::printf("dissipativity counterexample at p = %.6g (kappa = %.6g)\n", result.p,
                    result.kappa);
    } else {
        j["note"] = "no counterexample found (this is not a contractivity proof)";
        std::printf("no counterexample found on the given grid\n");
    }
    write_report(out_path(opt, "discrete_scan.json"), j, opt.config);
    return 0;
}

int cmd_discrete_gap(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const Graph& g = combinatorial(parsed);
    const GapReport report = spectral_gap_bounds_check(g);
    Json j;
    j["lambda2"] = report.lambda2;
    j["lower"] = report.lower;
    j["upper"] = report.upper;
    j["within"] = report.within;
    j["spectral_mapping_error"] = report.spectral_mapping_error;
    write_report(out_path(opt, "discrete_gap.json"), j, opt.config);
    std::printf("lambda2 = %.10g in [%.10g, %.10g]: %s\n", report.lambda2, report.lower,
                report.upper, report.within ? "yes" : "NO");
    return report.within ? 0 : 3;
}

ReducedSystem assemble_from(const Options& opt, const MetricGraph& graph) {
    const ConditionYR cond = load_condition(opt, graph);
    return assemble(graph, Mesh::uniform(graph, opt.config.mesh), cond);
}

int cmd_metric_spectrum(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ReducedSystem sys = assemble_from(opt, g);
    const int k = std::min(opt.modes, sys.reduced_dim());
    const EigenDecomposition dec = eigensolve(sys, k);

    std::vector<std::vector<double>> rows;
    for (int i = 0; i < k; ++i)
        rows.push_back({static_cast<double>(i + 1), dec.values(i)});
    write_csv(out_path(opt, "spectrum.csv"), "index,eigenvalue", rows, opt.config);

    Json j;
    j["condition"] = sys.condition_name();
    j["reduced_dim"] = sys.reduced_dim();
    j["eigenvalues"] = std::vector<double>(dec.values.data(), dec.values.data() + k);
    write_report(out_path(opt, "spectrum.json"), j, opt.config);
    for (int i = 0; i < k; ++i) std::printf("lambda_%d = %.10g\n", i + 1, dec.values(i));
    return 0;
}

int cmd_metric_kernel(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ReducedSystem sys = assemble_from(opt, g);
    const int dim = kernel_dimension(sys);
    const int head = std::min(8, sys.reduced_dim());
    const EigenDecomposition dec = eigensolve(sys, head);

    Json j;
    j["condition"] = sys.condition_name();
    j["kernel_dimension"] = dim;
    j["lowest_eigenvalues"] =
        std::vector<double>(dec.values.data(), dec.values.data() + head);
    write_report(out_path(opt, "kernel.json"), j, opt.config);
    std::printf("kernel dimension %d\n", dim);
    return 0;
}

int cmd_metric_evolve(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ReducedSystem sys = assemble_from(opt, g);
    const EdgeFunction f0 = parse_metric_f0(opt.f0_spec, g);
    const std::vector<double> grid = time_grid(opt, "1e-4:10:40");
    const Trajectory traj = evolve(sys, f0, grid);

    std::vector<std::vector<double>> node_rows, value_rows, min_rows;
    for (std::size_t n = 0; n < traj.nodes.size(); ++n)
        node_rows.push_back({static_cast<double>(n),
                             static_cast<double>(traj.nodes[n].first),
                             traj.nodes[n].second});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        for (std::size_t n = 0; n < traj.nodes.size(); ++n)
            value_rows.push_back({traj.times[i], static_cast<double>(n),
                                  traj.values(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(n))});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        min_rows.push_back({traj.times[i], traj.min_values[i], traj.distance_to_mean[i]});

    write_csv(out_path(opt, "nodes.csv"), "node,edge,x", node_rows, opt.config);
    write_csv(out_path(opt, "trajectory.csv"), "t,node,value", value_rows, opt.config);
    write_csv(out_path(opt, "trajectory_summary.csv"), "t,min_value,distance_to_mean",
              min_rows, opt.config);

    Json j;
    j["condition"] = sys.condition_name();
    j["mean"] = traj.mean;
    write_report(out_path(opt, "evolve.json"), j, opt.config);
    std::printf("evolved %zu time samples; mass-weighted mean %.6g\n", traj.times.size(),
                traj.mean);
    return 0;
}

int cmd_metric_classify(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const double tol = opt.config.tol("sign", 1e-6);

    Classification result;
    int mesh_used = opt.config.mesh;
    try {
        result = classify(assemble_from(opt, g), tol);
    } catch (const NumericalError& err) {
        if (err.kind() != "AmbiguousSign") throw;
        // one refinement retry on an ambiguous ground-vector sign
        Options refined = opt;
        refined.config.mesh = opt.config.mesh * 2;
        mesh_used = refined.config.mesh;
        result = classify(assemble_from(refined, g), tol);
    }

    Json j;
    j["verdict"] = verdict_name(result.verdict);
    j["kernel_dimension"] = result.kernel_dimension;
    j["lowest_eigenvalue"] = result.lowest_eigenvalue;
    j["ground_min"] = result.ground_min;
    j["ground_max"] = result.ground_max;
    j["ground_constant"] = result.ground_constant;
    j["projector_witness_found"] = result.projector_witness_found;
    j["projector_min"] = result.projector_min;
    j["mesh"] = mesh_used;
    write_report(out_path(opt, "classification.json"), j, opt.config);
    std::printf("verdict: %s (kernel dimension %d)\n", verdict_name(result.verdict),
                result.kernel_dimension);
    return 0;
}

int cmd_metric_ultra(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ReducedSystem sys = assemble_from(opt, g);
    const std::vector<double> grid = time_grid(opt, "1e-4:1e-2:9");

    std::vector<std::vector<double>> rows;
    std::vector<double> logt, logb;
    for (double t : grid) {
        const double bound = kernel_sup_bound(sys, t);
        rows.push_back({t, bound});
        logt.push_back(std::log(t));
        logb.push_back(std::log(bound));
    }
    const double slope = fit_line(logt, logb).slope;
    write_csv(out_path(opt, "ultra.csv"), "t,sup_bound", rows, opt.config);

    Json j;
    j["condition"] = sys.condition_name();
    j["slope"] = slope;
    write_report(out_path(opt, "ultra.json"), j, opt.config);
    std::printf("log-log kernel bound slope %.6g\n", slope);
    return 0;
}

int cmd_conditions_verify(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ConditionYR cond = load_condition(opt, g);
    const ConditionCB cb = yr_to_cb(cond);
    const int dim = cond.layout().dim();

    Eigen::MatrixXcd stacked(dim, 2 * dim);
    stacked << cb.c, cb.b;
    const int rank = numerical_rank(stacked, 1e-10);
    const double defect = hermiticity_defect(Eigen::MatrixXcd(cb.c * cb.b.adjoint()));
    const double angle = conditions_angle(admissible_trace_space(cond),
                                          admissible_trace_space(cb_to_yr(cb)));

    Json j;
    j["name"] = cond.name();
    j["dim_Y"] = cond.dim_y();
    j["rank_CB"] = rank;
    j["cb_hermiticity_defect"] = defect;
    j["roundtrip_angle"] = angle;
    j["self_adjoint"] = cond.is_self_adjoint();
    j["dissipative"] = cond.is_dissipative();
    write_report(out_path(opt, "conditions_verify.json"), j, opt.config);

    if (rank != dim) throw ValidationError("NotSelfAdjoint", "(C B) rank deficient");
    if (defect > 1e-9) throw ValidationError("NotSelfAdjoint", "CB* not Hermitian");
    if (angle > 1e-9)
        throw NumericalError("DimensionMismatch",
                             "roundtrip does not preserve the admissible space");
    std::printf("conditions verified: rank %d/%d, CB* defect %.3g, roundtrip angle %.3g\n",
                rank, dim, defect, angle);
    return 0;
}

int cmd_conditions_convert(Options& opt) {
    const ParsedGraph parsed = parse_graph_json(opt.graph_path);
    const MetricGraph& g = metric(parsed);
    const ConditionYR cond = load_condition(opt, g);
    Json j;
    if (opt.to_form == "cb") {
        j = condition_to_json(yr_to_cb(cond));
    } else if (opt.to_form == "yr") {
        j = condition_to_json(cond);
    } else {
        throw ValidationError("SchemaError", "--to must be yr or cb");
    }
    write_report(out_path(opt, "condition_" + opt.to_form + ".json"), j, opt.config);
    std::printf("wrote condition in %s form\n", opt.to_form.c_str());
    return 0;
}

int cmd_graph_make(Options& opt) {
    GraphKind kind;
    if (opt.kind == "path")
        kind = GraphKind::path;
    else if (opt.kind == "cycle")
        kind = GraphKind::cycle;
    else if (opt.kind == "complete")
        kind = GraphKind::complete;
    else if (opt.kind == "star")
        kind = GraphKind::star;
    else if (opt.kind == "flower")
        kind = GraphKind::flower;
    else
        throw ValidationError("SchemaError", "unknown graph kind " + opt.kind);

    const Graph g = preset_graph(kind, opt.n);
    const Json j = graph_to_json(MetricGraph(
        g, std::vector<double>(static_cast<std::size_t>(g.edge_count()), opt.length)));
    const std::string path = opt.file.empty()
                                 ? out_path(opt, opt.kind + std::to_string(opt.n) + ".json")
                                 : opt.file;
    std::ofstream out(path);
    if (!out) throw ValidationError("SchemaError", "cannot write " + path);
    out << j.dump(2) << "\n";
    std::printf("wrote %s (%d vertices, %d edges)\n", path.c_str(), g.vertex_count(),
                g.edge_count());
    return 0;
}

int cmd_reproduce_paper(Options& opt) {
    const std::vector<CriterionResult> results = run_reference_battery();
    bool all_passed = true;
    Json rows = Json::array();
    for (const CriterionResult& r : results) {
        std::printf("%s\n", format_battery_line(r).c_str());
        all_passed = all_passed && r.passed;
        rows.push_back({{"number", r.number},
                        {"label", r.label},
                        {"passed", r.passed},
                        {"detail", r.detail}});
    }
    Json j;
    j["criteria"] = rows;
    j["all_passed"] = all_passed;
    write_report(out_path(opt, "reference_battery.json"), j, opt.config);
    std::printf("%s\n", all_passed ? "all criteria passed" : "SOME CRITERIA FAILED");
    return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-Laplacian operators on graphs and networks: spectra, semigroups, "
                 "qualitative classification"};
    app.set_version_flag("--version", std::string("bilap ") + kVersion);
    app.require_subcommand(1);

    Options opt;
    int (*body)(Options&) = nullptr;
    std::string command;

    auto* discrete = app.add_subcommand("discrete", "discrete graph operators");
    discrete->require_subcommand(1);
    auto* d_check = discrete->add_subcommand("check", "semigroup positivity and "
                                                      "contractivity report");
    add_common(d_check, opt, true);
    d_check->add_option("--t", opt.t_snapshot, "snapshot time for the printed matrix");
    d_check->callback([&] { body = cmd_discrete_check; command = "discrete check"; });

    auto* d_evolve = discrete->add_subcommand("evolve", "evolve an initial vector");
    add_common(d_evolve, opt, true);
    d_evolve->add_option("--f0", opt.f0_spec, "initial vector: values:a,b,... or indicator:v");
    d_evolve->callback([&] { body = cmd_discrete_evolve; command = "discrete evolve"; });

    auto* d_scan = discrete->add_subcommand("scan", "l^p dissipativity counterexample scan");
    add_common(d_scan, opt, true);
    d_scan->add_option("--p-grid", opt.p_grid, "linear p grid a:b:n");
    d_scan->add_option("--trials", opt.trials, "random restarts per grid point");
    d_scan->callback([&] { body = cmd_discrete_scan; command = "discrete scan"; });

    auto* d_gap = discrete->add_subcommand("gap", "spectral gap against extremal bounds");
    add_common(d_gap, opt, true);
    d_gap->callback([&] { body = cmd_discrete_gap; command = "discrete gap"; });

    auto* metric_cmd = app.add_subcommand("metric", "differential operators on networks");
    metric_cmd->require_subcommand(1);
    auto* m_spectrum = metric_cmd->add_subcommand("spectrum", "lowest eigenvalues");
    add_common(m_spectrum, opt, true);
    add_condition_options(m_spectrum, opt);
    m_spectrum->add_option("-k,--modes", opt.modes, "number of eigenvalues");
    m_spectrum->callback([&] { body = cmd_metric_spectrum; command = "metric spectrum"; });

    auto* m_kernel = metric_cmd->add_subcommand("kernel", "kernel dimension report");
    add_common(m_kernel, opt, true);
    add_condition_options(m_kernel, opt);
    m_kernel->callback([&] { body = cmd_metric_kernel; command = "metric kernel"; });

    auto* m_evolve = metric_cmd->add_subcommand("evolve", "evolve initial data");
    add_common(m_evolve, opt, true);
    add_condition_options(m_evolve, opt);
    m_evolve->add_option("--f0", opt.f0_spec,
                         "initial data: const:c, cospi:k or bump:edge:x0:width");
    m_evolve->callback([&] { body = cmd_metric_evolve; command = "metric evolve"; });

    auto* m_classify = metric_cmd->add_subcommand("classify", "eventual-positivity verdict");
    add_common(m_classify, opt, true);
    add_condition_options(m_classify, opt);
    m_classify->callback([&] { body = cmd_metric_classify; command = "metric classify"; });

    auto* m_ultra = metric_cmd->add_subcommand("ultra", "heat-kernel sup bound and slope");
    add_common(m_ultra, opt, true);
    add_condition_options(m_ultra, opt);
    m_ultra->callback([&] { body = cmd_metric_ultra; command = "metric ultra"; });

    auto* conditions = app.add_subcommand("conditions", "vertex-condition algebra");
    conditions->require_subcommand(1);
    auto* c_verify = conditions->add_subcommand("verify", "self-adjointness certificate");
    add_common(c_verify, opt, true);
    add_condition_options(c_verify, opt);
    c_verify->callback([&] { body = cmd_conditions_verify; command = "conditions verify"; });

    auto* c_convert = conditions->add_subcommand("convert", "convert between (Y,R) and (C,B)");
    add_common(c_convert, opt, true);
    add_condition_options(c_convert, opt);
    c_convert->add_option("--to", opt.to_form, "target form: yr or cb");
    c_convert->callback(
        [&] { body = cmd_conditions_convert; command = "conditions convert"; });

    auto* graph_cmd = app.add_subcommand("graph", "graph utilities");
    graph_cmd->require_subcommand(1);
    auto* g_make = graph_cmd->add_subcommand("make", "write a preset graph JSON");
    add_common(g_make, opt, false);
    g_make->add_option("--kind", opt.kind, "path|cycle|complete|star|flower")->required();
    g_make->add_option("--n", opt.n, "preset size")->required();
    g_make->add_option("--length", opt.length, "edge length");
    g_make->add_option("--file", opt.file, "output file (default <kind><n>.json in --out)");
    g_make->callback([&] { body = cmd_graph_make; command = "graph make"; });

    auto* reproduce = app.add_subcommand(
        "reproduce-paper", "run the built-in verification battery and print a table");
    add_common(reproduce, opt, false);
    reproduce->callback([&] { body = cmd_reproduce_paper; command = "reproduce-paper"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        finish_config(opt, command);
        return body(opt);
    } catch (const ValidationError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const NumericalError& err) {
        std::fprintf(stderr, "numerical failure: %s\n", err.what());
        return 3;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
}
