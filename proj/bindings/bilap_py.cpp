#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bilap/classify.hpp"
#include "bilap/conditions.hpp"
#include "bilap/errors.hpp"
#include "bilap/fem.hpp"
#include "bilap/graph.hpp"
#include "bilap/operators.hpp"
#include "bilap/version.hpp"

namespace py = pybind11;
using namespace bilap;

namespace {

GraphKind kind_from_name(const std::string& name) {
    if (name == "path") return GraphKind::path;
    if (name == "cycle") return GraphKind::cycle;
    if (name == "complete") return GraphKind::complete;
    if (name == "star") return GraphKind::star;
    if (name == "flower") return GraphKind::flower;
    throw ValidationError("SizeTooSmall", "unknown graph kind " + name);
}

ConditionYR preset_by_name(const MetricGraph& graph, const std::string& name,
                           double alpha, double beta, double gamma,
                           const std::string& outer) {
    auto preset = preset_from_name(name);
    if (!preset) throw ValidationError("SchemaError", "unknown preset " + name);
    KiikParams params;
    params.alpha = alpha;
    params.beta = beta;
    params.gamma = gamma;
    if (outer == "clamped")
        params.outer = OuterKind::clamped;
    else if (outer == "hinged")
        params.outer = OuterKind::hinged;
    else if (outer == "sliding")
        params.outer = OuterKind::sliding;
    else
        throw ValidationError("SchemaError", "outer must be clamped, hinged or sliding");
    return preset_conditions(graph, *preset, params);
}

py::dict classification_dict(const Classification& c) {
    py::dict d;
    d["verdict"] = std::string(verdict_name(c.verdict));
    d["kernel_dimension"] = c.kernel_dimension;
    d["lowest_eigenvalue"] = c.lowest_eigenvalue;
    d["ground_min"] = c.ground_min;
    d["ground_max"] = c.ground_max;
    d["ground_constant"] = c.ground_constant;
    d["projector_witness_found"] = c.projector_witness_found;
    d["projector_min"] = c.projector_min;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bi-Laplacian operators on discrete graphs and metric networks";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "BilapValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "BilapNumericalError", PyExc_RuntimeError);

    py::class_<Graph>(m, "Graph")
        .def(py::init([](int vertices, const std::vector<std::pair<int, int>>& edges) {
                 std::vector<Edge> list;
                 for (auto [s, t] : edges) list.push_back({s, t});
                 return Graph(vertices, std::move(list));
             }),
             py::arg("vertices"), py::arg("edges"))
        .def_property_readonly("vertex_count", &Graph::vertex_count)
        .def_property_readonly("edge_count", &Graph::edge_count)
        .def_property_readonly("edges",
                               [](const Graph& g) {
                                   std::vector<std::pair<int, int>> out;
                                   for (const Edge& e : g.edges())
                                       out.push_back({e.source, e.target});
                                   return out;
                               })
        .def_property_readonly("degrees", &Graph::degrees)
        .def("adjacent", &Graph::adjacent)
        .def("is_complete", &Graph::is_complete)
        .def("incidence_matrix",
             [](const Graph& g) { return Eigen::MatrixXi(g.incidence_matrix()); })
        .def("__repr__", [](const Graph& g) {
            return "Graph(V=" + std::to_string(g.vertex_count()) +
                   ", E=" + std::to_string(g.edge_count()) + ")";
        });

    py::class_<MetricGraph>(m, "MetricGraph")
        .def(py::init<Graph, std::vector<double>>(), py::arg("graph"), py::arg("lengths"))
        .def_property_readonly("graph", &MetricGraph::graph)
        .def_property_readonly("lengths", &MetricGraph::lengths)
        .def_property_readonly("total_length", &MetricGraph::total_length);

    m.def("preset_graph",
          [](const std::string& kind, int n) { return preset_graph(kind_from_name(kind), n); },
          py::arg("kind"), py::arg("n"));
    m.def("equilateral", &equilateral, py::arg("graph"), py::arg("length") = 1.0);
    m.def("connected_graph_count", &connected_graph_count, py::arg("n"));
    m.def("connected_graphs",
          [](int n) {
              std::vector<Graph> graphs;
              enumerate_connected_graphs(n, [&](const Graph& g) { graphs.push_back(g); });
              return graphs;
          },
          py::arg("n"), "All connected labeled graphs on n vertices (n <= 7)");

    m.def("laplacian_matrix",
          [](const Graph& g) { return laplacian(g).matrix(); });
    m.def("bilaplacian_matrix",
          [](const Graph& g) { return Eigen::MatrixXi(bilaplacian_closed_form(g)); });
    m.def("bilaplacian_eigenvalues",
          [](const Graph& g) { return bilaplacian(g).eigenvalues(); });
    m.def("discrete_semigroup",
          [](const Graph& g, double t) { return bilaplacian(g).semigroup(t); },
          py::arg("graph"), py::arg("t"));
    m.def("kappa",
          [](const Graph& g, const Eigen::VectorXd& f, double p) {
              return kappa(g, f, p).kappa;
          },
          py::arg("graph"), py::arg("f"), py::arg("p"));
    m.def("markov_character",
          [](const Graph& g, const std::vector<double>& grid) {
              const MarkovReport r = markov_character(g, grid);
              py::dict d;
              d["is_complete"] = r.is_complete;
              d["positive_all_t"] = r.positive_all_t;
              d["linf_contractive"] = r.linf_contractive;
              d["consistent"] = r.consistent;
              d["min_entry"] = r.min_entry;
              d["max_row_sup"] = r.max_row_sup;
              return d;
          },
          py::arg("graph"), py::arg("t_grid"));
    m.def("spectral_gap_bounds",
          [](const Graph& g) {
              const GapReport r = spectral_gap_bounds_check(g);
              py::dict d;
              d["lambda2"] = r.lambda2;
              d["lower"] = r.lower;
              d["upper"] = r.upper;
              d["within"] = r.within;
              d["spectral_mapping_error"] = r.spectral_mapping_error;
              return d;
          });
    m.def("discrete_transition_time",
          [](const Graph& g, const Eigen::VectorXd& f0, double tol) {
              return discrete_transition_time(g, f0, tol).t_star;
          },
          py::arg("graph"), py::arg("f0"), py::arg("tol") = 1e-10);
    m.def("lp_dissipativity_scan",
          [](const Graph& g, const std::vector<double>& p_grid, int trials,
             std::uint64_t seed) {
              const ScanResult r = lp_dissipativity_scan(g, p_grid, trials, seed);
              py::dict d;
              d["witness_found"] = r.witness_found;
              if (r.witness_found) {
                  d["p"] = r.p;
                  d["kappa"] = r.kappa;
                  d["witness"] = Eigen::VectorXd(r.witness);
              }
              return d;
          },
          py::arg("graph"), py::arg("p_grid"), py::arg("trials") = 32,
          py::arg("seed") = 42);
    m.def("classify_discrete",
          [](const Graph& g, double tol) {
              return classification_dict(classify(bilaplacian(g), tol));
          },
          py::arg("graph"), py::arg("tol") = 1e-6);

    py::class_<ConditionYR>(m, "ConditionYR")
        .def_property_readonly("y_basis", &ConditionYR::y_basis)
        .def_property_readonly("r", &ConditionYR::r)
        .def_property_readonly("name", &ConditionYR::name)
        .def_property_readonly("dim_y", &ConditionYR::dim_y)
        .def_property_readonly("self_adjoint", &ConditionYR::is_self_adjoint)
        .def_property_readonly("dissipative", &ConditionYR::is_dissipative);

    py::class_<ConditionCB>(m, "ConditionCB")
        .def_property_readonly("c", [](const ConditionCB& cb) { return cb.c; })
        .def_property_readonly("b", [](const ConditionCB& cb) { return cb.b; });

    m.def("preset_conditions", &preset_by_name, py::arg("graph"), py::arg("preset"),
          py::arg("alpha") = M_PI / 2, py::arg("beta") = M_PI / 2,
          py::arg("gamma") = M_PI / 2, py::arg("outer") = "clamped");
    m.def("yr_to_cb", &yr_to_cb);
    m.def("cb_to_yr",
          [](const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& b, int edge_count) {
              ConditionCB cb;
              cb.layout = TraceLayout{edge_count};
              cb.c = c;
              cb.b = b;
              return cb_to_yr(cb);
          },
          py::arg("c"), py::arg("b"), py::arg("edge_count"));
    m.def("conditions_equal",
          [](const ConditionYR& a, const ConditionYR& b) { return conditions_equal(a, b); });

    py::class_<ReducedSystem>(m, "ReducedSystem")
        .def_property_readonly("reduced_dim", &ReducedSystem::reduced_dim)
        .def_property_readonly("condition_name", &ReducedSystem::condition_name)
        .def("eigenvalues",
             [](const ReducedSystem& sys, int k) {
                 return Eigen::VectorXd(eigensolve(sys, k).values);
             },
             py::arg("k"))
        .def("kernel_dimension", [](const ReducedSystem& sys) { return kernel_dimension(sys); })
        .def("kernel_sup_bound",
             [](const ReducedSystem& sys, double t) { return kernel_sup_bound(sys, t); },
             py::arg("t"))
        .def("classify",
             [](const ReducedSystem& sys, double tol) {
                 return classification_dict(classify(sys, tol));
             },
             py::arg("tol") = 1e-6)
        .def("transition_time",
             [](const ReducedSystem& sys, const std::function<double(int, double)>& f0,
                double tol) { return transition_time(sys, f0, tol).t_star; },
             py::arg("f0"), py::arg("tol") = 1e-8)
        .def("evolve_min_values",
             [](const ReducedSystem& sys, const std::function<double(int, double)>& f0,
                const std::vector<double>& times) {
                 return evolve(sys, f0, times).min_values;
             },
             py::arg("f0"), py::arg("times"));

    m.def("assemble",
          [](const MetricGraph& g, int mesh, const ConditionYR& cond) {
              return assemble(g, Mesh::uniform(g, mesh), cond);
          },
          py::arg("graph"), py::arg("mesh"), py::arg("condition"));
    m.def("assemble_laplacian_ck",
          [](const MetricGraph& g, int mesh) {
              return assemble_laplacian_ck(g, Mesh::uniform(g, mesh));
          },
          py::arg("graph"), py::arg("mesh"));
    m.def("ultracontractivity_slope",
          [](const ReducedSystem& sys, double t_lo, double t_hi, int samples) {
              return ultracontractivity_slope(sys, t_lo, t_hi, samples);
          },
          py::arg("system"), py::arg("t_lo") = 1e-4, py::arg("t_hi") = 1e-2,
          py::arg("samples") = 9);
}
