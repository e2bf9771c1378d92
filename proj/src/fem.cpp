#include "bilap/fem.hpp"

#include <algorithm>
#include <cmath>

#include "bilap/errors.hpp"
#include "bilap/numerics.hpp"

namespace bilap {

Mesh Mesh::uniform(const MetricGraph& graph, int n) {
    if (n < 1) throw ValidationError("NonpositiveLength", "need at least one element");
    Mesh mesh;
    mesh.elements_per_edge.assign(graph.edge_count(), n);
    return mesh;
}

std::pair<Eigen::Matrix4d, Eigen::Matrix4d> hermite_element_matrices(double h) {
    if (!(h > 0.0))
        throw ValidationError("NonpositiveLength", "element length must be positive");
    Eigen::Matrix4d k;
    const double h2 = h * h, h3 = h2 * h;
    k << 12.0, 6.0 * h, -12.0, 6.0 * h,
        6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2,
        -12.0, -6.0 * h, 12.0, -6.0 * h,
        6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2;
    k /= h3;
    Eigen::Matrix4d m;
    m << 156.0, 22.0 * h, 54.0, -13.0 * h,
        22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2,
        54.0, 13.0 * h, 156.0, -22.0 * h,
        -13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2;
    m *= h / 420.0;
    return {k, m};
}

DofMap::DofMap(const MetricGraph& graph, const Mesh& mesh, int dofs_per_node)
    : dofs_per_node_(dofs_per_node) {
    if (static_cast<int>(mesh.elements_per_edge.size()) != graph.edge_count())
        throw ValidationError("ConditionGraphMismatch",
                              "mesh does not match the graph's edge count");
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (mesh.elements(e) < 1)
            throw ValidationError("NonpositiveLength", "each edge needs >= 1 element");
        const int nodes = mesh.elements(e) + 1;
        nodes_per_edge_.push_back(nodes);
        dof_offset_.push_back(total_dofs_);
        node_offset_.push_back(total_nodes_);
        const double h = graph.length(e) / mesh.elements(e);
        for (int i = 0; i < nodes; ++i) positions_.push_back({e, i * h});
        total_dofs_ += dofs_per_node_ * nodes;
        total_nodes_ += nodes;
    }
}

ReducedSystem::ReducedSystem(MetricGraph graph, Mesh mesh, DofMap dofs, Kind kind,
                             std::string condition_name, Eigen::MatrixXd trace_map,
                             Eigen::MatrixXcd z, Eigen::MatrixXd m_full,
                             Eigen::MatrixXcd k_y, Eigen::MatrixXcd m_y)
    : graph_(std::move(graph)),
      mesh_(std::move(mesh)),
      dofs_(std::move(dofs)),
      kind_(kind),
      condition_name_(std::move(condition_name)),
      trace_map_(std::move(trace_map)),
      z_(std::move(z)),
      m_full_(std::move(m_full)),
      k_y_(std::move(k_y)),
      m_y_(std::move(m_y)) {}

Eigen::VectorXcd ReducedSystem::full_from_reduced(const Eigen::VectorXcd& v) const {
    return z_ * v;
}

Eigen::VectorXd ReducedSystem::nodal_values(const Eigen::VectorXcd& full) const {
    Eigen::VectorXd out(dofs_.total_nodes());
    int idx = 0;
    for (int e = 0; e < graph_.edge_count(); ++e)
        for (int i = 0; i < dofs_.nodes_on_edge(e); ++i)
            out(idx++) = full(dofs_.value_dof(e, i)).real();
    return out;
}

Eigen::VectorXcd ReducedSystem::project(const EdgeFunction& f,
                                        const EdgeFunction* derivative) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dofs_.total_dofs());
    for (int e = 0; e < graph_.edge_count(); ++e) {
        const double len = graph_.length(e);
        const double h = len / mesh_.elements(e);
        for (int i = 0; i < dofs_.nodes_on_edge(e); ++i) {
            const double x = std::min(i * h, len);
            w(dofs_.value_dof(e, i)) = f(e, x);
            if (dofs_.dofs_per_node() == 2) {
                double d;
                if (derivative) {
                    d = (*derivative)(e, x);
                } else {
                    const double step = h * 1e-4;
                    const double xl = std::max(0.0, x - step);
                    const double xr = std::min(len, x + step);
                    d = (f(e, xr) - f(e, xl)) / (xr - xl);
                }
                w(dofs_.derivative_dof(e, i)) = d;
            }
        }
    }
    // M-orthogonal projection onto range(Z)
    const Eigen::VectorXcd rhs = z_.adjoint() * (m_full_ * w).cast<Complex>();
    return m_y_.ldlt().solve(rhs);
}

Eigen::VectorXcd ReducedSystem::project_nodal(const Eigen::VectorXd& nodal) const {
    if (nodal.size() != dofs_.total_nodes())
        throw ValidationError("DimensionMismatch", "expected one value per mesh node");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dofs_.total_dofs());
    int idx = 0;
    for (int e = 0; e < graph_.edge_count(); ++e)
        for (int i = 0; i < dofs_.nodes_on_edge(e); ++i)
            w(dofs_.value_dof(e, i)) = nodal(idx++);
    const Eigen::VectorXcd rhs = z_.adjoint() * (m_full_ * w).cast<Complex>();
    return m_y_.ldlt().solve(rhs);
}

double ReducedSystem::mean_value(const Eigen::VectorXcd& reduced) const {
    Eigen::VectorXd ones = Eigen::VectorXd::Zero(dofs_.total_dofs());
    for (int e = 0; e < graph_.edge_count(); ++e)
        for (int i = 0; i < dofs_.nodes_on_edge(e); ++i)
            ones(dofs_.value_dof(e, i)) = 1.0;
    const Eigen::VectorXcd full = full_from_reduced(reduced);
    const Complex integral = (m_full_ * ones).cast<Complex>().dot(full);
    return integral.real() / graph_.total_length();
}

double ReducedSystem::l2_norm(const Eigen::VectorXcd& reduced) const {
    const Complex q = reduced.dot(m_y_ * reduced);
    return std::sqrt(std::max(0.0, q.real()));
}

bool ReducedSystem::is_real() const {
    const double scale = std::max({max_abs(k_y_), max_abs(m_y_), 1.0});
    const double imag = std::max({max_abs(Eigen::MatrixXcd(k_y_.imag().cast<Complex>())),
                                  max_abs(Eigen::MatrixXcd(m_y_.imag().cast<Complex>())),
                                  max_abs(Eigen::MatrixXcd(z_.imag().cast<Complex>()))});
    return imag <= 1e-12 * scale;
}

const EigenDecomposition& ReducedSystem::eigen() const {
    if (!eigen_) {
        EigenDecomposition dec;
        if (is_real()) {
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
                k_y_.real(), m_y_.real(), Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
            if (solver.info() != Eigen::Success)
                throw NumericalError("SolverFailure", "generalized eigensolve failed");
            dec.values = solver.eigenvalues();
            dec.vectors = solver.eigenvectors().cast<Complex>();
        } else {
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
                k_y_, m_y_, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
            if (solver.info() != Eigen::Success)
                throw NumericalError("SolverFailure", "generalized eigensolve failed");
            dec.values = solver.eigenvalues();
            dec.vectors = solver.eigenvectors();
        }

        const double k_scale = std::max(max_abs(k_y_), 1.0);
        const Eigen::MatrixXcd residual =
            k_y_ * dec.vectors - m_y_ * dec.vectors * dec.values.asDiagonal();
        if (max_abs(residual) > 1e-8 * k_scale)
            throw NumericalError("SolverFailure", "eigenpair residual too large");
        const Eigen::MatrixXcd gram = dec.vectors.adjoint() * m_y_ * dec.vectors;
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
        if (max_abs(Eigen::MatrixXcd(gram - eye)) > 1e-9)
            throw NumericalError("SolverFailure", "eigenvectors not M-orthonormal");
        eigen_ = std::move(dec);
    }
    return *eigen_;
}

double ReducedSystem::third_derivative(const Eigen::VectorXcd& full, int edge,
                                       int element) const {
    if (kind_ != Kind::biharmonic)
        throw ValidationError("ConditionGraphMismatch",
                              "third derivatives need the Hermite discretization");
    const double h = graph_.length(edge) / mesh_.elements(edge);
    const double u0 = full(dofs_.value_dof(edge, element)).real();
    const double t0 = full(dofs_.derivative_dof(edge, element)).real();
    const double u1 = full(dofs_.value_dof(edge, element + 1)).real();
    const double t1 = full(dofs_.derivative_dof(edge, element + 1)).real();
    return (12.0 * (u0 - u1) + 6.0 * h * (t0 + t1)) / (h * h * h);
}

double ReducedSystem::second_derivative_at(const Eigen::VectorXcd& full, int edge,
                                           bool right) const {
    if (kind_ != Kind::biharmonic)
        throw ValidationError("ConditionGraphMismatch",
                              "second derivatives need the Hermite discretization");
    const double h = graph_.length(edge) / mesh_.elements(edge);
    const int element = right ? mesh_.elements(edge) - 1 : 0;
    const double u0 = full(dofs_.value_dof(edge, element)).real();
    const double t0 = full(dofs_.derivative_dof(edge, element)).real();
    const double u1 = full(dofs_.value_dof(edge, element + 1)).real();
    const double t1 = full(dofs_.derivative_dof(edge, element + 1)).real();
    if (right)
        return (6.0 * u0 - 6.0 * u1) / (h * h) + (2.0 * t0 + 4.0 * t1) / h;
    return (-6.0 * u0 + 6.0 * u1) / (h * h) + (-4.0 * t0 - 2.0 * t1) / h;
}

namespace {

struct Assembled {
    Eigen::MatrixXd k_full;
    Eigen::MatrixXd m_full;
};

Assembled assemble_hermite(const MetricGraph& graph, const Mesh& mesh, const DofMap& dofs) {
    Assembled out;
    out.k_full = Eigen::MatrixXd::Zero(dofs.total_dofs(), dofs.total_dofs());
    out.m_full = Eigen::MatrixXd::Zero(dofs.total_dofs(), dofs.total_dofs());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const double h = graph.length(e) / mesh.elements(e);
        const auto [ke, me] = hermite_element_matrices(h);
        for (int el = 0; el < mesh.elements(e); ++el) {
            const int idx[4] = {dofs.value_dof(e, el), dofs.derivative_dof(e, el),
                                dofs.value_dof(e, el + 1), dofs.derivative_dof(e, el + 1)};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    out.k_full(idx[a], idx[b]) += ke(a, b);
                    out.m_full(idx[a], idx[b]) += me(a, b);
                }
        }
    }
    return out;
}

Assembled assemble_p1(const MetricGraph& graph, const Mesh& mesh, const DofMap& dofs) {
    Assembled out;
    out.k_full = Eigen::MatrixXd::Zero(dofs.total_dofs(), dofs.total_dofs());
    out.m_full = Eigen::MatrixXd::Zero(dofs.total_dofs(), dofs.total_dofs());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const double h = graph.length(e) / mesh.elements(e);
        for (int el = 0; el < mesh.elements(e); ++el) {
            const int idx[2] = {dofs.value_dof(e, el), dofs.value_dof(e, el + 1)};
            const double kd = 1.0 / h;
            out.k_full(idx[0], idx[0]) += kd;
            out.k_full(idx[1], idx[1]) += kd;
            out.k_full(idx[0], idx[1]) -= kd;
            out.k_full(idx[1], idx[0]) -= kd;
            out.m_full(idx[0], idx[0]) += h / 3.0;
            out.m_full(idx[1], idx[1]) += h / 3.0;
            out.m_full(idx[0], idx[1]) += h / 6.0;
            out.m_full(idx[1], idx[0]) += h / 6.0;
        }
    }
    return out;
}

/// Reduce (K_eff, M_full) onto the constraint space {trace_map u in
/// span(y_basis)}, exploiting that each trace row touches exactly one dof.
ReducedSystem reduce(MetricGraph graph, Mesh mesh, DofMap dofs, ReducedSystem::Kind kind,
                     std::string name, const Eigen::MatrixXd& trace_map,
                     const Eigen::MatrixXcd& y_basis, const Eigen::MatrixXd& k_eff_real,
                     const Eigen::MatrixXcd& k_extra, const Eigen::MatrixXd& m_full) {
    const int n = dofs.total_dofs();
    const int rows = static_cast<int>(trace_map.rows());
    std::vector<int> trace_dof(rows, -1);
    std::vector<double> trace_sign(rows, 1.0);
    std::vector<bool> is_boundary(n, false);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j) {
            if (trace_map(i, j) != 0.0) {
                trace_dof[i] = j;
                trace_sign[i] = trace_map(i, j);
                is_boundary[j] = true;
                break;
            }
        }
    }

    const int k = static_cast<int>(y_basis.cols());
    int interior = 0;
    for (int j = 0; j < n; ++j)
        if (!is_boundary[j]) ++interior;
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(n, k + interior);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < rows; ++i)
            z(trace_dof[i], c) = trace_sign[i] * y_basis(i, c);
    int col = k;
    for (int j = 0; j < n; ++j)
        if (!is_boundary[j]) z(j, col++) = 1.0;

    Eigen::MatrixXcd k_y = z.adjoint() * (k_eff_real.cast<Complex>() * z).eval();
    if (k_extra.size() > 0) k_y += z.adjoint() * (k_extra * z).eval();
    Eigen::MatrixXcd m_y = z.adjoint() * (m_full.cast<Complex>() * z).eval();
    k_y = 0.5 * (k_y + k_y.adjoint()).eval();
    m_y = 0.5 * (m_y + m_y.adjoint()).eval();

    return ReducedSystem(std::move(graph), std::move(mesh), std::move(dofs), kind,
                         std::move(name), trace_map, std::move(z), m_full, std::move(k_y),
                         std::move(m_y));
}

}  // namespace

ReducedSystem assemble(const MetricGraph& graph, const Mesh& mesh,
                       const ConditionYR& condition) {
    if (condition.layout().edge_count != graph.edge_count())
        throw ValidationError("ConditionGraphMismatch",
                              "condition was built for a different edge count");
    if (!condition.is_self_adjoint())
        throw ValidationError("NotSelfAdjoint",
                              "assembly supports Hermitian R only (the eigensolver "
                              "path is self-adjoint)");
    const DofMap dofs(graph, mesh, 2);
    const auto [k_full, m_full] = assemble_hermite(graph, mesh, dofs);

    const TraceLayout& layout = condition.layout();
    Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(layout.dim(), dofs.total_dofs());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const int last = mesh.elements(e);
        trace(layout.value_row(e, false), dofs.value_dof(e, 0)) = 1.0;
        trace(layout.value_row(e, true), dofs.value_dof(e, last)) = 1.0;
        trace(layout.derivative_row(e, false), dofs.derivative_dof(e, 0)) =
            TraceLayout::derivative_sign(false);
        trace(layout.derivative_row(e, true), dofs.derivative_dof(e, last)) =
            TraceLayout::derivative_sign(true);
    }

    // boundary form -(R u^{0,1}, v^{0,1}) enters the stiffness through the
    // trace map
    Eigen::MatrixXcd k_extra;
    if (max_abs(condition.r()) > 0.0) {
        const Eigen::MatrixXcd r_hat = condition.r_in_trace_coordinates();
        const Eigen::MatrixXcd trace_c = trace.cast<Complex>();
        k_extra = -(trace_c.adjoint() * r_hat * trace_c);
    }

    return reduce(graph, mesh, dofs, ReducedSystem::Kind::biharmonic, condition.name(),
                  trace, condition.y_basis(), k_full, k_extra, m_full);
}

ReducedSystem assemble_laplacian_ck(const MetricGraph& graph, const Mesh& mesh) {
    const DofMap dofs(graph, mesh, 1);
    const auto [k_full, m_full] = assemble_p1(graph, mesh, dofs);

    const TraceLayout layout{graph.edge_count()};
    Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(2 * graph.edge_count(), dofs.total_dofs());
    for (int e = 0; e < graph.edge_count(); ++e) {
        trace(layout.left_slot(e), dofs.value_dof(e, 0)) = 1.0;
        trace(layout.right_slot(e), dofs.value_dof(e, mesh.elements(e))) = 1.0;
    }
    const Eigen::MatrixXcd y = cv_basis(graph).cast<Complex>();
    return reduce(graph, mesh, dofs, ReducedSystem::Kind::laplacian, "laplacian_ck",
                  trace, y, k_full, Eigen::MatrixXcd(), m_full);
}

EigenDecomposition eigensolve(const ReducedSystem& system, int k) {
    if (k < 1 || k > system.reduced_dim())
        throw ValidationError("DimensionMismatch",
                              "requested mode count exceeds the reduced dimension");
    const EigenDecomposition& full = system.eigen();
    EigenDecomposition out;
    out.values = full.values.head(k);
    out.vectors = full.vectors.leftCols(k);
    return out;
}

int kernel_dimension(const ReducedSystem& system) {
    return zero_cluster_size(system.eigen().values);
}

Trajectory evolve(const ReducedSystem& system, const EdgeFunction& f0,
                  const std::vector<double>& times, int mode_count,
                  const EdgeFunction* f0_derivative) {
    for (double t : times)
        if (t < 0.0) throw ValidationError("NegativeTime", "times must be >= 0");
    const EigenDecomposition& dec = system.eigen();
    const int modes = mode_count < 0
                          ? system.reduced_dim()
                          : std::min(mode_count, system.reduced_dim());

    const Eigen::VectorXcd f_red = system.project(f0, f0_derivative);
    const Eigen::VectorXcd coeffs =
        dec.vectors.leftCols(modes).adjoint() * (system.m_reduced() * f_red);

    Trajectory traj;
    traj.times = times;
    traj.nodes = system.dofs().node_positions();
    traj.values.resize(static_cast<Eigen::Index>(times.size()), system.dofs().total_nodes());
    traj.mean = system.mean_value(f_red);

    Eigen::VectorXcd mean_red;
    {
        const EdgeFunction const_mean = [&](int, double) { return traj.mean; };
        mean_red = system.project(const_mean);
    }

    for (std::size_t i = 0; i < times.size(); ++i) {
        Eigen::VectorXcd scaled = coeffs;
        for (int j = 0; j < modes; ++j)
            scaled(j) *= std::exp(-dec.values(j) * times[i]);
        const Eigen::VectorXcd u_red = dec.vectors.leftCols(modes) * scaled;
        const Eigen::VectorXd nodal = system.nodal_values(system.full_from_reduced(u_red));
        traj.values.row(static_cast<Eigen::Index>(i)) = nodal.transpose();
        traj.min_values.push_back(nodal.minCoeff());
        traj.distance_to_mean.push_back(
            system.l2_norm(Eigen::VectorXcd(u_red - mean_red)));
    }
    return traj;
}

double kernel_sup_bound(const ReducedSystem& system, double t) {
    if (!(t > 0.0))
        throw ValidationError("NonpositiveTime", "kernel bound needs t > 0");
    const EigenDecomposition& dec = system.eigen();
    // complex nodal samples of every eigenvector: the kernel
    // sum_j e^{-lambda_j t} phi_j(x) conj(phi_j(y)) is phase-invariant
    const int nodes = system.dofs().total_nodes();
    Eigen::MatrixXcd s(nodes, system.reduced_dim());
    const DofMap& dofs = system.dofs();
    for (int j = 0; j < system.reduced_dim(); ++j) {
        const Eigen::VectorXcd full =
            system.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(j)));
        int idx = 0;
        for (int e = 0; e < system.graph().edge_count(); ++e)
            for (int i = 0; i < dofs.nodes_on_edge(e); ++i)
                s(idx++, j) = full(dofs.value_dof(e, i));
    }
    const Eigen::VectorXd decay = (-t * dec.values.array()).exp();
    const Eigen::MatrixXcd kernel =
        s * decay.cast<Complex>().asDiagonal() * s.adjoint();
    return max_abs(kernel);
}

double kirchhoff_defect(const ReducedSystem& system, const Eigen::VectorXcd& reduced) {
    const Eigen::VectorXcd full = system.full_from_reduced(reduced);
    const Graph& g = system.graph().graph();
    double worst = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        double sum = 0.0;
        for (int e = 0; e < g.edge_count(); ++e) {
            if (g.edges()[e].source == v)
                sum -= system.third_derivative(full, e, 0);
            if (g.edges()[e].target == v)
                sum += system.third_derivative(full, e, system.mesh().elements(e) - 1);
        }
        worst = std::max(worst, std::abs(sum));
    }
    return worst;
}

}  // namespace bilap
