#include "bilap/conditions.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>

#include "bilap/errors.hpp"
#include "bilap/numerics.hpp"

namespace bilap {

namespace {

constexpr double kAngleTol = 1e-9;

/// Slots of the 2E-component endpoint vector that belong to vertex v, in
/// increasing slot order.
std::vector<int> vertex_slots(const Graph& graph, const TraceLayout& layout, int v) {
    std::vector<int> slots;
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (graph.edges()[e].source == v) slots.push_back(layout.left_slot(e));
        if (graph.edges()[e].target == v) slots.push_back(layout.right_slot(e));
    }
    return slots;
}

/// Per-vertex choice for one half (values or derivatives) of the trace.
enum class VertexSpace { zero, ones, ones_perp, full };

/// Columns spanning the chosen subspace of the d-dimensional slot space.
Eigen::MatrixXd local_basis(VertexSpace space, int d) {
    switch (space) {
        case VertexSpace::zero:
            return Eigen::MatrixXd(d, 0);
        case VertexSpace::ones:
            return Eigen::MatrixXd::Constant(d, 1, 1.0 / std::sqrt(double(d)));
        case VertexSpace::ones_perp: {
            // complement of the normalized ones vector via full QR
            Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(d, 1, 1.0);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
            Eigen::MatrixXd q = qr.householderQ();
            return q.rightCols(d - 1);
        }
        case VertexSpace::full:
            return Eigen::MatrixXd::Identity(d, d);
    }
    return Eigen::MatrixXd(d, 0);
}

/// Assemble a 2E x k block-diagonal (per vertex) orthonormal basis from
/// per-vertex local bases.
Eigen::MatrixXcd assemble_half_basis(
    const Graph& graph, const TraceLayout& layout,
    const std::function<Eigen::MatrixXcd(int v, const std::vector<int>& slots)>& local) {
    const int half = 2 * layout.edge_count;
    std::vector<Eigen::MatrixXcd> blocks;
    std::vector<std::vector<int>> slot_lists;
    int total_cols = 0;
    for (int v = 0; v < graph.vertex_count(); ++v) {
        auto slots = vertex_slots(graph, layout, v);
        Eigen::MatrixXcd b = local(v, slots);
        total_cols += static_cast<int>(b.cols());
        blocks.push_back(std::move(b));
        slot_lists.push_back(std::move(slots));
    }
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(half, total_cols);
    int col = 0;
    for (int v = 0; v < graph.vertex_count(); ++v) {
        const auto& b = blocks[v];
        for (int j = 0; j < b.cols(); ++j, ++col)
            for (std::size_t i = 0; i < slot_lists[v].size(); ++i)
                basis(slot_lists[v][i], col) = b(i, j);
    }
    return basis;
}

Eigen::MatrixXcd uniform_half_basis(const Graph& graph, const TraceLayout& layout,
                                    VertexSpace space) {
    return assemble_half_basis(graph, layout, [&](int, const std::vector<int>& slots) {
        return local_basis(space, static_cast<int>(slots.size())).cast<Complex>().eval();
    });
}

/// Stack value-half and derivative-half bases into a 4E x (k1+k2) basis of
/// Y = Y1 x Y2.
Eigen::MatrixXcd product_basis(const TraceLayout& layout, const Eigen::MatrixXcd& value,
                               const Eigen::MatrixXcd& deriv) {
    const int half = 2 * layout.edge_count;
    Eigen::MatrixXcd basis =
        Eigen::MatrixXcd::Zero(2 * half, value.cols() + deriv.cols());
    basis.topLeftCorner(half, value.cols()) = value;
    basis.bottomRightCorner(half, deriv.cols()) = deriv;
    return basis;
}

/// Lambda_0 = (1/2) J L^{-1} J: entries 1/l_e coupling the two endpoint
/// derivative slots of each edge.
Eigen::MatrixXd krein_lambda0(const MetricGraph& graph) {
    const int e_count = graph.edge_count();
    Eigen::MatrixXd lambda0 = Eigen::MatrixXd::Zero(2 * e_count, 2 * e_count);
    for (int e = 0; e < e_count; ++e) {
        const double inv = 1.0 / graph.length(e);
        lambda0(e, e) = inv;
        lambda0(e, e_count + e) = inv;
        lambda0(e_count + e, e) = inv;
        lambda0(e_count + e, e_count + e) = inv;
    }
    return lambda0;
}

}  // namespace

ConditionYR::ConditionYR(TraceLayout layout, Eigen::MatrixXcd y_basis, Eigen::MatrixXcd r,
                         std::string name)
    : layout_(layout), y_basis_(std::move(y_basis)), r_(std::move(r)), name_(std::move(name)) {
    if (y_basis_.rows() != layout_.dim())
        throw ValidationError("DimensionMismatch", "Y basis must have 4E rows");
    if (y_basis_.cols() > layout_.dim())
        throw ValidationError("DimensionMismatch", "Y basis has too many columns");
    if (r_.rows() != y_basis_.cols() || r_.cols() != y_basis_.cols())
        throw ValidationError("DimensionMismatch", "R must be k x k with k = dim Y");
    const Eigen::MatrixXcd gram = y_basis_.adjoint() * y_basis_;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    if (max_abs(Eigen::MatrixXcd(gram - eye)) > 1e-12)
        throw ValidationError("NotOrthonormal", "Y basis columns are not orthonormal");
    const double scale = std::max(max_abs(r_), 1.0);
    self_adjoint_ = hermiticity_defect(r_) <= 1e-12 * scale;
}

Eigen::MatrixXcd ConditionYR::y_perp_basis() const {
    if (dim_y() == 0) return Eigen::MatrixXcd::Identity(layout_.dim(), layout_.dim());
    return null_space(Eigen::MatrixXcd(y_basis_.adjoint()));
}

Eigen::MatrixXcd ConditionYR::r_in_trace_coordinates() const {
    return y_basis_ * r_ * y_basis_.adjoint();
}

bool ConditionYR::is_dissipative() const {
    if (dim_y() == 0) return true;
    const Eigen::MatrixXcd sym = 0.5 * (r_ + r_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    const double scale = std::max(max_abs(r_), 1.0);
    return solver.eigenvalues().maxCoeff() <= 1e-12 * scale;
}

const char* preset_name(ConditionPreset preset) {
    switch (preset) {
        case ConditionPreset::sliding_kirchhoff: return "sliding_kirchhoff";
        case ConditionPreset::cont_deriv: return "cont_deriv";
        case ConditionPreset::cont_free: return "cont_free";
        case ConditionPreset::friedrichs: return "friedrichs";
        case ConditionPreset::krein: return "krein";
        case ConditionPreset::kiik: return "kiik";
        case ConditionPreset::hinged: return "hinged";
        case ConditionPreset::clamped: return "clamped";
        case ConditionPreset::free_ends: return "free";
    }
    return "unknown";
}

std::optional<ConditionPreset> preset_from_name(const std::string& name) {
    for (ConditionPreset p :
         {ConditionPreset::sliding_kirchhoff, ConditionPreset::cont_deriv,
          ConditionPreset::cont_free, ConditionPreset::friedrichs, ConditionPreset::krein,
          ConditionPreset::kiik, ConditionPreset::hinged, ConditionPreset::clamped,
          ConditionPreset::free_ends})
        if (name == preset_name(p)) return p;
    return std::nullopt;
}

Eigen::MatrixXd cv_basis(const MetricGraph& graph) {
    const TraceLayout layout{graph.edge_count()};
    return uniform_half_basis(graph.graph(), layout, VertexSpace::ones).real();
}

ConditionYR preset_conditions(const MetricGraph& graph, ConditionPreset preset,
                              const KiikParams& kiik_params) {
    const TraceLayout layout{graph.edge_count()};
    const Graph& g = graph.graph();

    const auto uniform = [&](VertexSpace value, VertexSpace deriv) {
        return product_basis(layout, uniform_half_basis(g, layout, value),
                             uniform_half_basis(g, layout, deriv));
    };

    switch (preset) {
        case ConditionPreset::sliding_kirchhoff: {
            Eigen::MatrixXcd y = uniform(VertexSpace::ones, VertexSpace::ones_perp);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::cont_deriv: {
            Eigen::MatrixXcd y = uniform(VertexSpace::ones, VertexSpace::ones);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::cont_free: {
            Eigen::MatrixXcd y = uniform(VertexSpace::ones, VertexSpace::full);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::friedrichs: {
            Eigen::MatrixXcd y = uniform(VertexSpace::ones, VertexSpace::zero);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::krein: {
            Eigen::MatrixXcd y = uniform(VertexSpace::ones, VertexSpace::full);
            // R in trace coordinates acts only on the derivative half
            Eigen::MatrixXcd lambda =
                Eigen::MatrixXcd::Zero(layout.dim(), layout.dim());
            lambda.bottomRightCorner(2 * graph.edge_count(), 2 * graph.edge_count()) =
                krein_lambda0(graph).cast<Complex>();
            Eigen::MatrixXcd r = y.adjoint() * lambda * y;
            return ConditionYR(layout, y, r, preset_name(preset));
        }
        case ConditionPreset::hinged: {
            Eigen::MatrixXcd y = uniform(VertexSpace::zero, VertexSpace::full);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::clamped: {
            Eigen::MatrixXcd y = uniform(VertexSpace::zero, VertexSpace::zero);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::free_ends: {
            Eigen::MatrixXcd y = uniform(VertexSpace::full, VertexSpace::full);
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
        case ConditionPreset::kiik: {
            // requires a star on 3 edges
            if (g.vertex_count() != 4 || g.edge_count() != 3)
                throw ValidationError("UnsupportedGraphForPreset",
                                      "kiik conditions require a 3-star");
            int center = -1;
            for (int v = 0; v < 4; ++v)
                if (g.degree(v) == 3) center = v;
            if (center < 0)
                throw ValidationError("UnsupportedGraphForPreset",
                                      "kiik conditions require a 3-star");
            const double weights[3] = {std::sin(kiik_params.alpha),
                                       std::sin(kiik_params.beta),
                                       std::sin(kiik_params.gamma)};
            for (double w : weights)
                if (std::abs(w) < 1e-12)
                    throw ValidationError("DegenerateAngle",
                                          "kiik angles must avoid 0 and pi");

            const auto value_local = [&](int v, const std::vector<int>& slots) {
                if (v == center)
                    return local_basis(VertexSpace::ones, 3).cast<Complex>().eval();
                VertexSpace space = kiik_params.outer == OuterKind::sliding
                                        ? VertexSpace::full
                                        : VertexSpace::zero;
                return local_basis(space, static_cast<int>(slots.size()))
                    .cast<Complex>()
                    .eval();
            };
            const auto deriv_local = [&](int v, const std::vector<int>& slots) {
                if (v == center) {
                    // normal derivatives orthogonal to the sine weights;
                    // weight i goes with the i-th incident edge in index order
                    Eigen::MatrixXcd w(1, 3);
                    w << weights[0], weights[1], weights[2];
                    return null_space(w).eval();
                }
                VertexSpace space = kiik_params.outer == OuterKind::hinged
                                        ? VertexSpace::full
                                        : VertexSpace::zero;
                return local_basis(space, static_cast<int>(slots.size()))
                    .cast<Complex>()
                    .eval();
            };
            Eigen::MatrixXcd y =
                product_basis(layout, assemble_half_basis(g, layout, value_local),
                              assemble_half_basis(g, layout, deriv_local));
            return ConditionYR(layout, y, Eigen::MatrixXcd::Zero(y.cols(), y.cols()),
                               preset_name(preset));
        }
    }
    throw ValidationError("UnsupportedGraphForPreset", "unknown preset");
}

ConditionCB yr_to_cb(const ConditionYR& cond) {
    const int n = cond.layout().dim();
    const Eigen::MatrixXcd p_y = cond.y_basis() * cond.y_basis().adjoint();
    const Eigen::MatrixXcd r_hat = cond.r_in_trace_coordinates();
    ConditionCB cb;
    cb.layout = cond.layout();
    cb.c = r_hat + Eigen::MatrixXcd::Identity(n, n) - p_y;
    cb.b = p_y;
    cb.name = cond.name();
    return cb;
}

ConditionYR cb_to_yr(const ConditionCB& cond) {
    const int n = cond.layout.dim();
    if (cond.c.rows() != n || cond.c.cols() != n || cond.b.rows() != n || cond.b.cols() != n)
        throw ValidationError("DimensionMismatch", "C and B must be 4E x 4E");

    Eigen::MatrixXcd cb(n, 2 * n);
    cb << cond.c, cond.b;
    if (numerical_rank(cb, 1e-10) < n)
        throw ValidationError("NotSelfAdjoint", "(C B) does not have maximal rank");
    const Eigen::MatrixXcd cbh = cond.c * cond.b.adjoint();
    const double scale = std::max(max_abs(cbh), 1.0);
    if (hermiticity_defect(cbh) > 1e-10 * scale)
        throw ValidationError("NotSelfAdjoint", "CB* not Hermitian");

    const Eigen::MatrixXcd y = orthonormal_range(Eigen::MatrixXcd(cond.b.adjoint()), 1e-10);
    const Eigen::MatrixXcd q1 = orthonormal_range(cond.b, 1e-10);
    // R = (Q1 B Q)^{-1} Q1^H C restricted to Y, expressed in the Y basis
    Eigen::MatrixXcd r;
    if (y.cols() == 0) {
        r = Eigen::MatrixXcd(0, 0);
    } else {
        const Eigen::MatrixXcd m = q1.adjoint() * cond.b * y;
        r = m.partialPivLu().solve(Eigen::MatrixXcd(q1.adjoint() * cond.c * y));
    }
    return ConditionYR(cond.layout, y, r, cond.name);
}

AdmissibleTraceSpace admissible_trace_space(const ConditionYR& cond) {
    const int n = cond.layout().dim();
    const Eigen::MatrixXcd& y = cond.y_basis();
    const Eigen::MatrixXcd r_hat = cond.r_in_trace_coordinates();
    const Eigen::MatrixXcd y_perp = cond.y_perp_basis();

    Eigen::MatrixXcd span(2 * n, y.cols() + y_perp.cols());
    span.topLeftCorner(n, y.cols()) = y;
    span.bottomLeftCorner(n, y.cols()) = -r_hat * y;
    span.topRightCorner(n, y_perp.cols()).setZero();
    span.bottomRightCorner(n, y_perp.cols()) = y_perp;

    Eigen::MatrixXcd basis = orthonormal_range(span);
    if (basis.cols() != n)
        throw NumericalError("DimensionMismatch",
                             "admissible trace space dimension is not 4E");
    return AdmissibleTraceSpace(std::move(basis));
}

AdmissibleTraceSpace admissible_trace_space(const ConditionCB& cond) {
    const int n = cond.layout.dim();
    Eigen::MatrixXcd cb(n, 2 * n);
    cb << cond.c, cond.b;
    Eigen::MatrixXcd basis = null_space(cb, 1e-10);
    if (basis.cols() != n)
        throw NumericalError("DimensionMismatch",
                             "admissible trace space dimension is not 4E");
    return AdmissibleTraceSpace(std::move(basis));
}

double conditions_angle(const AdmissibleTraceSpace& a, const AdmissibleTraceSpace& b) {
    return largest_principal_angle(a.basis(), b.basis());
}

bool conditions_equal(const ConditionYR& a, const ConditionYR& b) {
    return conditions_angle(admissible_trace_space(a), admissible_trace_space(b)) <=
           kAngleTol;
}

bool conditions_equal(const ConditionYR& a, const ConditionCB& b) {
    return conditions_angle(admissible_trace_space(a), admissible_trace_space(b)) <=
           kAngleTol;
}

}  // namespace bilap
