#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "bilap/graph.hpp"

namespace bilap {

/// Index bookkeeping for the 4E-component trace vectors. For the edge list
/// e_0..e_{E-1} the first trace vector stacks, in blocks of size E,
///   (u(0) | u(l) | -u'(0) | u'(l)),
/// and the second one
///   (-u'''(0) | u'''(l) | -u''(0) | -u''(l));
/// note both second-derivative blocks carry minus signs. The derivative
/// entries of the first vector are exactly the outward normal derivatives.
struct TraceLayout {
    int edge_count = 0;

    int dim() const { return 4 * edge_count; }

    // slots within the 2E-component value (or derivative) half
    int left_slot(int e) const { return e; }
    int right_slot(int e) const { return edge_count + e; }

    // rows of the full 4E trace vector
    int value_row(int e, bool right) const { return right ? edge_count + e : e; }
    int derivative_row(int e, bool right) const {
        return 2 * edge_count + (right ? edge_count + e : e);
    }
    /// Sign with which u' enters the derivative row (-1 on the left
    /// endpoint, +1 on the right): the normal-derivative convention.
    static double derivative_sign(bool right) { return right ? 1.0 : -1.0; }
};

/// Vertex conditions in the subspace form: traces u^{0,1} constrained to Y,
/// with u^{3,2} + R u^{0,1} orthogonal to Y. Y is stored through an
/// orthonormal basis (4E x k) and R as a k x k matrix in that basis.
class ConditionYR {
public:
    ConditionYR(TraceLayout layout, Eigen::MatrixXcd y_basis, Eigen::MatrixXcd r,
                std::string name = "custom");

    const TraceLayout& layout() const { return layout_; }
    const Eigen::MatrixXcd& y_basis() const { return y_basis_; }
    const Eigen::MatrixXcd& r() const { return r_; }
    const std::string& name() const { return name_; }

    int dim_y() const { return static_cast<int>(y_basis_.cols()); }
    /// Orthonormal basis of the orthogonal complement of Y.
    Eigen::MatrixXcd y_perp_basis() const;
    /// R conjugated back into trace coordinates (4E x 4E), zero on Y-perp.
    Eigen::MatrixXcd r_in_trace_coordinates() const;

    bool is_self_adjoint() const { return self_adjoint_; }
    /// Numerical range check Re(Rx, x) <= 0.
    bool is_dissipative() const;

private:
    TraceLayout layout_;
    Eigen::MatrixXcd y_basis_;
    Eigen::MatrixXcd r_;
    std::string name_;
    bool self_adjoint_ = false;
};

/// Vertex conditions in the matrix-pair form C u^{0,1} + B u^{3,2} = 0.
struct ConditionCB {
    TraceLayout layout;
    Eigen::MatrixXcd c;
    Eigen::MatrixXcd b;
    std::string name = "custom";
};

enum class ConditionPreset {
    sliding_kirchhoff,  ///< continuity + Kirchhoff on first derivatives,
                        ///< continuity of u'' + Kirchhoff on u''' (natural)
    cont_deriv,         ///< continuity of values and normal derivatives
    cont_free,          ///< continuity of values only; u'' = 0 at vertices (natural)
    friedrichs,         ///< continuity + all first derivatives vanish
    krein,              ///< continuity, maximal derivative block, nonlocal R
    kiik,               ///< angle-weighted conditions at the center of a 3-star
    hinged,             ///< u = 0 at every vertex slot, u'' = 0 natural
    clamped,            ///< u = 0 and u' = 0 at every vertex slot
    free_ends           ///< no essential conditions
};

const char* preset_name(ConditionPreset preset);
/// Parse a preset name; returns nullopt for unknown names.
std::optional<ConditionPreset> preset_from_name(const std::string& name);

/// Boundary treatment for the degree-1 vertices of the kiik preset.
enum class OuterKind { clamped, hinged, sliding };

struct KiikParams {
    double alpha = M_PI / 2;
    double beta = M_PI / 2;
    double gamma = M_PI / 2;
    OuterKind outer = OuterKind::clamped;
};

/// 2E x V matrix whose column v is the normalized indicator of the
/// endpoint slots incident with vertex v; spans the vertex-wise constant
/// subspace (continuity across vertices).
Eigen::MatrixXd cv_basis(const MetricGraph& graph);

/// Build a named preset on the given metric graph. kiik requires a 3-star
/// and angles away from {0, pi}.
ConditionYR preset_conditions(const MetricGraph& graph, ConditionPreset preset,
                              const KiikParams& kiik_params = {});

/// (Y, R) -> (C, B) with C = R_hat + (I - P_Y), B = P_Y, so that
/// range(B^H) = Y, ker(B) = Y-perp and CB^H = R_hat.
ConditionCB yr_to_cb(const ConditionYR& cond);

/// (C, B) -> (Y, R): Y = range(B^H), R the compression of C through the
/// invertible map between range(B^H) and range(B). Throws NotSelfAdjoint
/// when rank [C B] < 4E or CB^H is not Hermitian.
ConditionYR cb_to_yr(const ConditionCB& cond);

/// Orthonormal basis of the admissible pairs (x, y) in C^{4E} x C^{4E}:
/// x in Y with y + Rx in Y-perp, resp. Cx + By = 0. For valid self-adjoint
/// conditions the dimension is exactly 4E.
class AdmissibleTraceSpace {
public:
    explicit AdmissibleTraceSpace(Eigen::MatrixXcd basis) : basis_(std::move(basis)) {}
    const Eigen::MatrixXcd& basis() const { return basis_; }
    int dim() const { return static_cast<int>(basis_.cols()); }

private:
    Eigen::MatrixXcd basis_;
};

AdmissibleTraceSpace admissible_trace_space(const ConditionYR& cond);
AdmissibleTraceSpace admissible_trace_space(const ConditionCB& cond);

/// Largest principal angle between the two admissible spaces.
double conditions_angle(const AdmissibleTraceSpace& a, const AdmissibleTraceSpace& b);

/// True iff the admissible trace spaces coincide (largest principal angle
/// at most 1e-9).
bool conditions_equal(const ConditionYR& a, const ConditionYR& b);
bool conditions_equal(const ConditionYR& a, const ConditionCB& b);

}  // namespace bilap
