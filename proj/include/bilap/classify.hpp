#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bilap/fem.hpp"
#include "bilap/numerics.hpp"
#include "bilap/operators.hpp"

namespace bilap {

enum class Verdict {
    eventually_irreducible,
    eventually_sub_markovian,
    individually_asymptotically_positive,
    none
};

const char* verdict_name(Verdict v);

/// Qualitative verdict for the semigroup generated by minus a self-adjoint
/// nonnegative operator, decided from its low spectral data:
///   (a) simple lowest eigenvalue with a strictly positive eigenvector
///       gives eventual irreducibility; a constant eigenvector upgrades it
///       to eventually sub-Markovian;
///   (b) otherwise the spectral projector onto the lowest eigenspace is
///       probed on a nonnegative battery: a negative image is a conclusive
///       witness against positivity ("none"), absence of a witness is
///       reported as individually asymptotically positive (sampled check).
struct Classification {
    Verdict verdict = Verdict::none;
    int kernel_dimension = 0;        ///< multiplicity of the lowest eigenvalue cluster
    double lowest_eigenvalue = 0.0;
    double ground_min = 0.0;         ///< extrema of the sign-normalized ground vector
    double ground_max = 0.0;
    bool ground_constant = false;
    bool projector_witness_found = false;
    double projector_min = 0.0;      ///< most negative projected battery value,
                                     ///< relative to its sup norm
};

/// Core decision on point-value spectral data. `mode_values` holds the
/// values of the j-th eigenvector at the sample points in column j; the
/// projector applier maps a battery vector of point values to the point
/// values of its projection onto the span of the first `cluster` modes.
Classification classify_spectral(
    const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& mode_values,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, int cluster)>& project,
    double tol = 1e-6);

/// Discrete operator front end (mass = identity).
Classification classify(const SymmetricOperator& op, double tol = 1e-6);

/// FEM front end: pointwise checks at mesh nodes, M-weighted projector.
Classification classify(const ReducedSystem& system, double tol = 1e-6);

/// Positivity transition time of the FEM evolution from nonnegative
/// nodal data f0 (min nodal value scan + bisection + forward
/// certification).
TransitionScan transition_time(const ReducedSystem& system, const EdgeFunction& f0,
                               double tol = 1e-8);

/// Least-squares decay rate rho of ||u(t) - mean||, fitted on
/// log-distance against time. Requires at least one decade of decay.
double convergence_rate_fit(const std::vector<double>& times,
                            const std::vector<double>& distances);
double convergence_rate_fit(const Trajectory& trajectory);

/// Log-log slope of the heat-kernel sup bound over [t_lo, t_hi].
double ultracontractivity_slope(const ReducedSystem& system, double t_lo, double t_hi,
                                int samples = 9);

/// Closed-form test function on a metric graph, with derivatives.
struct SmoothFunction {
    EdgeFunction value;
    EdgeFunction derivative;
    EdgeFunction second_derivative;
    std::string label;
};

/// Residual |a(u, |u|u) - 2 int |u| (u'')^2| / scale with both sides
/// evaluated by quadrature split at the zeros of u. Requires u' = 0 at all
/// edge endpoints (within 1e-10). The two sides agree whenever u has no
/// interior zero with nonvanishing slope.
double dissipativity_identity_probe(const MetricGraph& graph, const SmoothFunction& u,
                                    double p = 3.0);

/// Deterministic battery of 20 smooth single-interval functions with
/// u' = 0 at both endpoints and no transversal interior zeros.
std::vector<SmoothFunction> probe_battery(std::uint64_t seed = 42);

}  // namespace bilap
