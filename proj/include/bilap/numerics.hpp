#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace bilap {

using Complex = std::complex<double>;

/// Orthonormal basis of the column span of `a`, computed by SVD. Columns
/// with singular value below `rel_tol * sigma_max` are treated as zero.
Eigen::MatrixXcd orthonormal_range(const Eigen::MatrixXcd& a, double rel_tol = 1e-12);

/// Orthonormal basis of the null space of `a` (right singular vectors with
/// singular value below `rel_tol * sigma_max`).
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol = 1e-12);

/// Numerical rank by SVD with relative threshold.
int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol = 1e-12);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns. Computed through sines
/// (sigma_max((I - P1) B2) and symmetrically), which is accurate near 0.
double largest_principal_angle(const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2);

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point Gauss rule applied on
/// `panels` equal subintervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureRule& rule, int panels = 1);

/// Simple least-squares line fit y ~ intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Max-abs entry of a matrix; 0 for empty matrices.
double max_abs(const Eigen::MatrixXcd& m);
double max_abs(const Eigen::MatrixXd& m);

/// Hermiticity defect ||m - m^H||_max.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// Size of the zero cluster of an ascending eigenvalue sequence: values
/// below tau = 1e-7 * max(1, first clearly nonzero value). Throws
/// AmbiguousGap when the cluster is not separated from the rest by a 1e3
/// relative gap.
int zero_cluster_size(const Eigen::VectorXd& ascending_values);

/// Geometric scan + bisection for the last time the scalar signal
/// `min_at(t)` dips below -tol, certified forward to t* + 10/lambda2.
/// Throws NeverPositiveWithinHorizon when no transition is found before
/// the scan horizon or certification fails.
struct TransitionScan {
    double t_star = 0.0;
    bool certified = false;
    std::vector<double> times;
    std::vector<double> min_values;
};
TransitionScan scan_transition(const std::function<double(double)>& min_at,
                               double lambda2, double tol);

}  // namespace bilap
