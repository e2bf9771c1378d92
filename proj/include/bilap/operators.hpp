#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bilap/graph.hpp"
#include "bilap/numerics.hpp"

namespace bilap {

/// Dense real symmetric operator with a cached spectral decomposition
/// (eigenvalues ascending, orthonormal eigenvectors). Construction checks
/// symmetry and the reconstruction error of the decomposition.
class SymmetricOperator {
public:
    explicit SymmetricOperator(Eigen::MatrixXd matrix);

    int size() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

    /// Q exp(-t Lambda) Q^T. Requires t >= 0.
    Eigen::MatrixXd semigroup(double t) const;

    /// e^{-tM} f without forming the full matrix.
    Eigen::VectorXd apply_semigroup(double t, const Eigen::VectorXd& f) const;

private:
    Eigen::MatrixXd matrix_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

/// Discrete Laplacian L = I I^T from the signed incidence matrix.
SymmetricOperator laplacian(const Graph& graph);

/// Integer bi-Laplacian assembled from the closed-form entry rule:
/// diagonal deg^2(v)+deg(v); common-neighbor count minus both degrees on
/// adjacent pairs; plain common-neighbor count otherwise.
Eigen::MatrixXi bilaplacian_closed_form(const Graph& graph);

/// The closed-form bi-Laplacian as a spectral operator.
SymmetricOperator bilaplacian(const Graph& graph);

/// Row-wise generator condition for an l^infty contraction candidate:
/// row v passes iff the off-diagonal absolute sum does not exceed the
/// diagonal entry.
std::vector<bool> linf_generator_row_condition(const Eigen::MatrixXd& m);

/// Joint report of the three properties that characterize complete graphs.
struct MarkovReport {
    bool is_complete = false;
    bool positive_all_t = false;
    bool linf_contractive = false;
    bool consistent = false;  ///< the three flags agree
    double min_entry = 0.0;   ///< most negative semigroup entry over the grid
    double max_row_sup = 0.0; ///< largest row abs sum over the grid
};
MarkovReport markov_character(const Graph& graph, const std::vector<double>& t_grid);

/// kappa = (L f, L |f|^{p-2} f). Entries of f equal to 0 contribute 0 for
/// every p > 1 (continuous extension).
struct DissipativityReport {
    double p = 0.0;
    Eigen::VectorXd f;
    double kappa = 0.0;
    int sign = 0;  ///< -1, 0, +1 with a 1e-14 dead zone
};
DissipativityReport kappa(const Graph& graph, const Eigen::VectorXd& f, double p);

/// Random search plus local refinement for a unit vector f with
/// kappa_f(p) < 0, sweeping the grid in ascending order. A hit is a
/// counterexample to l^p contractivity; absence of a hit proves nothing
/// and is reported as such.
struct ScanResult {
    bool witness_found = false;
    double p = 0.0;
    Eigen::VectorXd witness;
    double kappa = 0.0;
};
ScanResult lp_dissipativity_scan(const Graph& graph, const std::vector<double>& p_grid,
                                 int trials, std::uint64_t seed);

/// lambda_2 of the bi-Laplacian against the path/complete extremal bounds,
/// plus a spectral-mapping cross-check against the squared Laplacian
/// eigenvalues.
struct GapReport {
    double lambda2 = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool within = false;
    double spectral_mapping_error = 0.0;
};
GapReport spectral_gap_bounds_check(const Graph& graph);

/// First time t* after which e^{-t L^2} f0 stays entrywise >= -tol, found
/// by a geometric time scan plus bisection on the last sign change, then
/// certified forward to t* + 10/lambda_2. Requires f0 >= 0, f0 != 0.
TransitionScan discrete_transition_time(const Graph& graph, const Eigen::VectorXd& f0,
                                        double tol = 1e-10);

}  // namespace bilap
