#include "bilap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bilap/errors.hpp"
#include "bilap/numerics.hpp"

namespace bilap {

namespace {

constexpr double kPositivityTol = 1e-10;

Eigen::VectorXd signed_power(const Eigen::VectorXd& f, double p) {
    // |f|^{p-2} f, extended by 0 where f vanishes (valid for p > 1)
    Eigen::VectorXd g(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double v = f(i);
        g(i) = v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), p - 1.0), v);
    }
    return g;
}

}  // namespace

SymmetricOperator::SymmetricOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
        throw ValidationError("NotSquare", "operator matrix must be square");
    const double scale = std::max(max_abs(matrix_), 1e-300);
    if (max_abs(Eigen::MatrixXd(matrix_ - matrix_.transpose())) > 1e-12 * scale)
        throw ValidationError("NotSymmetric", "matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
    if (solver.info() != Eigen::Success)
        throw NumericalError("SolverFailure", "eigendecomposition failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    const Eigen::MatrixXd rebuilt =
        eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
    if (max_abs(Eigen::MatrixXd(rebuilt - matrix_)) > 1e-9 * scale)
        throw NumericalError("SolverFailure", "spectral reconstruction error too large");
}

Eigen::MatrixXd SymmetricOperator::semigroup(double t) const {
    if (t < 0.0) throw ValidationError("NegativeTime", "semigroup time must be >= 0");
    const Eigen::VectorXd decay = (-t * eigenvalues_.array()).exp();
    return eigenvectors_ * decay.asDiagonal() * eigenvectors_.transpose();
}

Eigen::VectorXd SymmetricOperator::apply_semigroup(double t, const Eigen::VectorXd& f) const {
    if (t < 0.0) throw ValidationError("NegativeTime", "semigroup time must be >= 0");
    const Eigen::VectorXd coeffs = eigenvectors_.transpose() * f;
    const Eigen::VectorXd decay = (-t * eigenvalues_.array()).exp();
    return eigenvectors_ * (decay.array() * coeffs.array()).matrix();
}

SymmetricOperator laplacian(const Graph& graph) {
    const Eigen::MatrixXd inc = graph.incidence_matrix().cast<double>();
    return SymmetricOperator(inc * inc.transpose());
}

Eigen::MatrixXi bilaplacian_closed_form(const Graph& graph) {
    const int n = graph.vertex_count();
    Eigen::MatrixXi m(n, n);
    for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
            if (v == w) {
                const int d = graph.degree(v);
                m(v, w) = d * d + d;
            } else if (graph.adjacent(v, w)) {
                m(v, w) = graph.common_neighbors(v, w) - graph.degree(v) - graph.degree(w);
            } else {
                m(v, w) = graph.common_neighbors(v, w);
            }
        }
    }
    return m;
}

SymmetricOperator bilaplacian(const Graph& graph) {
    return SymmetricOperator(bilaplacian_closed_form(graph).cast<double>());
}

std::vector<bool> linf_generator_row_condition(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw ValidationError("NotSquare", "row condition needs a square matrix");
    std::vector<bool> pass(m.rows());
    for (Eigen::Index v = 0; v < m.rows(); ++v) {
        double off = 0.0;
        for (Eigen::Index z = 0; z < m.cols(); ++z)
            if (z != v) off += std::abs(m(v, z));
        pass[v] = -m(v, v) + off <= 0.0;
    }
    return pass;
}

MarkovReport markov_character(const Graph& graph, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw ValidationError("EmptyGrid", "time grid must be nonempty");
    for (double t : t_grid)
        if (!(t > 0.0)) throw ValidationError("EmptyGrid", "time grid must be positive");

    MarkovReport report;
    report.is_complete = graph.is_complete();

    const SymmetricOperator op = bilaplacian(graph);
    const auto row_ok = linf_generator_row_condition(op.matrix());
    const bool rows_pass = std::all_of(row_ok.begin(), row_ok.end(), [](bool b) { return b; });

    double min_entry = std::numeric_limits<double>::infinity();
    double max_row_sup = 0.0;
    for (double t : t_grid) {
        const Eigen::MatrixXd s = op.semigroup(t);
        min_entry = std::min(min_entry, s.minCoeff());
        max_row_sup = std::max(max_row_sup, s.cwiseAbs().rowwise().sum().maxCoeff());
    }
    report.min_entry = min_entry;
    report.max_row_sup = max_row_sup;
    report.positive_all_t = min_entry >= -kPositivityTol;
    report.linf_contractive = rows_pass && max_row_sup <= 1.0 + kPositivityTol;
    report.consistent = (report.is_complete == report.positive_all_t) &&
                        (report.is_complete == report.linf_contractive);
    return report;
}

DissipativityReport kappa(const Graph& graph, const Eigen::VectorXd& f, double p) {
    if (!(p > 1.0)) throw ValidationError("InvalidExponent", "kappa requires p > 1");
    if (f.size() != graph.vertex_count())
        throw ValidationError("IndexOutOfRange", "f must have one entry per vertex");
    const Eigen::MatrixXd lap = laplacian(graph).matrix();
    DissipativityReport report;
    report.p = p;
    report.f = f;
    report.kappa = (lap * f).dot(lap * signed_power(f, p));
    report.sign = report.kappa > 1e-14 ? 1 : (report.kappa < -1e-14 ? -1 : 0);
    return report;
}

ScanResult lp_dissipativity_scan(const Graph& graph, const std::vector<double>& p_grid,
                                 int trials, std::uint64_t seed) {
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > 2.0))
            throw ValidationError("InvalidExponent", "p grid must lie in (2, inf)");
        if (i > 0 && p_grid[i] <= p_grid[i - 1])
            throw ValidationError("InvalidExponent", "p grid must be ascending");
    }
    if (trials < 1) throw ValidationError("InvalidExponent", "trials must be >= 1");

    const int n = graph.vertex_count();
    const Eigen::MatrixXd lap = laplacian(graph).matrix();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto kappa_of = [&](const Eigen::VectorXd& f, double p) {
        return (lap * f).dot(lap * signed_power(f, p));
    };

    ScanResult result;
    for (double p : p_grid) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_f;
        for (int trial = 0; trial < trials; ++trial) {
            Eigen::VectorXd f(n);
            for (int i = 0; i < n; ++i) f(i) = gauss(rng);
            if (f.norm() == 0.0) continue;
            f.normalize();
            double value = kappa_of(f, p);
            // coordinate-descent refinement on the unit sphere
            double step = 0.25;
            for (int sweep = 0; sweep < 60 && step > 1e-6; ++sweep) {
                bool improved = false;
                for (int i = 0; i < n; ++i) {
                    for (double dir : {+1.0, -1.0}) {
                        Eigen::VectorXd cand = f;
                        cand(i) += dir * step;
                        cand.normalize();
                        const double cv = kappa_of(cand, p);
                        if (cv < value) {
                            value = cv;
                            f = cand;
                            improved = true;
                        }
                    }
                }
                if (!improved) step *= 0.5;
            }
            if (value < best) {
                best = value;
                best_f = f;
            }
            if (best < -1e-12) break;
        }
        if (best < -1e-12) {
            result.witness_found = true;
            result.p = p;
            result.witness = best_f;
            result.kappa = best;
            return result;
        }
    }
    return result;
}

GapReport spectral_gap_bounds_check(const Graph& graph) {
    const int v = graph.vertex_count();
    const SymmetricOperator lap = laplacian(graph);
    const SymmetricOperator bil = bilaplacian(graph);

    GapReport report;
    report.lambda2 = v >= 2 ? bil.eigenvalues()(1) : 0.0;
    const double c = 1.0 - std::cos(M_PI / v);
    report.lower = 4.0 * c * c;
    report.upper = static_cast<double>(v) * v;
    report.within = report.lower - 1e-9 <= report.lambda2 &&
                    report.lambda2 <= report.upper + 1e-9;

    Eigen::VectorXd squares = lap.eigenvalues().array().square();
    std::sort(squares.data(), squares.data() + squares.size());
    report.spectral_mapping_error = (squares - bil.eigenvalues()).cwiseAbs().maxCoeff();
    return report;
}

TransitionScan discrete_transition_time(const Graph& graph, const Eigen::VectorXd& f0,
                                        double tol) {
    if (f0.size() != graph.vertex_count())
        throw ValidationError("IndexOutOfRange", "f0 must have one entry per vertex");
    if (f0.minCoeff() < 0.0)
        throw ValidationError("NotApplicable", "f0 must be entrywise nonnegative");
    if (f0.maxCoeff() <= 0.0)
        throw ValidationError("NotApplicable", "f0 must be nonzero");

    const SymmetricOperator op = bilaplacian(graph);
    const double lambda2 = op.size() >= 2 ? op.eigenvalues()(1) : 1.0;
    const auto min_at = [&](double t) { return op.apply_semigroup(t, f0).minCoeff(); };
    return scan_transition(min_at, lambda2, tol);
}

}  // namespace bilap
