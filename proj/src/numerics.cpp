#include "bilap/numerics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXcd> thin_svd(const Eigen::MatrixXcd& a) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
}

}  // namespace

Eigen::MatrixXcd orthonormal_range(const Eigen::MatrixXcd& a, double rel_tol) {
    if (a.cols() == 0 || a.rows() == 0) return Eigen::MatrixXcd(a.rows(), 0);
    auto svd = thin_svd(a);
    const auto& sigma = svd.singularValues();
    const double cut = sigma.size() > 0 ? sigma(0) * rel_tol : 0.0;
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cut && sigma(rank) > 0.0) ++rank;
    return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol) {
    if (a.rows() == 0) return Eigen::MatrixXcd::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double cut = sigma.size() > 0 ? sigma(0) * rel_tol : 0.0;
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cut && sigma(rank) > 0.0) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& sigma = svd.singularValues();
    const double cut = sigma(0) * rel_tol;
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cut && sigma(rank) > 0.0) ++rank;
    return rank;
}

double largest_principal_angle(const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2) {
    if (b1.cols() == 0 && b2.cols() == 0) return 0.0;
    if (b1.cols() == 0 || b2.cols() == 0) return std::asin(1.0);
    // sin of the largest angle from span(b1) to span(b2) and back; the max
    // of the two handles unequal dimensions.
    const Eigen::MatrixXcd r1 = b2 - b1 * (b1.adjoint() * b2);
    const Eigen::MatrixXcd r2 = b1 - b2 * (b2.adjoint() * b1);
    Eigen::JacobiSVD<Eigen::MatrixXcd> s1(r1), s2(r2);
    double smax = std::max(s1.singularValues()(0), s2.singularValues()(0));
    smax = std::min(smax, 1.0);
    return std::asin(smax);
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    // Newton iteration on Legendre polynomials, nodes on [-1, 1], then map
    // to [0, 1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.points[i] = 0.5 * (1.0 - x);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureRule& rule, int panels) {
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double left = a + p * h;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            total += rule.weights[q] * h * f(left + rule.points[q] * h);
        }
    }
    return total;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

double max_abs(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double max_abs(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    return max_abs(Eigen::MatrixXcd(m - m.adjoint()));
}

int zero_cluster_size(const Eigen::VectorXd& ascending_values) {
    const Eigen::VectorXd& vals = ascending_values;
    const int m = static_cast<int>(vals.size());
    int k = 0;
    while (k < m && vals(k) < 1e-7) ++k;
    if (k < m) {
        const double tau = 1e-7 * std::max(1.0, vals(k));
        k = 0;
        while (k < m && vals(k) < tau) ++k;
    }
    if (k > 0 && k < m) {
        const double top = std::max(vals(k - 1), 0.0);
        if (top > vals(k) / 1e3)
            throw NumericalError("AmbiguousGap",
                                 "no 1e3 relative gap between the zero cluster and the "
                                 "rest of the spectrum");
    }
    return k;
}

TransitionScan scan_transition(const std::function<double(double)>& min_at,
                               double lambda2, double tol) {
    if (!(tol > 0.0))
        throw ValidationError("NotApplicable", "tolerance must be positive");
    lambda2 = std::max(lambda2, 1e-12);

    TransitionScan scan;
    const double t_min = 1e-6 / lambda2;
    const double t_max = 50.0 / lambda2;
    const int samples = 240;
    int last_negative = -1;
    for (int i = 0; i < samples; ++i) {
        const double t =
            t_min * std::pow(t_max / t_min, static_cast<double>(i) / (samples - 1));
        const double m = min_at(t);
        scan.times.push_back(t);
        scan.min_values.push_back(m);
        if (m < -tol) last_negative = i;
    }
    if (last_negative == samples - 1)
        throw NumericalError("NeverPositiveWithinHorizon",
                             "solution still has negative values at the scan horizon");

    double t_star = 0.0;
    if (last_negative >= 0) {
        double lo = scan.times[last_negative];
        double hi = scan.times[last_negative + 1];
        while ((hi - lo) > 1e-3 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (min_at(mid) < -tol)
                lo = mid;
            else
                hi = mid;
        }
        t_star = hi;
    }
    scan.t_star = t_star;

    scan.certified = true;
    const double horizon = t_star + 10.0 / lambda2;
    for (int i = 0; i <= 200; ++i) {
        const double t = t_star + (horizon - t_star) * i / 200.0;
        if (t > 0.0 && min_at(t) < -tol) {
            scan.certified = false;
            break;
        }
    }
    if (!scan.certified)
        throw NumericalError("NeverPositiveWithinHorizon",
                             "negative values reappear after the detected transition");
    return scan;
}

}  // namespace bilap
