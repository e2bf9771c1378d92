#include "bilap/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bilap/errors.hpp"

namespace bilap {

namespace {

constexpr double kConstantVariation = 1e-8;

/// Nonnegative battery of point-value test vectors: all-ones, strided
/// indicators, seeded random uniforms.
std::vector<Eigen::VectorXd> positivity_battery(int points) {
    std::vector<Eigen::VectorXd> battery;
    battery.push_back(Eigen::VectorXd::Ones(points));
    const int stride = std::max(1, points / 64);
    for (int i = 0; i < points; i += stride) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(points);
        e(i) = 1.0;
        battery.push_back(e);
    }
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int r = 0; r < 16; ++r) {
        Eigen::VectorXd f(points);
        for (int i = 0; i < points; ++i) f(i) = uniform(rng);
        battery.push_back(f);
    }
    return battery;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::eventually_irreducible: return "eventually_irreducible";
        case Verdict::eventually_sub_markovian: return "eventually_sub_markovian";
        case Verdict::individually_asymptotically_positive:
            return "individually_asymptotically_positive";
        case Verdict::none: return "none";
    }
    return "none";
}

Classification classify_spectral(
    const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& mode_values,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, int cluster)>& project,
    double tol) {
    const int modes = static_cast<int>(eigenvalues.size());
    if (modes < 1) throw ValidationError("InsufficientModes", "no spectral data");

    Classification result;
    result.lowest_eigenvalue = eigenvalues(0);
    const Eigen::VectorXd shifted = eigenvalues.array() - eigenvalues(0);
    const int cluster = zero_cluster_size(shifted);
    result.kernel_dimension = cluster;
    if (cluster >= modes)
        throw ValidationError("InsufficientModes",
                              "need at least one mode beyond the lowest cluster");

    if (cluster == 1) {
        Eigen::VectorXd ground = mode_values.col(0);
        Eigen::Index peak;
        ground.cwiseAbs().maxCoeff(&peak);
        if (ground(peak) < 0.0) ground = -ground;
        result.ground_min = ground.minCoeff();
        result.ground_max = ground.maxCoeff();
        result.ground_constant =
            (result.ground_max - result.ground_min) <= kConstantVariation * result.ground_max;
        if (result.ground_min >= tol * result.ground_max) {
            result.verdict = result.ground_constant ? Verdict::eventually_sub_markovian
                                                    : Verdict::eventually_irreducible;
            return result;
        }
        if (result.ground_min > -tol * result.ground_max)
            throw NumericalError("AmbiguousSign",
                                 "ground eigenvector has near-zero entries inside the "
                                 "sign tolerance band");
        // strictly sign-changing ground vector: fall through to the
        // projector probe, which will produce a witness
    }

    double worst = 0.0;
    for (const Eigen::VectorXd& f : positivity_battery(static_cast<int>(mode_values.rows()))) {
        const Eigen::VectorXd p = project(f, cluster);
        const double sup = std::max(p.cwiseAbs().maxCoeff(), 1e-12);
        worst = std::min(worst, p.minCoeff() / sup);
        if (p.minCoeff() < -tol * sup) {
            result.projector_witness_found = true;
            result.projector_min = p.minCoeff() / sup;
            result.verdict = Verdict::none;
            return result;
        }
    }
    result.projector_min = worst;
    result.verdict = Verdict::individually_asymptotically_positive;
    return result;
}

Classification classify(const SymmetricOperator& op, double tol) {
    const Eigen::MatrixXd& vectors = op.eigenvectors();
    const auto project = [&](const Eigen::VectorXd& f, int cluster) {
        const Eigen::MatrixXd phi = vectors.leftCols(cluster);
        return Eigen::VectorXd(phi * (phi.transpose() * f));
    };
    return classify_spectral(op.eigenvalues(), vectors, project, tol);
}

Classification classify(const ReducedSystem& system, double tol) {
    if (!system.is_real())
        throw ValidationError("NotApplicable",
                              "positivity classification needs a real semigroup");
    const EigenDecomposition& dec = system.eigen();
    const int nodes = system.dofs().total_nodes();
    const int modes = system.reduced_dim();
    Eigen::MatrixXd values(nodes, modes);
    for (int j = 0; j < modes; ++j)
        values.col(j) = system.nodal_values(
            system.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(j))));

    const auto project = [&](const Eigen::VectorXd& f, int cluster) {
        const Eigen::VectorXcd f_red = system.project_nodal(f);
        const Eigen::MatrixXcd phi = dec.vectors.leftCols(cluster);
        const Eigen::VectorXcd coeffs = phi.adjoint() * (system.m_reduced() * f_red);
        return Eigen::VectorXd(values.leftCols(cluster) * coeffs.real());
    };
    return classify_spectral(dec.values, values, project, tol);
}

TransitionScan transition_time(const ReducedSystem& system, const EdgeFunction& f0,
                               double tol) {
    if (!system.is_real())
        throw ValidationError("NotApplicable",
                              "positivity analysis needs a real semigroup");
    const EigenDecomposition& dec = system.eigen();
    const Eigen::VectorXcd f_red = system.project(f0);
    const Eigen::VectorXcd coeffs = dec.vectors.adjoint() * (system.m_reduced() * f_red);

    const int nodes = system.dofs().total_nodes();
    Eigen::MatrixXd values(nodes, system.reduced_dim());
    for (int j = 0; j < system.reduced_dim(); ++j)
        values.col(j) = system.nodal_values(
            system.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(j))));

    const Eigen::VectorXd shifted = dec.values.array() - dec.values(0);
    const int cluster = zero_cluster_size(shifted);
    const double lambda2 = cluster < dec.values.size() ? shifted(cluster) : 1.0;

    const auto min_at = [&](double t) {
        Eigen::VectorXcd scaled = coeffs;
        for (int j = 0; j < scaled.size(); ++j)
            scaled(j) *= std::exp(-dec.values(j) * t);
        return (values * scaled.real()).minCoeff();
    };
    return scan_transition(min_at, lambda2, tol);
}

double convergence_rate_fit(const std::vector<double>& times,
                            const std::vector<double>& distances) {
    if (times.size() != distances.size() || times.size() < 3)
        throw ValidationError("InsufficientDecay", "need at least three samples");
    std::vector<double> t, logd;
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (distances[i] <= 0.0) continue;
        t.push_back(times[i]);
        logd.push_back(std::log(distances[i]));
        dmax = std::max(dmax, distances[i]);
        dmin = std::min(dmin, distances[i]);
    }
    if (t.size() < 3 || dmax < 10.0 * dmin)
        throw NumericalError("InsufficientDecay",
                             "trajectory does not span a decade of decay");
    return -fit_line(t, logd).slope;
}

double convergence_rate_fit(const Trajectory& trajectory) {
    return convergence_rate_fit(trajectory.times, trajectory.distance_to_mean);
}

double ultracontractivity_slope(const ReducedSystem& system, double t_lo, double t_hi,
                                int samples) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw ValidationError("NonpositiveTime", "need 0 < t_lo < t_hi");
    std::vector<double> logt, logb;
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (samples - 1));
        logt.push_back(std::log(t));
        logb.push_back(std::log(kernel_sup_bound(system, t)));
    }
    return fit_line(logt, logb).slope;
}

namespace {

/// Zeros of u on one edge: sign-change bisection over a fine scan grid.
std::vector<double> edge_zeros(const SmoothFunction& u, int e, double len) {
    std::vector<double> zeros;
    const int scan = 4096;
    double prev_x = 0.0;
    double prev_v = u.value(e, 0.0);
    for (int i = 1; i <= scan; ++i) {
        const double x = len * i / scan;
        const double v = u.value(e, x);
        if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
            double lo = prev_x, hi = x, vlo = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = u.value(e, mid);
                if ((vlo < 0.0) == (vm < 0.0)) {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    return zeros;
}

}  // namespace

double dissipativity_identity_probe(const MetricGraph& graph, const SmoothFunction& u,
                                    double p) {
    if (std::abs(p - 3.0) > 1e-12)
        throw ValidationError("InvalidExponent", "the probe identity is specific to p = 3");
    for (int e = 0; e < graph.edge_count(); ++e) {
        if (std::abs(u.derivative(e, 0.0)) > 1e-10 ||
            std::abs(u.derivative(e, graph.length(e))) > 1e-10)
            throw ValidationError("BoundaryConditionViolated",
                                  "u' must vanish at all edge endpoints");
    }

    const QuadratureRule rule = gauss_legendre(64);
    double lhs = 0.0, rhs = 0.0;
    for (int e = 0; e < graph.edge_count(); ++e) {
        const double len = graph.length(e);
        std::vector<double> cuts{0.0};
        for (double z : edge_zeros(u, e, len)) cuts.push_back(z);
        cuts.push_back(len);
        std::sort(cuts.begin(), cuts.end());

        const auto lhs_integrand = [&](double x) {
            const double v = u.value(e, x);
            const double dv = u.derivative(e, x);
            const double d2v = u.second_derivative(e, x);
            const double s = v >= 0.0 ? 1.0 : -1.0;
            return d2v * (2.0 * std::abs(v) * d2v + 2.0 * s * dv * dv);
        };
        const auto rhs_integrand = [&](double x) {
            const double v = u.value(e, x);
            const double d2v = u.second_derivative(e, x);
            return 2.0 * std::abs(v) * d2v * d2v;
        };
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const int panels = std::max(4, static_cast<int>(
                                               16.0 * (cuts[i + 1] - cuts[i]) / len) +
                                               1);
            lhs += integrate(lhs_integrand, cuts[i], cuts[i + 1], rule, panels);
            rhs += integrate(rhs_integrand, cuts[i], cuts[i + 1], rule, panels);
        }
    }
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

std::vector<SmoothFunction> probe_battery(std::uint64_t seed) {
    std::vector<SmoothFunction> fns;
    const double pi = M_PI;

    fns.push_back({[](int, double) { return 1.0; }, [](int, double) { return 0.0; },
                   [](int, double) { return 0.0; }, "constant"});
    fns.push_back({[=](int, double x) { return 2.0 + std::cos(pi * x); },
                   [=](int, double x) { return -pi * std::sin(pi * x); },
                   [=](int, double x) { return -pi * pi * std::cos(pi * x); },
                   "2+cos(pi x)"});
    fns.push_back({[=](int, double x) { return 2.0 + std::cos(2 * pi * x); },
                   [=](int, double x) { return -2 * pi * std::sin(2 * pi * x); },
                   [=](int, double x) { return -4 * pi * pi * std::cos(2 * pi * x); },
                   "2+cos(2pi x)"});
    fns.push_back({[=](int, double x) { return 1.0 - std::cos(2 * pi * x); },
                   [=](int, double x) { return 2 * pi * std::sin(2 * pi * x); },
                   [=](int, double x) { return 4 * pi * pi * std::cos(2 * pi * x); },
                   "1-cos(2pi x)"});
    fns.push_back({[](int, double x) { return x * x * (1 - x) * (1 - x) + 0.1; },
                   [](int, double x) { return 2 * x * (1 - x) * (1 - 2 * x); },
                   [](int, double x) { return 2 - 12 * x + 12 * x * x; },
                   "x^2(1-x)^2+0.1"});
    fns.push_back({[](int, double x) { return x * x * (1 - x) * (1 - x); },
                   [](int, double x) { return 2 * x * (1 - x) * (1 - 2 * x); },
                   [](int, double x) { return 2 - 12 * x + 12 * x * x; },
                   "x^2(1-x)^2"});
    // sign-changing with a flat interior zero: the identity's hypotheses
    // still hold because u' vanishes where u does
    fns.push_back(
        {[](int, double x) {
             const double w = x * x * (1 - x) * (1 - x), g = std::pow(x - 0.5, 3);
             return g * w;
         },
         [](int, double x) {
             const double w = x * x * (1 - x) * (1 - x);
             const double dw = 2 * x * (1 - x) * (1 - 2 * x);
             return 3 * std::pow(x - 0.5, 2) * w + std::pow(x - 0.5, 3) * dw;
         },
         [](int, double x) {
             const double w = x * x * (1 - x) * (1 - x);
             const double dw = 2 * x * (1 - x) * (1 - 2 * x);
             const double d2w = 2 - 12 * x + 12 * x * x;
             return 6 * (x - 0.5) * w + 6 * std::pow(x - 0.5, 2) * dw +
                    std::pow(x - 0.5, 3) * d2w;
         },
         "(x-1/2)^3 x^2(1-x)^2"});
    fns.push_back({[=](int, double x) { return std::exp(std::cos(pi * x)); },
                   [=](int, double x) {
                       return -pi * std::sin(pi * x) * std::exp(std::cos(pi * x));
                   },
                   [=](int, double x) {
                       const double c = std::cos(pi * x), s = std::sin(pi * x);
                       return pi * pi * (s * s - c) * std::exp(c);
                   },
                   "exp(cos(pi x))"});
    fns.push_back({[=](int, double x) { return 1.0 / (2.0 + std::cos(2 * pi * x)); },
                   [=](int, double x) {
                       const double d = 2.0 + std::cos(2 * pi * x);
                       return 2 * pi * std::sin(2 * pi * x) / (d * d);
                   },
                   [=](int, double x) {
                       const double d = 2.0 + std::cos(2 * pi * x);
                       const double s = std::sin(2 * pi * x);
                       return 4 * pi * pi * std::cos(2 * pi * x) / (d * d) +
                              8 * pi * pi * s * s / (d * d * d);
                   },
                   "1/(2+cos(2pi x))"});
    fns.push_back({[=](int, double x) { return 0.5 * (1.0 + std::cos(2 * pi * x)); },
                   [=](int, double x) { return -pi * std::sin(2 * pi * x); },
                   [=](int, double x) { return -2 * pi * pi * std::cos(2 * pi * x); },
                   "cos^2(pi x)"});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    while (fns.size() < 20) {
        std::vector<double> a(4);
        double shift = 0.1;
        for (double& c : a) {
            c = uniform(rng);
            shift += std::abs(c);
        }
        fns.push_back(
            {[=](int, double x) {
                 double v = shift;
                 for (int k = 1; k <= 4; ++k) v += a[k - 1] * std::cos(k * pi * x);
                 return v;
             },
             [=](int, double x) {
                 double v = 0.0;
                 for (int k = 1; k <= 4; ++k) v -= a[k - 1] * k * pi * std::sin(k * pi * x);
                 return v;
             },
             [=](int, double x) {
                 double v = 0.0;
                 for (int k = 1; k <= 4; ++k)
                     v -= a[k - 1] * k * k * pi * pi * std::cos(k * pi * x);
                 return v;
             },
             "random positive cosine series " + std::to_string(fns.size() - 9)});
    }
    return fns;
}

}  // namespace bilap
