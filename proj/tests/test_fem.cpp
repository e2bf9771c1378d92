#include <doctest.h>

#include <cmath>

#include "bilap/classify.hpp"
#include "bilap/errors.hpp"
#include "bilap/fem.hpp"
#include "bilap/numerics.hpp"

using namespace bilap;

namespace {

const double kPi4 = std::pow(M_PI, 4);

MetricGraph interval() { return equilateral(preset_graph(GraphKind::path, 2)); }
MetricGraph star3() { return equilateral(preset_graph(GraphKind::star, 3)); }

ReducedSystem assemble_preset(const MetricGraph& g, ConditionPreset preset, int n) {
    return assemble(g, Mesh::uniform(g, n), preset_conditions(g, preset));
}

}  // namespace

TEST_CASE("hermite element matrices against a quadrature oracle") {
    const double h = 0.37;
    const auto [k, m] = hermite_element_matrices(h);

    // cubic shape functions on [0, 1] in the reference coordinate
    const auto shape = [&](int i, double xi) {
        switch (i) {
            case 0: return 1.0 - 3.0 * xi * xi + 2.0 * xi * xi * xi;
            case 1: return h * (xi - 2.0 * xi * xi + xi * xi * xi);
            case 2: return 3.0 * xi * xi - 2.0 * xi * xi * xi;
            default: return h * (xi * xi * xi - xi * xi);
        }
    };
    const auto shape_dd = [&](int i, double xi) {
        switch (i) {
            case 0: return (-6.0 + 12.0 * xi) / (h * h);
            case 1: return (-4.0 + 6.0 * xi) / h;
            case 2: return (6.0 - 12.0 * xi) / (h * h);
            default: return (6.0 * xi - 2.0) / h;
        }
    };
    const QuadratureRule rule = gauss_legendre(5);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double kij = integrate(
                [&](double xi) { return shape_dd(i, xi) * shape_dd(j, xi) * h; }, 0.0, 1.0,
                rule);
            const double mij = integrate(
                [&](double xi) { return shape(i, xi) * shape(j, xi) * h; }, 0.0, 1.0, rule);
            CHECK(k(i, j) == doctest::Approx(kij).epsilon(1e-12));
            CHECK(m(i, j) == doctest::Approx(mij).epsilon(1e-12));
        }
    }

    // affine functions carry no bending energy
    Eigen::Vector4d constant(1.0, 0.0, 1.0, 0.0);
    Eigen::Vector4d ramp(0.0, 1.0, h, 1.0);
    CHECK((k * constant).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((k * ramp).cwiseAbs().maxCoeff() <= 1e-12);

    // value-slot entries of M * (1,0,1,0) integrate the constant: total h
    const Eigen::Vector4d mass = m * constant;
    CHECK(mass(0) + mass(2) == doctest::Approx(h).epsilon(1e-13));

    CHECK_THROWS_AS(hermite_element_matrices(0.0), ValidationError);
    CHECK_THROWS_AS(hermite_element_matrices(-1.0), ValidationError);
}

TEST_CASE("reduced dimensions count the constraints") {
    const MetricGraph star = star3();
    const int n = 3;
    const int dofs = 3 * 2 * (n + 1);
    // cont_free: 4E - dim Y = 12 - 10 = 2 constraints
    CHECK(assemble_preset(star, ConditionPreset::cont_free, n).reduced_dim() == dofs - 2);
    // friedrichs: 12 - 4 = 8 constraints
    CHECK(assemble_preset(star, ConditionPreset::friedrichs, n).reduced_dim() == dofs - 8);

    const MetricGraph single = interval();
    const int sdofs = 2 * (n + 1);
    CHECK(assemble_preset(single, ConditionPreset::friedrichs, n).reduced_dim() ==
          sdofs - 2);

    // conditions built for another edge count are rejected
    const ConditionYR wrong = preset_conditions(single, ConditionPreset::friedrichs);
    CHECK_THROWS_AS(assemble(star, Mesh::uniform(star, 2), wrong), ValidationError);

    // the assembly path is self-adjoint only
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(4, 1);
    y(0, 0) = 1.0;
    Eigen::MatrixXcd r(1, 1);
    r << Complex(0.0, 1.0);
    const ConditionYR skew(TraceLayout{1}, y, r);
    CHECK_THROWS_AS(assemble(single, Mesh::uniform(single, 2), skew), ValidationError);
}

TEST_CASE("reduced matrices stay hermitian and krein stays nonnegative") {
    const MetricGraph star(preset_graph(GraphKind::star, 3), {0.8, 1.0, 1.4});
    for (ConditionPreset p :
         {ConditionPreset::sliding_kirchhoff, ConditionPreset::cont_deriv,
          ConditionPreset::cont_free, ConditionPreset::friedrichs,
          ConditionPreset::krein}) {
        const ReducedSystem sys = assemble(star, Mesh::uniform(star, 4),
                                           preset_conditions(star, p));
        const double k_scale = std::max(max_abs(sys.k_reduced()), 1.0);
        CHECK(hermiticity_defect(sys.k_reduced()) <= 1e-10 * k_scale);
        CHECK(hermiticity_defect(sys.m_reduced()) <= 1e-10);
        const double lambda1 = sys.eigen().values(0);
        CHECK(lambda1 >= -1e-8 * k_scale);
    }
}

TEST_CASE("interval spectra") {
    const MetricGraph single = interval();
    const ReducedSystem sliding = assemble_preset(single, ConditionPreset::friedrichs, 32);
    CHECK(kernel_dimension(sliding) == 1);
    const EigenDecomposition se = eigensolve(sliding, 3);
    CHECK(se.values(1) == doctest::Approx(kPi4).epsilon(1e-3));
    CHECK(se.values(2) == doctest::Approx(16 * kPi4).epsilon(1e-3));

    const ReducedSystem hinged = assemble_preset(single, ConditionPreset::hinged, 32);
    CHECK(kernel_dimension(hinged) == 0);
    const EigenDecomposition he = eigensolve(hinged, 2);
    CHECK(he.values(0) == doctest::Approx(kPi4).epsilon(1e-3));
    CHECK(he.values(1) == doctest::Approx(16 * kPi4).epsilon(1e-3));

    // clamped interval: lowest mode of the clamped beam, no kernel
    const ReducedSystem clamped = assemble_preset(single, ConditionPreset::clamped, 32);
    CHECK(kernel_dimension(clamped) == 0);

    CHECK_THROWS_AS(eigensolve(sliding, sliding.reduced_dim() + 1), ValidationError);
    CHECK_THROWS_AS(eigensolve(sliding, 0), ValidationError);
}

TEST_CASE("mesh refinement converges at fourth order") {
    const MetricGraph single = interval();
    double previous_error = -1.0;
    for (int n : {4, 8, 16}) {
        const ReducedSystem sys = assemble_preset(single, ConditionPreset::friedrichs, n);
        const double error = std::abs(eigensolve(sys, 2).values(1) - kPi4);
        if (previous_error > 0.0) CHECK(previous_error / error >= 8.0);
        previous_error = error;
    }
}

TEST_CASE("companion laplacian") {
    const MetricGraph single = interval();
    const ReducedSystem neumann = assemble_laplacian_ck(single, Mesh::uniform(single, 128));
    CHECK(kernel_dimension(neumann) == 1);
    const EigenDecomposition ne = eigensolve(neumann, 3);
    CHECK(ne.values(1) == doctest::Approx(M_PI * M_PI).epsilon(1e-3));
    CHECK(ne.values(2) == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-3));

    // equilateral 3-star: secular roots are sin k = 0 (simple) and
    // cos k = 0 (double)
    const MetricGraph star = star3();
    const ReducedSystem ck = assemble_laplacian_ck(star, Mesh::uniform(star, 128));
    const EigenDecomposition ce = eigensolve(ck, 6);
    const double roots[6] = {0.0,        M_PI / 2.0, M_PI / 2.0,
                             M_PI,       1.5 * M_PI, 1.5 * M_PI};
    for (int j = 1; j < 6; ++j)
        CHECK(ce.values(j) == doctest::Approx(roots[j] * roots[j]).epsilon(2e-3));
    CHECK(kernel_dimension(ck) == 1);
}

TEST_CASE("kernel dimensions are mesh independent") {
    const MetricGraph path = equilateral(preset_graph(GraphKind::path, 3));
    for (int n : {1, 4}) {
        CHECK(kernel_dimension(assemble_preset(path, ConditionPreset::krein, n)) == 5);
        CHECK(kernel_dimension(assemble_preset(path, ConditionPreset::cont_free, n)) == 3);
        CHECK(kernel_dimension(assemble_preset(path, ConditionPreset::free_ends, n)) == 4);
    }
}

TEST_CASE("evolution") {
    const MetricGraph single = interval();
    const ReducedSystem sys = assemble_preset(single, ConditionPreset::friedrichs, 32);
    const EdgeFunction mode = [](int, double x) { return std::cos(M_PI * x); };

    // t = 0 returns the projection, which reproduces the samples
    const Trajectory start = evolve(sys, mode, {0.0});
    for (std::size_t i = 0; i < start.nodes.size(); ++i)
        CHECK(start.values(0, static_cast<Eigen::Index>(i)) ==
              doctest::Approx(std::cos(M_PI * start.nodes[i].second)).epsilon(1e-6));

    // a pure mode decays with its eigenvalue
    const double t = 0.01;
    const Trajectory later = evolve(sys, mode, {t});
    const double decay = std::exp(-kPi4 * t);
    for (std::size_t i = 0; i < later.nodes.size(); ++i) {
        const double expected = decay * std::cos(M_PI * later.nodes[i].second);
        CHECK(later.values(0, static_cast<Eigen::Index>(i)) ==
              doctest::Approx(expected).epsilon(1e-3));
    }

    CHECK_THROWS_AS(evolve(sys, mode, {-1.0}), ValidationError);

    // long-time limit on a network: the mass-weighted mean
    const MetricGraph star = star3();
    const ReducedSystem nsys = assemble_preset(star, ConditionPreset::sliding_kirchhoff, 8);
    const EdgeFunction bump = [](int e, double x) {
        return e == 0 ? std::exp(-std::pow((x - 0.4) / 0.15, 2)) : 0.0;
    };
    const double lambda2 = eigensolve(nsys, 2).values(1);
    const Trajectory traj = evolve(nsys, bump, {20.0 / lambda2});
    for (std::size_t i = 0; i < traj.nodes.size(); ++i)
        CHECK(traj.values(0, static_cast<Eigen::Index>(i)) ==
              doctest::Approx(traj.mean).epsilon(1e-6).scale(1.0));
}

TEST_CASE("heat kernel sup bound") {
    const MetricGraph single = interval();
    const ReducedSystem sys = assemble_preset(single, ConditionPreset::friedrichs, 48);
    // only the constant mode survives: 1 / total length
    CHECK(kernel_sup_bound(sys, 5.0) == doctest::Approx(1.0).epsilon(1e-3));
    // blow-up toward t = 0+
    CHECK(kernel_sup_bound(sys, 1e-3) > kernel_sup_bound(sys, 1e-1));
    CHECK_THROWS_AS(kernel_sup_bound(sys, 0.0), ValidationError);

    const MetricGraph star = star3();
    const ReducedSystem nsys = assemble_preset(star, ConditionPreset::sliding_kirchhoff, 8);
    CHECK(kernel_sup_bound(nsys, 50.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("trace map touches one signed dof per row") {
    const MetricGraph star = star3();
    const ReducedSystem sys = assemble_preset(star, ConditionPreset::cont_free, 3);
    const Eigen::MatrixXd& t = sys.trace_map();
    CHECK(t.rows() == 12);
    for (int r = 0; r < t.rows(); ++r) {
        int nonzero = 0;
        for (int c = 0; c < t.cols(); ++c)
            if (t(r, c) != 0.0) {
                ++nonzero;
                CHECK(std::abs(t(r, c)) == 1.0);
            }
        CHECK(nonzero == 1);
    }
}

TEST_CASE("evolve with a truncated mode count keeps only the slow modes") {
    const MetricGraph single = interval();
    const ReducedSystem sys = assemble_preset(single, ConditionPreset::friedrichs, 16);
    const EdgeFunction f = [](int, double x) { return std::cos(M_PI * x) + 0.5; };
    // a single mode reproduces the projection onto constants immediately
    const Trajectory truncated = evolve(sys, f, {0.0}, 1);
    for (std::size_t i = 0; i < truncated.nodes.size(); ++i)
        CHECK(truncated.values(0, static_cast<Eigen::Index>(i)) ==
              doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("constraint growth raises eigenvalues") {
    const MetricGraph star = star3();
    const ReducedSystem friedrichs = assemble_preset(star, ConditionPreset::friedrichs, 8);
    const ReducedSystem cont_free = assemble_preset(star, ConditionPreset::cont_free, 8);
    const EigenDecomposition fe = eigensolve(friedrichs, 10);
    const EigenDecomposition ce = eigensolve(cont_free, 10);
    for (int j = 0; j < 10; ++j) CHECK(fe.values(j) >= ce.values(j) - 1e-8);
}

TEST_CASE("natural kirchhoff condition improves under refinement") {
    const MetricGraph star = star3();
    double previous = -1.0;
    for (int n : {8, 16, 32}) {
        const ReducedSystem sys =
            assemble_preset(star, ConditionPreset::sliding_kirchhoff, n);
        // use the first simple nonzero mode (index 3: the double pair sits
        // at indices 1, 2) so the eigenvector is mesh-stable
        const EigenDecomposition dec = eigensolve(sys, 4);
        const double defect =
            kirchhoff_defect(sys, Eigen::VectorXcd(dec.vectors.col(3)));
        CHECK(defect > 0.0);
        if (previous > 0.0) CHECK(defect < previous);
        previous = defect;
    }
}

TEST_CASE("mesh validation") {
    const MetricGraph single = interval();
    CHECK_THROWS_AS(Mesh::uniform(single, 0), ValidationError);
}

TEST_CASE("krein eigenfunctions meet the nonlocal natural condition") {
    // weakly imposed: u''_e at both endpoints approaches the mean slope
    // change (u'(l) - u'(0)) / l as the mesh refines
    const MetricGraph path(preset_graph(GraphKind::path, 3), {0.9, 1.4});
    double previous = -1.0;
    for (int n : {8, 16, 32}) {
        const ReducedSystem sys = assemble(path, Mesh::uniform(path, n),
                                           preset_conditions(path, ConditionPreset::krein));
        // first mode above the 5-dimensional kernel
        const EigenDecomposition dec = eigensolve(sys, 6);
        const Eigen::VectorXcd full =
            sys.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(5)));
        double defect = 0.0;
        for (int e = 0; e < 2; ++e) {
            const int last = n;
            const double du0 = full(sys.dofs().derivative_dof(e, 0)).real();
            const double du1 = full(sys.dofs().derivative_dof(e, last)).real();
            const double mean_curvature = (du1 - du0) / path.length(e);
            defect = std::max(defect, std::abs(sys.second_derivative_at(full, e, false) -
                                               mean_curvature));
            defect = std::max(defect, std::abs(sys.second_derivative_at(full, e, true) -
                                               mean_curvature));
        }
        if (previous > 0.0) CHECK(defect < previous);
        previous = defect;
    }
    CHECK(previous < 0.2);
}

TEST_CASE("kiik eigenfunctions meet the angle-weighted natural conditions") {
    const MetricGraph star = star3();
    KiikParams params;
    params.alpha = 1.1;
    params.beta = 0.7;
    params.gamma = 2.0;
    const double w[3] = {std::sin(params.alpha), std::sin(params.beta),
                         std::sin(params.gamma)};

    double prev_ratio = -1.0, prev_kirchhoff = -1.0;
    for (int n : {8, 16, 32}) {
        const ReducedSystem sys =
            assemble(star, Mesh::uniform(star, n),
                     preset_conditions(star, ConditionPreset::kiik, params));
        const EigenDecomposition dec = eigensolve(sys, 1);
        const Eigen::VectorXcd full =
            sys.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(0)));

        // u''_e(center) / sin(angle_e) agree pairwise; all edges leave the
        // center, so the center is the left endpoint of each edge
        double scale = 0.0, ratio_defect = 0.0;
        double curvature[3];
        for (int e = 0; e < 3; ++e) {
            curvature[e] = sys.second_derivative_at(full, e, false) / w[e];
            scale = std::max(scale, std::abs(curvature[e]));
        }
        for (int e = 0; e < 3; ++e)
            ratio_defect =
                std::max(ratio_defect, std::abs(curvature[e] - curvature[(e + 1) % 3]));
        ratio_defect /= scale;

        // third derivatives sum to zero at the center
        double kirchhoff = 0.0;
        for (int e = 0; e < 3; ++e) kirchhoff += sys.third_derivative(full, e, 0);
        const double kirchhoff_defect_value = std::abs(kirchhoff);

        if (prev_ratio > 0.0) {
            CHECK(ratio_defect < prev_ratio);
            CHECK(kirchhoff_defect_value < prev_kirchhoff);
        }
        prev_ratio = ratio_defect;
        prev_kirchhoff = kirchhoff_defect_value;
    }
    CHECK(prev_ratio < 0.05);
}

TEST_CASE("complex trace subspaces go through the complex solver") {
    const MetricGraph single = interval();
    // values constrained to the complex line (1, i), derivatives clamped
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(4, 1);
    y(0, 0) = 1.0 / std::sqrt(2.0);
    y(1, 0) = Complex(0.0, 1.0 / std::sqrt(2.0));
    const ConditionYR cond(TraceLayout{1}, y, Eigen::MatrixXcd::Zero(1, 1));
    const ReducedSystem sys = assemble(single, Mesh::uniform(single, 16), cond);
    CHECK_FALSE(sys.is_real());

    // a valid self-adjoint spectrum: real, ascending, resolved
    const EigenDecomposition dec = eigensolve(sys, 4);
    for (int j = 1; j < 4; ++j) CHECK(dec.values(j) >= dec.values(j - 1));
    CHECK(dec.values(0) >= -1e-8 * max_abs(sys.k_reduced()));
    CHECK(kernel_sup_bound(sys, 1e-2) > 0.0);

    // positivity analysis is only defined for real semigroups
    CHECK_THROWS_AS(classify(sys), ValidationError);
}
