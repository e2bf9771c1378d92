#include <doctest.h>

#include <cmath>

#include "bilap/classify.hpp"
#include "bilap/errors.hpp"
#include "bilap/fem.hpp"
#include "bilap/operators.hpp"

using namespace bilap;

namespace {

const double kPi3 = std::pow(M_PI, 3);
const double kPi4 = std::pow(M_PI, 4);

MetricGraph interval() { return equilateral(preset_graph(GraphKind::path, 2)); }

Verdict fem_verdict(const MetricGraph& g, ConditionPreset preset, int n = 8) {
    const ReducedSystem sys = assemble(g, Mesh::uniform(g, n), preset_conditions(g, preset));
    return classify(sys).verdict;
}

}  // namespace

TEST_CASE("discrete classification") {
    const Classification p3 = classify(bilaplacian(preset_graph(GraphKind::path, 3)));
    CHECK(p3.verdict == Verdict::eventually_sub_markovian);
    CHECK(p3.kernel_dimension == 1);
    CHECK(p3.ground_constant);

    const Classification k4 = classify(bilaplacian(preset_graph(GraphKind::complete, 4)));
    CHECK(k4.verdict == Verdict::eventually_sub_markovian);
}

TEST_CASE("projector branch produces definite witnesses") {
    const MetricGraph star = equilateral(preset_graph(GraphKind::star, 3));
    CHECK(fem_verdict(star, ConditionPreset::krein) == Verdict::none);
    CHECK(fem_verdict(star, ConditionPreset::cont_free) == Verdict::none);
    CHECK(fem_verdict(star, ConditionPreset::free_ends) == Verdict::none);

    const ReducedSystem krein = assemble(star, Mesh::uniform(star, 8),
                                         preset_conditions(star, ConditionPreset::krein));
    const Classification c = classify(krein);
    CHECK(c.kernel_dimension == 7);
    CHECK(c.projector_witness_found);
}

TEST_CASE("cycle parity decides the verdict") {
    const MetricGraph c3 = equilateral(preset_graph(GraphKind::cycle, 3));
    const MetricGraph c4 = equilateral(preset_graph(GraphKind::cycle, 4));
    const MetricGraph c5 = equilateral(preset_graph(GraphKind::cycle, 5));
    CHECK(fem_verdict(c3, ConditionPreset::cont_deriv) ==
          Verdict::eventually_sub_markovian);
    CHECK(fem_verdict(c4, ConditionPreset::cont_deriv) == Verdict::none);
    CHECK(fem_verdict(c5, ConditionPreset::cont_deriv) ==
          Verdict::eventually_sub_markovian);
}

TEST_CASE("synthetic positive projector without a simple ground state") {
    // two decoupled blocks: the lowest eigenspace is spanned by the two
    // block indicators, whose projector averages blockwise and stays
    // positive
    Eigen::MatrixXd two_blocks = Eigen::MatrixXd::Zero(4, 4);
    two_blocks.block(0, 0, 2, 2) << 4.0, -4.0, -4.0, 4.0;
    two_blocks.block(2, 2, 2, 2) << 4.0, -4.0, -4.0, 4.0;
    const Classification c = classify(SymmetricOperator(two_blocks));
    CHECK(c.kernel_dimension == 2);
    CHECK(c.verdict == Verdict::individually_asymptotically_positive);
    CHECK_FALSE(c.projector_witness_found);
}

TEST_CASE("classification is invariant under positive operator scaling") {
    for (double scale : {1e-2, 1e2}) {
        const Graph p3 = preset_graph(GraphKind::path, 3);
        const SymmetricOperator scaled(
            Eigen::MatrixXd(scale * bilaplacian_closed_form(p3).cast<double>()));
        CHECK(classify(scaled).verdict == Verdict::eventually_sub_markovian);

        const MetricGraph star = equilateral(preset_graph(GraphKind::star, 3));
        const ReducedSystem krein = assemble(
            star, Mesh::uniform(star, 4), preset_conditions(star, ConditionPreset::krein));
        Eigen::MatrixXd values(krein.dofs().total_nodes(), krein.reduced_dim());
        // emulate A -> c A by scaling the spectral data fed to the core
        const EigenDecomposition& dec = krein.eigen();
        for (int j = 0; j < krein.reduced_dim(); ++j)
            values.col(j) = krein.nodal_values(
                krein.full_from_reduced(Eigen::VectorXcd(dec.vectors.col(j))));
        const auto project = [&](const Eigen::VectorXd& f, int cluster) {
            const Eigen::VectorXcd f_red = krein.project_nodal(f);
            const Eigen::MatrixXcd phi = dec.vectors.leftCols(cluster);
            const Eigen::VectorXcd coeffs = phi.adjoint() * (krein.m_reduced() * f_red);
            return Eigen::VectorXd(values.leftCols(cluster) * coeffs.real());
        };
        const Classification c =
            classify_spectral(Eigen::VectorXd(scale * dec.values), values, project);
        CHECK(c.verdict == Verdict::none);
    }
}

TEST_CASE("fem transition time with a one-sided bump") {
    const ReducedSystem sys =
        assemble(interval(), Mesh::uniform(interval(), 48),
                 preset_conditions(interval(), ConditionPreset::friedrichs));
    const EdgeFunction bump = [](int, double x) {
        const double d = (x - 0.2) / 0.05;
        return std::exp(-d * d);
    };
    const TransitionScan scan = transition_time(sys, bump, 1e-8);
    CHECK(scan.t_star > 0.0);
    CHECK(scan.certified);
    // the solution really dips negative before the transition
    double dip = 0.0;
    for (std::size_t i = 0; i < scan.times.size(); ++i)
        if (scan.times[i] < scan.t_star) dip = std::min(dip, scan.min_values[i]);
    CHECK(dip < -1e-4);
    // and never below -tol afterwards on the sampled grid
    for (std::size_t i = 0; i < scan.times.size(); ++i)
        if (scan.times[i] >= scan.t_star) CHECK(scan.min_values[i] >= -1e-8);
}

TEST_CASE("convergence rate fits") {
    // discrete: generic data on P3 decays at lambda_2 = 1
    const SymmetricOperator p3 = bilaplacian(preset_graph(GraphKind::path, 3));
    Eigen::VectorXd f0(3);
    f0 << 1.0, 0.0, 0.0;
    const Eigen::VectorXd mean = Eigen::VectorXd::Constant(3, f0.mean());
    std::vector<double> times, distances;
    for (double t = 1.0; t <= 5.0; t += 0.25) {
        times.push_back(t);
        distances.push_back((p3.apply_semigroup(t, f0) - mean).norm());
    }
    CHECK(convergence_rate_fit(times, distances) == doctest::Approx(1.0).epsilon(0.05));

    // K3 decays at V^2 = 9
    const SymmetricOperator k3 = bilaplacian(preset_graph(GraphKind::complete, 3));
    times.clear();
    distances.clear();
    for (double t = 0.1; t <= 0.6; t += 0.025) {
        times.push_back(t);
        distances.push_back((k3.apply_semigroup(t, f0) - mean).norm());
    }
    CHECK(convergence_rate_fit(times, distances) == doctest::Approx(9.0).epsilon(0.05));

    // network: a pure cosine mode decays at pi^4
    const ReducedSystem sys =
        assemble(interval(), Mesh::uniform(interval(), 32),
                 preset_conditions(interval(), ConditionPreset::friedrichs));
    const EdgeFunction f = [](int, double x) { return std::cos(M_PI * x) + 1.0; };
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i) grid.push_back(0.005 + 0.0025 * i);
    const Trajectory traj = evolve(sys, f, grid);
    CHECK(convergence_rate_fit(traj) == doctest::Approx(kPi4).epsilon(0.05));

    CHECK_THROWS_AS(convergence_rate_fit({1.0, 2.0, 3.0}, {1.0, 0.99, 0.98}),
                    NumericalError);
}

TEST_CASE("ultracontractivity slope sits near the quarter power") {
    const ReducedSystem sys =
        assemble(interval(), Mesh::uniform(interval(), 128),
                 preset_conditions(interval(), ConditionPreset::friedrichs));
    const double slope = ultracontractivity_slope(sys, 1e-4, 1e-2, 9);
    CHECK(slope >= -0.33);
    CHECK(slope <= -0.17);
}

TEST_CASE("dissipativity identity probe") {
    const MetricGraph g = interval();

    // positive and flat-zero functions satisfy the identity to quadrature
    // accuracy
    for (const SmoothFunction& u : probe_battery(42))
        CHECK(dissipativity_identity_probe(g, u) <= 1e-6);

    const SmoothFunction constant{[](int, double) { return 1.0; },
                                  [](int, double) { return 0.0; },
                                  [](int, double) { return 0.0; },
                                  "constant"};
    CHECK(dissipativity_identity_probe(g, constant) == 0.0);

    const SmoothFunction shifted{
        [](int, double x) { return std::cos(M_PI * x) + 2.0; },
        [](int, double x) { return -M_PI * std::sin(M_PI * x); },
        [](int, double x) { return -M_PI * M_PI * std::cos(M_PI * x); },
        "cos + 2"};
    CHECK(dissipativity_identity_probe(g, shifted) <= 1e-10);

    // a transversal interior zero breaks the printed identity: the two
    // quadratures give 4pi^3/3 and 8pi^3/3, i.e. relative residual 1/2
    const SmoothFunction cosine{
        [](int, double x) { return std::cos(M_PI * x); },
        [](int, double x) { return -M_PI * std::sin(M_PI * x); },
        [](int, double x) { return -M_PI * M_PI * std::cos(M_PI * x); },
        "cos"};
    const double residual = dissipativity_identity_probe(g, cosine);
    CHECK(residual == doctest::Approx(0.5).epsilon(1e-9));
    (void)kPi3;

    // boundary and exponent validation
    const SmoothFunction parabola{[](int, double x) { return x * x; },
                                  [](int, double x) { return 2.0 * x; },
                                  [](int, double) { return 2.0; },
                                  "x^2"};
    CHECK_THROWS_AS(dissipativity_identity_probe(g, parabola), ValidationError);
    CHECK_THROWS_AS(dissipativity_identity_probe(g, constant, 4.0), ValidationError);
}

TEST_CASE("classify error paths") {
    // a single mode cannot support the decision tree
    Eigen::VectorXd one_value(1);
    one_value << 0.0;
    Eigen::MatrixXd one_vec = Eigen::MatrixXd::Ones(1, 1);
    const auto project = [](const Eigen::VectorXd& f, int) { return f; };
    CHECK_THROWS_AS(classify_spectral(one_value, one_vec, project), ValidationError);

    // near-zero ground-vector entries inside the sign band are ambiguous,
    // not a verdict
    Eigen::VectorXd values(2);
    values << 0.0, 5.0;
    Eigen::MatrixXd modes(3, 2);
    modes << 1.0, 0.3, 1e-9, 0.3, 1.0, 0.3;
    try {
        classify_spectral(values, modes, project);
        CHECK(false);
    } catch (const NumericalError& err) {
        CHECK(err.kind() == "AmbiguousSign");
    }

    // a fuzzy boundary between the zero cluster and the rest is rejected
    Eigen::VectorXd fuzzy(3);
    fuzzy << 1e-8, 1e-6, 1.0;
    try {
        zero_cluster_size(fuzzy);
        CHECK(false);
    } catch (const NumericalError& err) {
        CHECK(err.kind() == "AmbiguousGap");
    }
}
