#include <doctest.h>

#include <cmath>
#include <random>

#include "bilap/conditions.hpp"
#include "bilap/errors.hpp"
#include "bilap/numerics.hpp"

using namespace bilap;

namespace {

MetricGraph interval() { return equilateral(preset_graph(GraphKind::path, 2)); }
MetricGraph p3() { return equilateral(preset_graph(GraphKind::path, 3)); }
MetricGraph star3() { return equilateral(preset_graph(GraphKind::star, 3)); }

}  // namespace

TEST_CASE("trace layout blocks and signs") {
    const TraceLayout layout{3};
    CHECK(layout.dim() == 12);
    CHECK(layout.value_row(1, false) == 1);
    CHECK(layout.value_row(1, true) == 4);
    CHECK(layout.derivative_row(1, false) == 7);
    CHECK(layout.derivative_row(1, true) == 10);
    CHECK(TraceLayout::derivative_sign(false) == -1.0);
    CHECK(TraceLayout::derivative_sign(true) == 1.0);
}

TEST_CASE("cv basis spans the vertex-constant subspace") {
    const Eigen::MatrixXd single = cv_basis(interval());
    CHECK(single.rows() == 2);
    CHECK(single.cols() == 2);

    const Eigen::MatrixXd path = cv_basis(p3());
    CHECK(path.rows() == 4);
    CHECK(path.cols() == 3);
    // middle vertex owns the shared slot pair (edge 0 right, edge 1 left)
    CHECK(path(2, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(path(1, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const Eigen::MatrixXd star = cv_basis(star3());
    CHECK(star.cols() == 4);
    CHECK((star.col(0).array() != 0.0).count() == 3);  // center touches 3 slots

    // orthonormal columns
    const Eigen::MatrixXd gram = star.transpose() * star;
    CHECK(max_abs(Eigen::MatrixXd(gram - Eigen::MatrixXd::Identity(4, 4))) <= 1e-12);
}

TEST_CASE("preset dimensions") {
    const MetricGraph g = star3();  // V=4, E=3, 4E=12
    const auto dim = [&](ConditionPreset p) {
        return preset_conditions(g, p).dim_y();
    };
    CHECK(dim(ConditionPreset::friedrichs) == 4);          // V
    CHECK(dim(ConditionPreset::cont_free) == 4 + 6);       // V + 2E
    CHECK(dim(ConditionPreset::cont_deriv) == 8);          // 2V
    CHECK(dim(ConditionPreset::sliding_kirchhoff) == 6);   // 2E
    CHECK(dim(ConditionPreset::krein) == 10);              // V + 2E
    CHECK(dim(ConditionPreset::hinged) == 6);              // 2E
    CHECK(dim(ConditionPreset::clamped) == 0);
    CHECK(dim(ConditionPreset::free_ends) == 12);          // 4E

    CHECK(preset_conditions(p3(), ConditionPreset::cont_free).dim_y() == 3 + 4);

    for (ConditionPreset p :
         {ConditionPreset::friedrichs, ConditionPreset::cont_free,
          ConditionPreset::sliding_kirchhoff, ConditionPreset::krein,
          ConditionPreset::kiik}) {
        const ConditionYR cond = preset_conditions(g, p);
        CHECK(cond.is_self_adjoint());
        CHECK(cond.dim_y() + static_cast<int>(cond.y_perp_basis().cols()) == 12);
    }
}

TEST_CASE("krein operator reproduces the edgewise difference form") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Graph base = preset_graph(GraphKind::star, 3);
    const MetricGraph g(base, {0.7, 1.3, 2.1});
    const ConditionYR krein = preset_conditions(g, ConditionPreset::krein);
    const Eigen::MatrixXcd lambda = krein.r_in_trace_coordinates();

    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(12);
        // value block in c_V (continuity) so that x lies in Y
        const Eigen::MatrixXd cv = cv_basis(g);
        Eigen::VectorXd coeff(4);
        for (int i = 0; i < 4; ++i) coeff(i) = gauss(rng);
        x.head(6) = (cv * coeff).cast<Complex>();
        Eigen::VectorXd w(6);
        for (int i = 0; i < 6; ++i) w(i) = gauss(rng);
        x.tail(6) = w.cast<Complex>();

        double expected = 0.0;
        for (int e = 0; e < 3; ++e)
            expected += (w(e) + w(3 + e)) * (w(e) + w(3 + e)) / g.length(e);
        const double form = (lambda * x).dot(x).real();
        CHECK(form == doctest::Approx(expected).epsilon(1e-12));
        CHECK(form >= -1e-12);
    }
    CHECK_FALSE(krein.is_dissipative());  // Lambda is positive semidefinite

    // single edge of unit length: (Lambda x, x) = (u'(1) - u'(0))^2
    const ConditionYR single = preset_conditions(interval(), ConditionPreset::krein);
    const Eigen::MatrixXcd l1 = single.r_in_trace_coordinates();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(4);
    const double a = 0.4, b = -1.1;  // u'(0), u'(1)
    x(2) = -a;
    x(3) = b;
    CHECK((l1 * x).dot(x).real() == doctest::Approx((b - a) * (b - a)).epsilon(1e-12));
}

TEST_CASE("yr_to_cb degenerate corners") {
    const ConditionYR free = preset_conditions(interval(), ConditionPreset::free_ends);
    const ConditionCB cb_free = yr_to_cb(free);
    CHECK(max_abs(cb_free.c) <= 1e-14);
    CHECK(max_abs(Eigen::MatrixXcd(cb_free.b - Eigen::MatrixXcd::Identity(4, 4))) <= 1e-14);

    const ConditionYR clamped = preset_conditions(interval(), ConditionPreset::clamped);
    const ConditionCB cb_clamped = yr_to_cb(clamped);
    CHECK(max_abs(cb_clamped.b) <= 1e-14);
    CHECK(max_abs(Eigen::MatrixXcd(cb_clamped.c - Eigen::MatrixXcd::Identity(4, 4))) <=
          1e-14);
}

TEST_CASE("cb_to_yr recovers Y and R") {
    // clamped network from the matrix pair form
    ConditionCB clamped;
    clamped.layout = TraceLayout{1};
    clamped.c = Eigen::MatrixXcd::Identity(4, 4);
    clamped.b = Eigen::MatrixXcd::Zero(4, 4);
    CHECK(cb_to_yr(clamped).dim_y() == 0);

    // krein roundtrip: the trace-coordinate operator comes back exactly
    const Graph base = preset_graph(GraphKind::path, 2);
    const MetricGraph g(base, {1.7});
    const ConditionYR krein = preset_conditions(g, ConditionPreset::krein);
    const ConditionYR back = cb_to_yr(yr_to_cb(krein));
    CHECK(max_abs(Eigen::MatrixXcd(back.r_in_trace_coordinates() -
                                   krein.r_in_trace_coordinates())) <= 1e-10);
    CHECK(conditions_equal(krein, back));

    // Hermiticity violation is rejected with a message naming the defect
    ConditionCB bad;
    bad.layout = TraceLayout{1};
    bad.c = Eigen::MatrixXcd::Identity(4, 4);
    bad.b = Eigen::MatrixXcd::Identity(4, 4);
    bad.c(0, 1) = 2.0;  // CB^H = C not Hermitian
    try {
        cb_to_yr(bad);
        CHECK(false);
    } catch (const ValidationError& err) {
        CHECK(err.kind() == "NotSelfAdjoint");
        CHECK(std::string(err.what()).find("Hermitian") != std::string::npos);
    }

    // rank failure
    ConditionCB rank_deficient;
    rank_deficient.layout = TraceLayout{1};
    rank_deficient.c = Eigen::MatrixXcd::Zero(4, 4);
    rank_deficient.b = Eigen::MatrixXcd::Zero(4, 4);
    rank_deficient.b(0, 0) = 1.0;
    CHECK_THROWS_AS(cb_to_yr(rank_deficient), ValidationError);
}

TEST_CASE("admissible trace spaces") {
    const MetricGraph g = star3();
    for (ConditionPreset p :
         {ConditionPreset::sliding_kirchhoff, ConditionPreset::cont_deriv,
          ConditionPreset::cont_free, ConditionPreset::friedrichs, ConditionPreset::krein,
          ConditionPreset::kiik, ConditionPreset::hinged, ConditionPreset::clamped,
          ConditionPreset::free_ends}) {
        const ConditionYR cond = preset_conditions(g, p);
        CHECK(admissible_trace_space(cond).dim() == 12);
        CHECK(admissible_trace_space(yr_to_cb(cond)).dim() == 12);
        CHECK(conditions_equal(cond, yr_to_cb(cond)));
    }

    // pure natural conditions: x free, y forced to zero
    const ConditionYR free = preset_conditions(g, ConditionPreset::free_ends);
    CHECK(admissible_trace_space(free).dim() == 12);

    const double angle = conditions_angle(
        admissible_trace_space(preset_conditions(g, ConditionPreset::sliding_kirchhoff)),
        admissible_trace_space(preset_conditions(g, ConditionPreset::cont_deriv)));
    CHECK(angle > 0.1);
}

TEST_CASE("kiik preset") {
    const MetricGraph g = star3();

    const ConditionYR clamped_outer = preset_conditions(g, ConditionPreset::kiik);
    CHECK(clamped_outer.dim_y() == 3);  // center value line + 2-dim derivative plane

    KiikParams hinged;
    hinged.outer = OuterKind::hinged;
    CHECK(preset_conditions(g, ConditionPreset::kiik, hinged).dim_y() == 6);

    KiikParams sliding;
    sliding.outer = OuterKind::sliding;
    CHECK(preset_conditions(g, ConditionPreset::kiik, sliding).dim_y() == 6);

    // equal angles at the center reduce to continuity + Kirchhoff there
    KiikParams equal_angles;
    equal_angles.alpha = equal_angles.beta = equal_angles.gamma = M_PI / 2;
    const ConditionYR cond = preset_conditions(g, ConditionPreset::kiik, equal_angles);
    const Eigen::MatrixXcd& y = cond.y_basis();
    // derivative part of every basis vector sums to zero over the center slots
    for (int c = 0; c < y.cols(); ++c) {
        const Complex sum = y(6, c) + y(7, c) + y(8, c);
        CHECK(std::abs(sum) <= 1e-12);
    }

    KiikParams degenerate;
    degenerate.alpha = 0.0;
    CHECK_THROWS_AS(preset_conditions(g, ConditionPreset::kiik, degenerate),
                    ValidationError);
    CHECK_THROWS_AS(preset_conditions(p3(), ConditionPreset::kiik), ValidationError);
}

TEST_CASE("cb_to_yr is gauge independent") {
    // left-multiplying (C, B) by any invertible G keeps the condition set,
    // the rank certificate and the Hermiticity certificate; the recovered
    // (Y, R) must not change
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto random_complex = [&](int rows, int cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
        return m;
    };

    for (int e_count : {1, 2, 3}) {
        const TraceLayout layout{e_count};
        const int dim = layout.dim();
        for (int trial = 0; trial < 6; ++trial) {
            const int k = 1 + static_cast<int>(rng() % dim);
            const Eigen::MatrixXcd y = orthonormal_range(random_complex(dim, k));
            Eigen::MatrixXcd r = random_complex(y.cols(), y.cols());
            r = 0.5 * (r + r.adjoint()).eval();
            const ConditionYR cond(layout, y, r);

            ConditionCB cb = yr_to_cb(cond);
            // well-conditioned random gauge: identity plus a small tweak
            const Eigen::MatrixXcd gauge =
                Eigen::MatrixXcd::Identity(dim, dim) + 0.3 * random_complex(dim, dim);
            cb.c = gauge * cb.c;
            cb.b = gauge * cb.b;

            const ConditionYR back = cb_to_yr(cb);
            CHECK(back.dim_y() == cond.dim_y());
            CHECK(conditions_equal(cond, back));
            CHECK(max_abs(Eigen::MatrixXcd(back.r_in_trace_coordinates() -
                                           cond.r_in_trace_coordinates())) <= 1e-8);
        }
    }
}

TEST_CASE("condition construction validates the basis") {
    const TraceLayout layout{1};
    Eigen::MatrixXcd not_orthonormal = Eigen::MatrixXcd::Zero(4, 2);
    not_orthonormal(0, 0) = 1.0;
    not_orthonormal(0, 1) = 1.0;
    not_orthonormal(1, 1) = 1.0;
    CHECK_THROWS_AS(
        ConditionYR(layout, not_orthonormal, Eigen::MatrixXcd::Zero(2, 2)),
        ValidationError);

    // non-Hermitian R is stored but flagged
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(4, 2);
    y(0, 0) = 1.0;
    y(1, 1) = 1.0;
    Eigen::MatrixXcd r(2, 2);
    r << 0.0, 1.0, 0.0, 0.0;
    const ConditionYR cond(layout, y, r);
    CHECK_FALSE(cond.is_self_adjoint());

    Eigen::MatrixXcd dissipative(2, 2);
    dissipative << -1.0, 0.0, 0.0, 0.0;
    CHECK(ConditionYR(layout, y, dissipative).is_dissipative());
}
