#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "hjstab/error.hpp"
#include "hjstab/hamiltonian.hpp"

using namespace hjstab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an hjstab::Error");
    return ErrorCode::PreconditionFailed;
}

// Compares every analytic partial against central differences of eval.
void check_partials(const HamiltonianModel& m) {
    const double h = 1e-5;
    for (double x : {0.05, 0.3, 0.61, 0.9}) {
        for (double p : {-1.3, -0.2, 0.4, 1.7}) {
            for (double u : {-1.5, -0.3, 0.8, 1.9}) {
                CAPTURE(x);
                CAPTURE(p);
                CAPTURE(u);
                const double hp = (m.eval(x, p + h, u) - m.eval(x, p - h, u)) / (2 * h);
                const double hu = (m.eval(x, p, u + h) - m.eval(x, p, u - h)) / (2 * h);
                const double hx = (m.eval(x + h, p, u) - m.eval(x - h, p, u)) / (2 * h);
                const double hpp = (m.d_p(x, p + h, u) - m.d_p(x, p - h, u)) / (2 * h);
                const double huu = (m.d_u(x, p, u + h) - m.d_u(x, p, u - h)) / (2 * h);
                const double hup = (m.d_u(x, p + h, u) - m.d_u(x, p - h, u)) / (2 * h);
                const double hxp = (m.d_p(x + h, p, u) - m.d_p(x - h, p, u)) / (2 * h);
                CHECK(m.d_p(x, p, u) == doctest::Approx(hp).epsilon(1e-7));
                CHECK(m.d_u(x, p, u) == doctest::Approx(hu).epsilon(1e-7));
                CHECK(m.d_x(x, p, u) == doctest::Approx(hx).epsilon(1e-6));
                CHECK(m.d_pp(x, p, u) == doctest::Approx(hpp).epsilon(1e-7));
                CHECK(m.d_uu(x, p, u) == doctest::Approx(huu).epsilon(1e-7));
                CHECK(m.d_up(x, p, u) == doctest::Approx(hup).epsilon(1e-7));
                CHECK(m.d_xp(x, p, u) == doctest::Approx(hxp).epsilon(1e-6));
                const FrozenHamiltonian f = m.frozen_at(x);
                CHECK(f.eval(p, u) == doctest::Approx(m.eval(x, p, u)).epsilon(1e-15));
                CHECK(f.d_p(p, u) == doctest::Approx(m.d_p(x, p, u)).epsilon(1e-15));
            }
        }
    }
}

const FourierSeries kLambda(1.0, {0.25}, {0.5});
const FourierSeries kV(1.0, {}, {0.3});

}  // namespace

TEST_CASE("analytic partials match finite differences") {
    SUBCASE("example1") { check_partials(example1(kLambda)); }
    SUBCASE("example2") { check_partials(example2(kV, kLambda)); }
    SUBCASE("quadratic") { check_partials(pure_quadratic(0.5)); }
    SUBCASE("transport") { check_partials(linear_transport(1.0)); }
}

TEST_CASE("builtin examples satisfy the sampled assumptions") {
    for (const HamiltonianModel& m : {example1(kLambda), example2(kV, kLambda, {2.0, 4.0})}) {
        CAPTURE(m.id);
        const AssumptionReport r = check_assumptions(m, 17);
        CHECK(r.h1);
        CHECK(r.h2_proxy);
        CHECK(r.h3);
        CHECK(r.passed());
        CHECK(r.min_d_pp == doctest::Approx(2.0));
        CHECK(r.max_abs_d_u <= r.kappa);
    }
}

TEST_CASE("assumption report flags what fails") {
    const AssumptionReport transport = check_assumptions(linear_transport(1.0), 9);
    CHECK_FALSE(transport.h1);
    CHECK_FALSE(transport.passed());

    HamiltonianModel liar = example1(FourierSeries::constant(2.0));
    liar.kappa = 1.0;
    CHECK_FALSE(check_assumptions(liar, 9).h3);

    CHECK_FALSE(check_assumptions(pure_quadratic(0.5), 9, 5.0).h2_proxy);
    CHECK(code_of([] { check_assumptions(pure_quadratic(0.5), 4); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("non-finite derivatives are reported") {
    HamiltonianModel broken = pure_quadratic(1.0);
    broken.d_uu = [](double, double, double u) { return u > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
    CHECK(code_of([&] { check_assumptions(broken, 9); }) == ErrorCode::NonFiniteDerivative);
}

TEST_CASE("stationary check for the builtin solutions") {
    SUBCASE("example1 with u0 = 0 has B = 1") {
        const StationaryReport r = check_stationary(example1(kLambda), constant_solution(0.0), 64);
        CHECK(r.passed());
        CHECK(r.max_residual == 0.0);
        CHECK(r.b_sign == 1);
        CHECK(r.min_abs_b == doctest::Approx(1.0));
    }
    SUBCASE("example2 with u0 = +-1 has B = V") {
        for (double level : {1.0, -1.0}) {
            const StationaryReport r = check_stationary(example2(kV, kLambda), constant_solution(level), 256);
            CHECK(r.passed());
            CHECK(r.max_residual < 1e-14);
            CHECK(r.min_abs_b == doctest::Approx(0.7).epsilon(1e-4));
            CHECK(r.max_abs_b == doctest::Approx(1.3).epsilon(1e-4));
        }
    }
    SUBCASE("a non-solution has a residual") {
        const StationaryReport r = check_stationary(example2(kV, kLambda), constant_solution(0.5), 64);
        CHECK_FALSE(r.residual_ok);
        CHECK_FALSE(r.passed());
    }
}

TEST_CASE("assumption (A) violations") {
    CHECK(code_of([] { check_stationary(pure_quadratic(1.0), constant_solution(0.0), 32); }) ==
          ErrorCode::AssumptionAViolated);
    const HamiltonianModel sign_change = example2(FourierSeries(0.0, {}, {1.0}), FourierSeries::constant(1.0));
    CHECK(code_of([&] { check_stationary(sign_change, constant_solution(1.0), 32); }) ==
          ErrorCode::AssumptionAViolated);
}

TEST_CASE("default box scales with the stationary solution") {
    const ValidityBox b = default_box(constant_solution(-1.0));
    CHECK(b.p_max == 2.0);
    CHECK(b.u_max == 4.0);
}
