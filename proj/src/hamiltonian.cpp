#include "hjstab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "hjstab/error.hpp"

namespace hjstab {

FrozenHamiltonian HamiltonianModel::frozen_at(double x) const {
    if (freeze) return freeze(x);
    return FrozenHamiltonian{
        [h = eval, x](double p, double u) { return h(x, p, u); },
        [hp = d_p, x](double p, double u) { return hp(x, p, u); },
    };
}

StationarySolution constant_solution(double level, double residual_tol) {
    StationarySolution s;
    s.id = fmt::format("u0={:g}", level);
    s.u0 = [level](double) { return level; };
    s.du0 = [](double) { return 0.0; };
    s.residual_tol = residual_tol;
    return s;
}

ValidityBox default_box(const StationarySolution& s, int n) {
    double max_u = 0.0;
    double max_du = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        max_u = std::max(max_u, std::abs(s.u0(x)));
        max_du = std::max(max_du, std::abs(s.du0(x)));
    }
    return ValidityBox{2.0 * (1.0 + max_du), 2.0 * (1.0 + max_u)};
}

HamiltonianModel example1(const FourierSeries& lambda, ValidityBox box) {
    HamiltonianModel m;
    m.id = fmt::format("example1[lambda={}]", lambda.describe());
    m.eval = [lambda](double x, double p, double u) { return p * p + p + lambda(x) * u; };
    m.d_p = [](double, double p, double) { return 2.0 * p + 1.0; };
    m.d_u = [lambda](double x, double, double) { return lambda(x); };
    m.d_x = [lambda](double x, double, double u) { return lambda.derivative(x) * u; };
    m.d_pp = [](double, double, double) { return 2.0; };
    m.d_uu = [](double, double, double) { return 0.0; };
    m.d_up = [](double, double, double) { return 0.0; };
    m.d_xp = [](double, double, double) { return 0.0; };
    m.kappa = lambda.abs_bound();
    m.box = box;
    m.freeze = [lambda](double x) {
        const double l = lambda(x);
        return FrozenHamiltonian{
            [l](double p, double u) { return p * p + p + l * u; },
            [](double p, double) { return 2.0 * p + 1.0; },
        };
    };
    return m;
}

HamiltonianModel example2(const FourierSeries& v, const FourierSeries& lambda, ValidityBox box) {
    static const double kSqrt2 = std::numbers::sqrt2;
    HamiltonianModel m;
    m.id = fmt::format("example2[V={};lambda={}]", v.describe(), lambda.describe());
    m.eval = [v, lambda](double x, double p, double u) {
        return p * p + v(x) * p + lambda(x) * (std::sqrt(u * u + 1.0) - kSqrt2);
    };
    m.d_p = [v](double x, double p, double) { return 2.0 * p + v(x); };
    m.d_u = [lambda](double x, double, double u) { return lambda(x) * u / std::sqrt(u * u + 1.0); };
    m.d_x = [v, lambda](double x, double p, double u) {
        return v.derivative(x) * p + lambda.derivative(x) * (std::sqrt(u * u + 1.0) - kSqrt2);
    };
    m.d_pp = [](double, double, double) { return 2.0; };
    m.d_uu = [lambda](double x, double, double u) {
        const double q = u * u + 1.0;
        return lambda(x) / (q * std::sqrt(q));
    };
    m.d_up = [](double, double, double) { return 0.0; };
    m.d_xp = [v](double x, double, double) { return v.derivative(x); };
    m.kappa = lambda.abs_bound();
    m.box = box;
    m.freeze = [v, lambda](double x) {
        const double vx = v(x);
        const double lx = lambda(x);
        return FrozenHamiltonian{
            [vx, lx](double p, double u) { return p * p + vx * p + lx * (std::sqrt(u * u + 1.0) - kSqrt2); },
            [vx](double p, double) { return 2.0 * p + vx; },
        };
    };
    return m;
}

HamiltonianModel pure_quadratic(double c, ValidityBox box) {
    HamiltonianModel m;
    m.id = fmt::format("quadratic[c={:g}]", c);
    m.eval = [c](double, double p, double) { return c * p * p; };
    m.d_p = [c](double, double p, double) { return 2.0 * c * p; };
    m.d_u = [](double, double, double) { return 0.0; };
    m.d_x = [](double, double, double) { return 0.0; };
    m.d_pp = [c](double, double, double) { return 2.0 * c; };
    m.d_uu = [](double, double, double) { return 0.0; };
    m.d_up = [](double, double, double) { return 0.0; };
    m.d_xp = [](double, double, double) { return 0.0; };
    m.kappa = 0.0;
    m.box = box;
    return m;
}

HamiltonianModel linear_transport(double speed, ValidityBox box) {
    HamiltonianModel m;
    m.id = fmt::format("transport[a={:g}]", speed);
    m.eval = [speed](double, double p, double) { return speed * p; };
    m.d_p = [speed](double, double, double) { return speed; };
    m.d_u = [](double, double, double) { return 0.0; };
    m.d_x = [](double, double, double) { return 0.0; };
    m.d_pp = [](double, double, double) { return 0.0; };
    m.d_uu = [](double, double, double) { return 0.0; };
    m.d_up = [](double, double, double) { return 0.0; };
    m.d_xp = [](double, double, double) { return 0.0; };
    m.kappa = 0.0;
    m.box = box;
    return m;
}

namespace {

void require_finite(double value, const char* what, double x, double p, double u) {
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteDerivative,
                    fmt::format("{} is {} at (x={}, p={}, u={})", what, value, x, p, u));
    }
}

double lattice_point(int j, int count, double half_width) {
    return -half_width + 2.0 * half_width * static_cast<double>(j) / (count - 1);
}

}  // namespace

AssumptionReport check_assumptions(const HamiltonianModel& model, int samples_per_axis, double slope_threshold) {
    if (samples_per_axis < 8) {
        throw Error(ErrorCode::PreconditionFailed, "check_assumptions needs samples_per_axis >= 8");
    }
    const auto& box = model.box;
    if (!(box.p_max > 0.0) || !(box.u_max >= 0.0)) {
        throw Error(ErrorCode::PreconditionFailed, "validity box is empty");
    }
    const int n = samples_per_axis;
    AssumptionReport report;
    report.kappa = model.kappa;
    report.slope_threshold = slope_threshold;
    report.min_d_pp = std::numeric_limits<double>::infinity();
    report.growth_slope = std::numeric_limits<double>::infinity();

    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        for (int k = 0; k < n; ++k) {
            const double u = lattice_point(k, n, box.u_max);
            for (int j = 0; j < n; ++j) {
                const double p = lattice_point(j, n, box.p_max);
                const double h = model.eval(x, p, u);
                const double hp = model.d_p(x, p, u);
                const double hu = model.d_u(x, p, u);
                const double hx = model.d_x(x, p, u);
                const double hpp = model.d_pp(x, p, u);
                const double huu = model.d_uu(x, p, u);
                const double hup = model.d_up(x, p, u);
                const double hxp = model.d_xp(x, p, u);
                require_finite(h, "H", x, p, u);
                require_finite(hp, "H_p", x, p, u);
                require_finite(hu, "H_u", x, p, u);
                require_finite(hx, "H_x", x, p, u);
                require_finite(hpp, "H_pp", x, p, u);
                require_finite(huu, "H_uu", x, p, u);
                require_finite(hup, "H_up", x, p, u);
                require_finite(hxp, "H_xp", x, p, u);
                report.min_d_pp = std::min(report.min_d_pp, hpp);
                report.max_abs_d_u = std::max(report.max_abs_d_u, std::abs(hu));
            }
            // Secant slopes from p = 0, so the u-dependent part of H does not
            // mask the growth in p.
            const double base = model.eval(x, 0.0, u);
            const double up = (model.eval(x, box.p_max, u) - base) / box.p_max;
            const double down = (model.eval(x, -box.p_max, u) - base) / box.p_max;
            report.growth_slope = std::min({report.growth_slope, up, down});
        }
    }
    report.h1 = report.min_d_pp > 0.0;
    report.h2_proxy = report.growth_slope > slope_threshold;
    report.h3 = report.max_abs_d_u <= model.kappa;
    return report;
}

StationaryReport check_stationary(const HamiltonianModel& model, const StationarySolution& s, int n) {
    if (n < 16) throw Error(ErrorCode::PreconditionFailed, "check_stationary needs n >= 16");
    constexpr double kBTolerance = 1e-12;
    StationaryReport report;
    report.min_abs_b = std::numeric_limits<double>::infinity();
    bool saw_positive = false;
    bool saw_negative = false;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double u = s.u0(x);
        const double p = s.du0(x);
        const double residual = model.eval(x, p, u);
        const double b = model.d_p(x, p, u);
        if (!std::isfinite(residual) || !std::isfinite(b)) {
            throw Error(ErrorCode::NonFinite, fmt::format("non-finite residual or B at x={}", x));
        }
        report.max_residual = std::max(report.max_residual, std::abs(residual));
        report.min_abs_b = std::min(report.min_abs_b, std::abs(b));
        report.max_abs_b = std::max(report.max_abs_b, std::abs(b));
        saw_positive = saw_positive || b > 0.0;
        saw_negative = saw_negative || b < 0.0;
    }
    if (report.min_abs_b <= kBTolerance || (saw_positive && saw_negative)) {
        throw Error(ErrorCode::AssumptionAViolated,
                    fmt::format("B = H_p on the graph of {} vanishes or changes sign (min |B| = {:.3e})", s.id,
                                report.min_abs_b));
    }
    report.b_sign = saw_positive ? 1 : -1;
    report.residual_ok = report.max_residual <= s.residual_tol;
    return report;
}

}  // namespace hjstab
