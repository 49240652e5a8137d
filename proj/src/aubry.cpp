#include "hjstab/aubry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "hjstab/error.hpp"

namespace hjstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct OrbitSample {
    double b;
    double du;
};

OrbitSample sample_orbit(const HamiltonianModel& model, const StationarySolution& s, double x) {
    const double u = s.u0(x);
    const double p = s.du0(x);
    return {model.d_p(x, p, u), model.d_u(x, p, u)};
}

// Per-panel Simpson integrals of 1/B and H_u/B over n equal panels of [0, 1].
struct PanelIntegrals {
    std::vector<double> inv_b;
    std::vector<double> du_over_b;
};

PanelIntegrals panel_integrals(const HamiltonianModel& model, const StationarySolution& s, int n) {
    const double h = 1.0 / n;
    PanelIntegrals out;
    out.inv_b.resize(static_cast<std::size_t>(n));
    out.du_over_b.resize(static_cast<std::size_t>(n));
    OrbitSample left = sample_orbit(model, s, 0.0);
    for (int j = 0; j < n; ++j) {
        const OrbitSample mid = sample_orbit(model, s, (j + 0.5) * h);
        const OrbitSample right = sample_orbit(model, s, (j + 1.0) * h);
        out.inv_b[j] = h / 6.0 * (1.0 / left.b + 4.0 / mid.b + 1.0 / right.b);
        out.du_over_b[j] = h / 6.0 * (left.du / left.b + 4.0 * mid.du / mid.b + right.du / right.b);
        left = right;
    }
    return out;
}

double weighted_mean(const PanelIntegrals& panels) {
    double inv = 0.0;
    double du = 0.0;
    for (std::size_t j = 0; j < panels.inv_b.size(); ++j) {
        inv += panels.inv_b[j];
        du += panels.du_over_b[j];
    }
    return du / inv;
}

}  // namespace

double AubryData::B_at(double x) const { return sample_orbit(model_, stationary_, x).b; }

double AubryData::du_at(double x) const { return sample_orbit(model_, stationary_, x).du; }

double AubryData::rho_at(double x) const { return rho_interp_(x); }

double AubryData::drho_at(double x) const {
    const OrbitSample o = sample_orbit(model_, stationary_, x);
    return rho_at(x) * (mu - o.du) / o.b;
}

double AubryData::f_at(double x) const { return kTwoPi * x + f_offset_interp_(x); }

double AubryData::df_at(double x) const { return -kTwoPi / (Z * B_at(x)); }

AubryData compute_aubry(const HamiltonianModel& model, const StationarySolution& s, int n) {
    if (n < 64 || !std::has_single_bit(static_cast<unsigned>(n))) {
        throw Error(ErrorCode::PreconditionFailed, fmt::format("compute_aubry needs a power of two >= 64, got {}", n));
    }
    const StationaryReport stationary = check_stationary(model, s, n);

    AubryData a;
    a.model_ = model;
    a.stationary_ = s;
    a.grid_n = n;
    a.b_sign = stationary.b_sign;
    a.min_abs_b = stationary.min_abs_b;

    const PanelIntegrals panels = panel_integrals(model, s, n);
    a.mu = weighted_mean(panels);
    const double mu_fine = weighted_mean(panel_integrals(model, s, 2 * n));
    a.mu_refinement_delta = std::abs(mu_fine - a.mu);
    if (a.mu_refinement_delta > 1e-6) {
        throw Error(ErrorCode::QuadratureDivergence,
                    fmt::format("mu changed by {:.3e} between n={} and n={}", a.mu_refinement_delta, n, 2 * n));
    }

    const auto nodes = static_cast<std::size_t>(n) + 1;
    a.x.resize(nodes);
    a.B.resize(nodes);
    a.rho.resize(nodes);
    a.drho.resize(nodes);
    a.f.resize(nodes);

    double total_inv = 0.0;
    for (double v : panels.inv_b) total_inv += v;
    a.Z = -total_inv;
    a.period_T = std::abs(total_inv);

    // Cumulative sums share the panels used for mu, so the exponent at x = 1 is
    // mu * ∫1/B - ∫H_u/B = 0 up to round-off.
    double cum_inv = 0.0;
    double cum_du = 0.0;
    a.rho_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes; ++i) {
        if (i > 0) {
            cum_inv += panels.inv_b[i - 1];
            cum_du += panels.du_over_b[i - 1];
        }
        const double x = static_cast<double>(i) / n;
        const OrbitSample o = sample_orbit(model, s, x);
        a.x[i] = x;
        a.B[i] = o.b;
        a.rho[i] = std::exp(a.mu * cum_inv - cum_du);
        a.drho[i] = a.rho[i] * (a.mu - o.du) / o.b;
        a.f[i] = kTwoPi * cum_inv / total_inv;
        if (i + 1 < nodes) {
            a.rho_sup = std::max(a.rho_sup, a.rho[i]);
            a.rho_min = std::min(a.rho_min, a.rho[i]);
            a.drho_sup = std::max(a.drho_sup, std::abs(a.drho[i]));
            a.df_sup = std::max(a.df_sup, kTwoPi / (a.period_T * std::abs(o.b)));
        }
    }

    std::vector<double> rho_samples(a.rho.begin(), a.rho.end() - 1);
    std::vector<double> f_offset(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) f_offset[i] = a.f[i] - kTwoPi * a.x[i];
    a.rho_interp_ = PeriodicCubic(std::move(rho_samples));
    a.f_offset_interp_ = PeriodicCubic(std::move(f_offset));
    return a;
}

double ConstantsLedger::eps_tilde0(double theta) const {
    if (M0 <= 0.0) return 1.0;
    return std::min(std::abs(mu - theta) * M2 / (M0 * M1 * (M1 + M2)), 1.0);
}

ConstantsLedger compute_constants(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                  const ConstantsOptions& options) {
    if (options.lattice_per_axis < 33) {
        throw Error(ErrorCode::PreconditionFailed, "the M0 lattice needs at least 33 points per axis");
    }
    ConstantsLedger c;
    c.mu = a.mu;
    c.M1 = a.rho_sup + a.drho_sup;
    c.M2 = a.rho_min;
    c.alpha = (model.kappa + std::abs(a.mu)) / a.min_abs_b;
    // Covers every ν ∈ [-1, 1] perturbation of the graph used by the
    // stationary, evolutionary and periodic profiles.
    c.p_radius = 2.0 * a.drho_sup + a.rho_sup * a.df_sup;
    c.u_radius = 2.0 * a.rho_sup;

    const int m = options.lattice_per_axis;
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) / m;
        const double p0 = s.du0(x);
        const double u0 = s.u0(x);
        for (int j = 0; j < m; ++j) {
            const double p = p0 - c.p_radius + 2.0 * c.p_radius * j / (m - 1);
            for (int k = 0; k < m; ++k) {
                const double u = u0 - c.u_radius + 2.0 * c.u_radius * k / (m - 1);
                const double kernel = std::max({std::abs(model.d_pp(x, p, u)), std::abs(model.d_uu(x, p, u)),
                                                std::abs(model.d_up(x, p, u))});
                if (!std::isfinite(kernel)) {
                    throw Error(ErrorCode::NonFiniteDerivative,
                                fmt::format("second derivative not finite at (x={}, p={}, u={})", x, p, u));
                }
                hi = std::max(hi, kernel);
                lo = std::min(lo, kernel);
            }
        }
    }
    c.M0 = hi + options.inflation * (hi - lo);
    c.M0_tilde = c.M0;

    c.degenerate_mu = a.mu == 0.0;
    if (c.degenerate_mu || c.M0 <= 0.0) {
        c.eps0 = c.degenerate_mu ? 0.0 : 1.0;
    } else {
        c.eps0 = std::min(std::abs(a.mu) * c.M2 / (2.0 * c.M0 * c.M1 * (c.M1 + c.M2)), 1.0);
    }
    if (a.mu > 0.0 && c.M0 > 0.0) {
        c.delta0 = a.mu * c.M2 * c.M2 / (2.0 * c.M0 * c.M1 * (c.M1 + c.M2));
    }
    if (a.mu < 0.0 && c.M0_tilde > 0.0) {
        const double tb = a.period_T * a.min_abs_b;
        const double pi = std::numbers::pi;
        const double bracket = 8.0 * pi * pi / (tb * tb) + 2.0 * c.alpha * c.alpha + 4.0 * pi * c.alpha / tb + 2.0 +
                               2.0 * c.alpha + 2.0 * pi / tb;
        c.eps_tilde1 = std::min(-a.mu / (c.M1 * c.M0_tilde) / bracket, 1.0);
    }
    return c;
}

double mu_flow_average(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                       int rk4_steps) {
    if (rk4_steps < 1 || !(a.period_T > 0.0)) {
        throw Error(ErrorCode::PreconditionFailed, "mu_flow_average needs rk4_steps >= 1 and a known period");
    }
    auto rhs = [&](const std::array<double, 2>& y) -> std::array<double, 2> {
        const OrbitSample o = sample_orbit(model, s, y[0]);
        return {o.b, o.du};
    };
    const double dt = a.period_T / rk4_steps;
    std::array<double, 2> y{0.0, 0.0};
    for (int k = 0; k < rk4_steps; ++k) y = rk4_step(y, dt, rhs);
    const double miss = std::abs(y[0] - static_cast<double>(a.b_sign));
    if (miss > 1e-5) {
        throw Error(ErrorCode::PeriodMismatch, fmt::format("Aubry orbit misses its start by {:.3e}", miss));
    }
    return y[1] / a.period_T;
}

double aubry_return_time(const HamiltonianModel& model, const StationarySolution& s, int rk4_steps) {
    auto velocity = [&](double x) { return sample_orbit(model, s, x).b; };
    auto rhs = [&](const std::array<double, 1>& y) -> std::array<double, 1> { return {velocity(y[0])}; };

    double max_speed = 0.0;
    for (int i = 0; i < 256; ++i) max_speed = std::max(max_speed, std::abs(velocity(i / 256.0)));
    const double dir = velocity(0.0) > 0.0 ? 1.0 : -1.0;
    const double dt = 1.0 / (rk4_steps * max_speed);

    std::array<double, 1> y{0.0};
    double t = 0.0;
    const long max_steps = 1000L * rk4_steps;
    for (long k = 0; k < max_steps; ++k) {
        const auto next = rk4_step(y, dt, rhs);
        if (dir * next[0] >= 1.0) {
            double tau = (dir - y[0]) / velocity(y[0]);
            for (int it = 0; it < 50; ++it) {
                const double xt = rk4_step(y, tau, rhs)[0];
                const double update = (dir - xt) / velocity(xt);
                tau += update;
                if (std::abs(update) < 1e-15) break;
            }
            return t + tau;
        }
        y = next;
        t += dt;
    }
    throw Error(ErrorCode::PeriodMismatch, "Aubry orbit did not return within the step budget");
}

}  // namespace hjstab
