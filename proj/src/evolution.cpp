#include "hjstab/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "hjstab/error.hpp"
#include "hjstab/numerics.hpp"

namespace hjstab {

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
    if (size() < kMinSize) {
        throw Error(ErrorCode::PreconditionFailed, fmt::format("grid functions need n >= {}, got {}", kMinSize, size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "grid function has a non-finite value");
    }
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFunction::sup_distance(const GridFunction& other) const {
    if (other.size() != size()) throw Error(ErrorCode::PreconditionFailed, "grid sizes differ");
    double d = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) d = std::max(d, std::abs(values_[i] - other.values_[i]));
    return d;
}

SchemeConfig default_scheme_config(const HamiltonianModel& model, const StationarySolution& s) {
    SchemeConfig cfg;
    double u_sup = 0.0;
    for (int i = 0; i < 256; ++i) u_sup = std::max(u_sup, std::abs(s.u0(i / 256.0)));
    cfg.blowup_threshold = 10.0 * (1.0 + u_sup);

    constexpr int kX = 64;
    constexpr int kPU = 33;
    double alpha = 0.0;
    for (int i = 0; i < kX; ++i) {
        const double x = static_cast<double>(i) / kX;
        for (int j = 0; j < kPU; ++j) {
            const double p = -model.box.p_max + 2.0 * model.box.p_max * j / (kPU - 1);
            for (int k = 0; k < kPU; ++k) {
                const double u = -cfg.blowup_threshold + 2.0 * cfg.blowup_threshold * k / (kPU - 1);
                alpha = std::max(alpha, std::abs(model.d_p(x, p, u)));
            }
        }
    }
    cfg.lf_alpha = alpha > 0.0 ? alpha : 1.0;
    return cfg;
}

LaxFriedrichsScheme::LaxFriedrichsScheme(const HamiltonianModel& model, int n) {
    frozen_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) frozen_.push_back(model.frozen_at(static_cast<double>(i) / n));
}

void LaxFriedrichsScheme::apply(std::span<const double> in, std::span<double> out, double lf_alpha,
                                double dt) const {
    const std::size_t n = frozen_.size();
    const double inv_dx = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = in[i == 0 ? n - 1 : i - 1];
        const double right = in[i + 1 == n ? 0 : i + 1];
        const double a = (in[i] - left) * inv_dx;
        const double b = (right - in[i]) * inv_dx;
        const double numerical_h = frozen_[i].eval(0.5 * (a + b), in[i]) - 0.5 * lf_alpha * (b - a);
        out[i] = in[i] - dt * numerical_h;
    }
}

double LaxFriedrichsScheme::max_abs_hp(std::span<const double> w) const {
    const std::size_t n = frozen_.size();
    const double inv_dx = static_cast<double>(n);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double right = w[i + 1 == n ? 0 : i + 1];
        const double b = (right - w[i]) * inv_dx;
        // b at node i is a at node i + 1; evaluate at both ends of the edge.
        m = std::max({m, std::abs(frozen_[i].d_p(b, w[i])),
                      std::abs(frozen_[i + 1 == n ? 0 : i + 1].d_p(b, right))});
    }
    return m;
}

namespace {

void check_blowup(std::span<const double> w, double threshold, double t) {
    for (double v : w) {
        if (!std::isfinite(v) || std::abs(v) > threshold) {
            throw Error(ErrorCode::BlowUp, fmt::format("sup |w| exceeded {:.6g} at t = {:.6g}", threshold, t));
        }
    }
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

GridFunction step(const HamiltonianModel& model, const SchemeConfig& cfg, const GridFunction& w, double dt) {
    const int n = w.size();
    if (!(dt > 0.0) || dt > cfg.max_dt(n) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::CFLViolation,
                    fmt::format("dt = {:.6g} exceeds cfl dx / lf_alpha = {:.6g}", dt, cfg.max_dt(n)));
    }
    LaxFriedrichsScheme scheme(model, n);
    std::vector<double> out(static_cast<std::size_t>(n));
    scheme.apply(w.values(), out, cfg.lf_alpha, dt);
    check_blowup(out, cfg.blowup_threshold, dt);
    return GridFunction(std::move(out));
}

const GridFunction& EvolutionTrace::final_state() const {
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
        if (it->snapshot) return *it->snapshot;
    }
    throw Error(ErrorCode::PreconditionFailed, "trace holds no snapshots");
}

EvolutionTrace evolve(const HamiltonianModel& model, SchemeConfig cfg, const GridFunction& phi,
                      const GridFunction& reference, const EvolveOptions& options) {
    if (!(options.t_final > 0.0) || !(options.sample_dt > 0.0)) {
        throw Error(ErrorCode::PreconditionFailed, "evolve needs t_final > 0 and sample_dt > 0");
    }
    const int n = phi.size();
    if (reference.size() != n) throw Error(ErrorCode::PreconditionFailed, "reference grid size differs");

    LaxFriedrichsScheme scheme(model, n);
    std::vector<double> cur(phi.values().begin(), phi.values().end());
    std::vector<double> next(cur.size());

    EvolutionTrace trace;
    trace.model_id = model.id;
    trace.n = n;

    auto record = [&](double t, bool snapshot) {
        TraceSample sample;
        sample.t = t;
        sample.dist = sup_distance(cur, reference.values());
        sample.min = *std::min_element(cur.begin(), cur.end());
        sample.max = *std::max_element(cur.begin(), cur.end());
        if (snapshot) sample.snapshot = GridFunction(cur);
        trace.samples.push_back(std::move(sample));
    };
    auto revalidate = [&] {
        const double observed = scheme.max_abs_hp(cur);
        if (observed > cfg.lf_alpha) {
            cfg.lf_alpha = 1.25 * observed;
            ++trace.lf_alpha_raises;
        }
    };

    revalidate();
    record(0.0, true);

    const auto intervals = static_cast<long>(std::ceil(options.t_final / options.sample_dt - 1e-9));
    double t = 0.0;
    for (long k = 1; k <= intervals; ++k) {
        const double t_target = std::min(static_cast<double>(k) * options.sample_dt, options.t_final);
        const double span = t_target - t;
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.max_dt(n) - 1e-9)));
        const double dt = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            scheme.apply(cur, next, cfg.lf_alpha, dt);
            cur.swap(next);
            const double t_now = s + 1 == steps ? t_target : t + static_cast<double>(s + 1) * dt;
            if (options.after_step) options.after_step(t_now, cur);
        }
        t = t_target;
        check_blowup(cur, cfg.blowup_threshold, t);
        revalidate();
        const bool last = k == intervals;
        record(t, options.keep_snapshots || last);
        if (trace.samples.back().dist >= options.stop_distance) {
            trace.stopped_early = !last;
            if (!trace.samples.back().snapshot) trace.samples.back().snapshot = GridFunction(cur);
            break;
        }
    }
    trace.lf_alpha = cfg.lf_alpha;
    return trace;
}

EvolutionTrace evolve(const HamiltonianModel& model, const SchemeConfig& cfg, const GridFunction& phi,
                      double t_final, double sample_dt, const GridFunction& reference) {
    EvolveOptions options;
    options.t_final = t_final;
    options.sample_dt = sample_dt;
    return evolve(model, cfg, phi, reference, options);
}

namespace {

using State = std::array<double, 3>;

State contact_rhs(const HamiltonianModel& model, const State& y) {
    const double x = y[0], p = y[1], u = y[2];
    const double hp = model.d_p(x, p, u);
    return {hp, -model.d_x(x, p, u) - model.d_u(x, p, u) * p, hp * p - model.eval(x, p, u)};
}

void require_finite(const State& y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, fmt::format("characteristic left R^3 at t = {}", t));
    }
}

}  // namespace

std::vector<ContactState> flow_b6(const HamiltonianModel& model, const ContactState& start, double t_final,
                                  int steps) {
    if (steps < 100) throw Error(ErrorCode::PreconditionFailed, "flow_b6 needs steps >= 100");
    auto rhs = [&](const State& y) { return contact_rhs(model, y); };
    const double dt = t_final / steps;
    State y{start.x, start.p, start.u};
    std::vector<ContactState> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back({wrap_unit(y[0]), y[1], y[2]});
    for (int k = 0; k < steps; ++k) {
        y = rk4_step(y, dt, rhs);
        require_finite(y, (k + 1) * dt);
        out.push_back({wrap_unit(y[0]), y[1], y[2]});
    }
    return out;
}

double b6_return_time(const HamiltonianModel& model, const ContactState& start, int steps_per_unit) {
    auto rhs = [&](const State& y) { return contact_rhs(model, y); };
    const double speed = std::abs(model.d_p(start.x, start.p, start.u));
    if (!(speed > 0.0)) throw Error(ErrorCode::AssumptionAViolated, "characteristic starts at rest");
    const double dir = model.d_p(start.x, start.p, start.u) > 0.0 ? 1.0 : -1.0;
    const double target = start.x + dir;
    const double dt = 1.0 / (steps_per_unit * speed);

    State y{start.x, start.p, start.u};
    double t = 0.0;
    const long max_steps = 1000L * steps_per_unit;
    for (long k = 0; k < max_steps; ++k) {
        const State next = rk4_step(y, dt, rhs);
        require_finite(next, t + dt);
        if (dir * (next[0] - target) >= 0.0) {
            double tau = (target - y[0]) / contact_rhs(model, y)[0];
            for (int it = 0; it < 50; ++it) {
                const State yt = rk4_step(y, tau, rhs);
                const double update = (target - yt[0]) / contact_rhs(model, yt)[0];
                tau += update;
                if (std::abs(update) < 1e-15) break;
            }
            return t + tau;
        }
        y = next;
        t += dt;
    }
    throw Error(ErrorCode::PeriodMismatch, "characteristic did not wind around the circle");
}

}  // namespace hjstab
