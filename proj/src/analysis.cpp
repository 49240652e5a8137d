#include "hjstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

#include "hjstab/certificates.hpp"
#include "hjstab/error.hpp"

namespace hjstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Low-pass random profile sum_{k<=K} a_k cos 2πkx + b_k sin 2πkx with
// coefficients ~ N(0, 1/(1+k)^2), normalised to unit sup norm on a fine grid so
// that the same profile can be sampled at several resolutions.
class NoiseProfile {
public:
    NoiseProfile(std::mt19937_64& rng, int modes) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int k = 0; k <= modes; ++k) {
            const double scale = 1.0 / (1.0 + k);
            cos_.push_back(normal(rng) * scale);
            sin_.push_back(k == 0 ? 0.0 : normal(rng) * scale);
        }
        double sup = 0.0;
        for (int i = 0; i < 4096; ++i) sup = std::max(sup, std::abs(raw(i / 4096.0)));
        norm_ = sup > 0.0 ? 1.0 / sup : 0.0;
    }

    double operator()(double x) const { return norm_ * raw(x); }

private:
    double raw(double x) const {
        double v = 0.0;
        for (std::size_t k = 0; k < cos_.size(); ++k) {
            const double arg = kTwoPi * static_cast<double>(k) * x;
            v += cos_[k] * std::cos(arg) + sin_[k] * std::sin(arg);
        }
        return v;
    }

    std::vector<double> cos_, sin_;
    double norm_ = 0.0;
};

GridFunction sample_u0(const StationarySolution& s, int n) {
    return GridFunction::sample(n, [&](double x) { return s.u0(x); });
}

// First time the trace reaches the tube radius (log-linear interpolation
// between samples), provided it never comes back inside afterwards.
std::optional<double> escape_time(const EvolutionTrace& trace, double tube) {
    const auto& samples = trace.samples;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].dist < tube) continue;
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (samples[j].dist < tube) return std::nullopt;
        }
        if (i == 0) return samples[0].t;
        const TraceSample& lo = samples[i - 1];
        const TraceSample& hi = samples[i];
        if (lo.dist <= 0.0) return hi.t;
        const double s = (std::log(tube) - std::log(lo.dist)) / (std::log(hi.dist) - std::log(lo.dist));
        return lo.t + s * (hi.t - lo.t);
    }
    return std::nullopt;
}

}  // namespace

double estimate_rate(const EvolutionTrace& trace, double t_lo, double t_hi) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    bool at_floor = false;
    for (const TraceSample& sample : trace.samples) {
        if (sample.t < t_lo || sample.t > t_hi) continue;
        ++count;
        if (sample.dist <= kDistanceFloor) {
            at_floor = true;
            continue;
        }
        const double y = std::log(sample.dist);
        st += sample.t;
        sy += y;
        stt += sample.t * sample.t;
        sty += sample.t * y;
    }
    if (count < 10) {
        throw Error(ErrorCode::DegenerateWindow,
                    fmt::format("{} samples in [{:.6g}, {:.6g}], need at least 10", count, t_lo, t_hi));
    }
    if (at_floor) return -std::numeric_limits<double>::infinity();
    const double m = count;
    const double denom = m * stt - st * st;
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateWindow, "window has no time spread");
    return (m * sty - st * sy) / denom;
}

GridFunction random_perturbation(const GridFunction& base, double amplitude, std::mt19937_64& rng, int modes) {
    const NoiseProfile noise(rng, modes);
    std::vector<double> v(base.values().begin(), base.values().end());
    double sup = 0.0;
    for (int i = 0; i < base.size(); ++i) sup = std::max(sup, std::abs(noise(base.node(i))));
    const double scale = sup > 0.0 ? amplitude / sup : 0.0;
    for (int i = 0; i < base.size(); ++i) v[static_cast<std::size_t>(i)] += scale * noise(base.node(i));
    return GridFunction(std::move(v));
}

GridFunction tilt_by_rho(const AubryData& a, int n, double scale) {
    return GridFunction::sample(n, [&](double x) { return a.stationary().u0(x) + scale * a.rho_at(x); });
}

std::string_view to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::AsymptoticallyStable: return "AsymptoticallyStable";
        case VerdictKind::Unstable: return "Unstable";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

StabilityVerdict classify_stability(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                    const ConstantsLedger& ledger, int trials, double delta,
                                    const StabilityOptions& options) {
    if (trials < 3) throw Error(ErrorCode::PreconditionFailed, "classify_stability needs at least 3 trials");
    if (!(delta > 0.0)) throw Error(ErrorCode::PreconditionFailed, "delta must be positive");
    if (a.mu == 0.0) throw Error(ErrorCode::PreconditionFailed, "mu = 0 is the undecided borderline");
    const double mu = a.mu;
    if (mu > 0.0 && ledger.delta0 && delta > *ledger.delta0 * (1.0 + 1e-12)) {
        throw Error(ErrorCode::PreconditionFailed,
                    fmt::format("delta = {:.6g} exceeds delta0 = {:.6g}", delta, *ledger.delta0));
    }

    const int n = options.n;
    const GridFunction reference = sample_u0(s, n);
    const SchemeConfig cfg = default_scheme_config(model, s);

    StabilityVerdict verdict;
    verdict.tube = ledger.eps0;

    EvolveOptions evo;
    if (mu > 0.0) {
        evo.t_final = options.t_final.value_or((std::log(1e6) + 2.0) / mu + 1.0);
    } else {
        evo.t_final = options.t_final.value_or(3.0 * std::log(ledger.eps0 / delta) / (-mu) + 1.0);
        evo.stop_distance = 4.0 * ledger.eps0;
    }
    evo.sample_dt = options.sample_dt.value_or(std::min(mu > 0.0 ? 0.1 : 0.05, evo.t_final / 200.0));
    evo.keep_snapshots = options.keep_snapshots;

    // Distance that the scheme's own truncation error produces from u0.
    {
        EvolveOptions base = evo;
        base.stop_distance = std::numeric_limits<double>::infinity();
        base.keep_snapshots = false;
        const EvolutionTrace still = evolve(model, cfg, reference, reference, base);
        double worst = 0.0;
        for (const TraceSample& sample : still.samples) worst = std::max(worst, sample.dist);
        verdict.floor = 10.0 * worst + kDistanceFloor;
    }
    const double decay_level = std::max(1e-6 * delta, verdict.floor);

    std::mt19937_64 rng(options.seed);
    const double rho_scale = delta / a.rho_sup;
    bool all_decay = true;
    for (int k = 0; k < trials; ++k) {
        TrialResult trial;
        trial.index = k;
        std::optional<GridFunction> phi;
        if (k == 0 && mu > 0.0) {
            trial.label = "extremal";
            phi = tilt_by_rho(a, n, -std::min(ledger.eps_tilde0(0.5 * mu), rho_scale));
        } else if (k == 0) {
            trial.label = "rho_above";
            phi = tilt_by_rho(a, n, rho_scale);
        } else if (k == 1 && mu < 0.0) {
            trial.label = "rho_below";
            phi = tilt_by_rho(a, n, -rho_scale);
        } else {
            trial.label = fmt::format("random_{}", k);
            phi = random_perturbation(reference, delta, rng);
        }
        trial.trace = evolve(model, cfg, *phi, reference, evo);
        trial.initial_distance = trial.trace.samples.front().dist;
        trial.final_distance = trial.trace.back().dist;
        trial.escape_time = escape_time(trial.trace, verdict.tube);

        if (trial.escape_time) {
            trial.kind = VerdictKind::Unstable;
        } else if (trial.final_distance <= decay_level) {
            trial.kind = VerdictKind::AsymptoticallyStable;
        } else {
            trial.kind = VerdictKind::Inconclusive;
        }
        if (mu > 0.0) {
            double t_cut = 0.0;
            for (const TraceSample& sample : trial.trace.samples) {
                if (sample.dist > std::max(1e3 * verdict.floor, 1e-12)) t_cut = sample.t;
            }
            try {
                trial.rate = estimate_rate(trial.trace, std::min(1.0 / mu, 0.5 * t_cut), t_cut);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateWindow) throw;
            }
        }
        all_decay = all_decay && trial.kind == VerdictKind::AsymptoticallyStable;
        if (trial.escape_time && (!verdict.escape_time || *trial.escape_time < *verdict.escape_time)) {
            verdict.escape_time = trial.escape_time;
        }
        verdict.trials.push_back(std::move(trial));
    }

    if (verdict.escape_time) {
        verdict.kind = VerdictKind::Unstable;
    } else if (all_decay) {
        verdict.kind = VerdictKind::AsymptoticallyStable;
        for (const TrialResult& trial : verdict.trials) {
            if (trial.rate && (!verdict.measured_rate || *trial.rate > *verdict.measured_rate)) {
                verdict.measured_rate = trial.rate;
            }
        }
    }
    return verdict;
}

RateBoundsReport rate_bounds_check(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                   const ConstantsLedger& ledger, const RateBoundsOptions& options) {
    if (!(a.mu > 0.0) || !ledger.delta0) {
        throw Error(ErrorCode::PreconditionFailed, fmt::format("rate bounds need mu > 0, got {:.6g}", a.mu));
    }
    if (options.n < 2 * GridFunction::kMinSize || options.n % 2 != 0) {
        throw Error(ErrorCode::PreconditionFailed, "rate bounds need an even n >= 32");
    }
    const double mu = a.mu;
    const SchemeConfig cfg = default_scheme_config(model, s);
    EvolveOptions evo;
    evo.t_final = options.window_hi / mu;
    evo.sample_dt = 0.05 / mu;
    evo.keep_snapshots = false;

    auto measure = [&](std::string label, const std::function<double(double)>& phi) {
        RateMeasurement m;
        m.label = std::move(label);
        double rates[2] = {0.0, 0.0};
        const int grids[2] = {options.n, options.n / 2};
        for (int g = 0; g < 2; ++g) {
            const GridFunction reference = sample_u0(s, grids[g]);
            const GridFunction initial = GridFunction::sample(grids[g], phi);
            const EvolutionTrace trace = evolve(model, cfg, initial, reference, evo);
            rates[g] = estimate_rate(trace, options.window_lo / mu, options.window_hi / mu);
        }
        m.rate_fine = rates[0];
        m.rate_coarse = rates[1];
        m.rate_extrapolated = 2.0 * rates[0] - rates[1];
        return m;
    };

    RateBoundsReport report;
    report.mu = mu;
    report.tol = options.tol;
    const double amplitude = 0.9 * *ledger.delta0;
    std::mt19937_64 rng(options.seed);
    report.upper_ok = true;
    for (int k = 0; k < options.trials; ++k) {
        const NoiseProfile noise(rng, 4);
        RateMeasurement m = measure(fmt::format("random_{}", k),
                                    [&](double x) { return s.u0(x) + amplitude * noise(x); });
        report.upper_ok = report.upper_ok && m.rate_extrapolated <= -mu + options.tol;
        report.random_trials.push_back(std::move(m));
    }
    const double eps = ledger.eps_tilde0(0.5 * mu);
    report.extremal = measure("extremal", [&](double x) { return s.u0(x) - eps * a.rho_at(x); });
    report.lower_ok = report.extremal.rate_extrapolated >= -mu - options.tol;
    return report;
}

double aubry_anchor(const AubryData& a, double x0, double t) {
    double target = std::fmod(a.f_at(x0) - kTwoPi * t / a.Z, kTwoPi);
    if (target < 0.0) target += kTwoPi;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (a.f_at(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PeriodicReport find_periodic(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                             const ConstantsLedger& ledger, double x0, const PeriodicOptions& options) {
    if (!(a.mu < 0.0)) {
        throw Error(ErrorCode::MuNotNegative, fmt::format("periodic solutions need mu < 0, got {:.6g}", a.mu));
    }
    if (!(options.tol > 0.0) || options.max_iters < 1) {
        throw Error(ErrorCode::PreconditionFailed, "find_periodic needs tol > 0 and max_iters >= 1");
    }
    const int n = options.n;
    const double eps = options.eps.value_or(ledger.eps_tilde1.value_or(0.0));
    const Certificate seed_profile = make_periodic_sub(a, ledger, eps, x0);
    const double period = a.period_T;

    PeriodicReport report;
    report.x0 = x0;
    report.eps = eps;
    report.period = period;

    const GridFunction seed = GridFunction::sample(n, [&](double x) { return seed_profile.value(x, 0.0); });
    report.seed.assign(seed.values().begin(), seed.values().end());

    std::vector<double> u0_nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) u0_nodes[static_cast<std::size_t>(i)] = s.u0(static_cast<double>(i) / n);

    std::unordered_map<double, std::size_t> anchor_cache;
    auto anchor_node = [&](double t) {
        const auto it = anchor_cache.find(t);
        if (it != anchor_cache.end()) return it->second;
        const double xa = aubry_anchor(a, x0, t);
        const auto j = static_cast<std::size_t>(std::lround(xa * n)) % static_cast<std::size_t>(n);
        anchor_cache.emplace(t, j);
        return j;
    };

    const SchemeConfig cfg = default_scheme_config(model, s);
    EvolveOptions pinned;
    pinned.t_final = period;
    pinned.sample_dt = period;
    pinned.keep_snapshots = false;
    pinned.after_step = [&](double t, std::span<double> w) {
        const std::size_t j = anchor_node(t);
        w[j] = std::min(w[j], u0_nodes[j]);
    };

    auto return_map = [&](const GridFunction& w) { return evolve(model, cfg, w, w, pinned).final_state(); };

    GridFunction w = seed;
    for (int k = 1; k <= options.max_iters; ++k) {
        GridFunction next = return_map(w);
        double defect = 0.0;
        for (int i = 0; i < n; ++i) defect = std::max(defect, w[i] - next[i]);
        report.monotonicity_defect = std::max(report.monotonicity_defect, defect);
        report.increments.push_back(next.sup_distance(w));
        report.iterations = k;
        w = std::move(next);
        if (report.increments.back() < options.tol) {
            report.converged = true;
            break;
        }
    }
    if (!report.converged) {
        throw Error(ErrorCode::NoConvergence,
                    fmt::format("return map increment {:.3e} after {} iterations (tol {:.1e})",
                                report.increments.back(), report.iterations, options.tol));
    }
    report.fixed_point.assign(w.values().begin(), w.values().end());
    report.seed_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) report.seed_margin = std::min(report.seed_margin, w[i] - seed[i]);

    EvolveOptions period_run = pinned;
    period_run.sample_dt = period / options.samples_per_period;
    period_run.keep_snapshots = true;
    report.period_trace = evolve(model, cfg, w, w, period_run);
    for (const TraceSample& sample : report.period_trace.samples) {
        report.variation = std::max(report.variation, sample.dist);
    }
    report.return_gap = report.period_trace.back().dist;

    EvolveOptions free_run = pinned;
    free_run.after_step = nullptr;
    report.free_return_gap = evolve(model, cfg, w, w, free_run).back().dist;

    if (report.variation <= 10.0 * options.tol) {
        throw Error(ErrorCode::Trivialized,
                    fmt::format("fixed point varies by only {:.3e} over one period", report.variation));
    }
    return report;
}

}  // namespace hjstab
