// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <fmt/format.h>

#include "hjstab/analysis.hpp"
#include "hjstab/certificates.hpp"
#include "hjstab/error.hpp"

using namespace hjstab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances and runtime limits, one block per criterion.
constexpr double kMuTol = 1e-10;
constexpr double kRhoCloseTol = 1e-8;
constexpr double kLimit1 = 0.1;

constexpr double kFlowAverageTol = 1e-6;
constexpr int kFlowAverageSteps = 4000;
constexpr double kLimit2 = 1.0;

constexpr int kCertGrid = 256;
constexpr double kLimit3 = 5.0;

constexpr double kOdeRateTol = 0.05;
constexpr double kOdeWindowLo = 1.0;
constexpr double kOdeWindowHi = 5.0;
constexpr double kLimit4 = 10.0;

constexpr double kRateBoundTol = 0.1;
constexpr double kLimit5 = 60.0;

constexpr double kEscapeDelta = 1e-3;
constexpr double kEscapeRelTol = 0.2;
constexpr double kLimit6 = 10.0;

constexpr int kPeriodicN = 512;
constexpr int kPeriodicMaxIters = 200;
constexpr double kPeriodicTol = 1e-6;
constexpr double kMinVariation = 1e-4;
constexpr double kMinAnchorGap = 1e-6;
constexpr double kLimit7 = 120.0;

constexpr int kComparisonPairs = 100;
constexpr int kComparisonN = 256;
constexpr double kOrderSlack = -1e-12;
constexpr double kLimit8 = 60.0;

constexpr double kOrbitTol = 1e-6;
constexpr int kOrbitSteps = 4000;
constexpr double kLimit9 = 1.0;

constexpr double kOrderLo = 1.8;
constexpr double kOrderHi = 2.2;
constexpr double kLimit10 = 10.0;

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(int k, const char* title, double limit, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const Error& e) {
        out = {false, fmt::format("threw {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < limit;
    const bool pass = out.ok && in_time;
    if (!pass) ++failures;
    fmt::print("{} [{}] {}: {}; runtime {:.3f} s (limit {} s{})\n", pass ? "PASS" : "FAIL", k, title, out.detail, secs,
               limit, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

struct Setup {
    HamiltonianModel model;
    StationarySolution s;
    AubryData a;
    ConstantsLedger ledger;

    Setup(HamiltonianModel m, double level, int n = 256) : model(std::move(m)), s(constant_solution(level)) {
        a = compute_aubry(model, s, n);
        ledger = compute_constants(model, s, a);
    }
};

HamiltonianModel ex2(const FourierSeries& lambda) { return example2(FourierSeries(1.0, {}, {0.3}), lambda); }

GridFunction constant_grid(int n, double c) {
    return GridFunction::sample(n, [c](double) { return c; });
}

double ode_rate(int n) {
    const HamiltonianModel m = example1(FourierSeries::constant(1.0));
    const SchemeConfig cfg = default_scheme_config(m, constant_solution(0.0));
    EvolveOptions opt;
    opt.t_final = kOdeWindowHi;
    opt.sample_dt = 0.05;
    opt.keep_snapshots = false;
    const EvolutionTrace tr = evolve(m, cfg, constant_grid(n, 0.01), constant_grid(n, 0.0), opt);
    return estimate_rate(tr, kOdeWindowLo, kOdeWindowHi);
}

double transport_error(int n) {
    const HamiltonianModel m = linear_transport(1.0);
    SchemeConfig cfg;
    cfg.lf_alpha = 1.0;
    const auto phi = GridFunction::sample(n, [](double x) { return std::sin(kTwoPi * x); });
    EvolveOptions opt;
    opt.t_final = 0.5;
    opt.sample_dt = 0.5;
    const EvolutionTrace tr = evolve(m, cfg, phi, constant_grid(n, 0.0), opt);
    const auto exact = GridFunction::sample(n, [](double x) { return std::sin(kTwoPi * (x - 0.5)); });
    return tr.final_state().sup_distance(exact);
}

Outcome check_certificates(const Setup& e, const char* name) {
    const VerifyGrid grid{kCertGrid, kCertGrid, {}};
    const double mu = e.a.mu;
    std::vector<Certificate> certs;
    certs.push_back(make_stationary(e.a, e.ledger, e.ledger.eps0));
    certs.push_back(make_stationary(e.a, e.ledger, -e.ledger.eps0));
    if (mu > 0.0) {
        const double half = 0.5 * mu;
        const double twice = 2.0 * mu;
        certs.push_back(make_evolutionary(e.a, e.ledger, e.ledger.eps_tilde0(half), half));
        certs.push_back(make_evolutionary(e.a, e.ledger, -e.ledger.eps_tilde0(half), half));
        certs.push_back(make_evolutionary(e.a, e.ledger, e.ledger.eps_tilde0(twice), twice));
        certs.push_back(make_evolutionary(e.a, e.ledger, -e.ledger.eps_tilde0(twice), twice));
    } else {
        const double theta = 0.5 * mu;
        const double eps = e.ledger.eps_tilde0(theta) * std::exp(-2.0);
        certs.push_back(make_evolutionary(e.a, e.ledger, eps, theta));
        certs.push_back(make_evolutionary(e.a, e.ledger, -eps, theta));
        certs.push_back(make_periodic_sub(e.a, e.ledger, *e.ledger.eps_tilde1, 0.0));
        certs.push_back(make_periodic_sub(e.a, e.ledger, *e.ledger.eps_tilde1, 0.37));
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (const Certificate& c : certs) {
        const ResidualReport r = verify_certificate(c, e.model, grid);
        const double signed_worst = is_sub(c.kind) ? r.max_residual : -r.min_residual;
        worst = std::max(worst, signed_worst);
        if (!r.passed) return {false, fmt::format("{} {} failed, worst {:.3e}", name, to_string(c.kind), signed_worst)};
    }
    return {true, fmt::format("{}: {} certificates, worst signed residual {:.3e}", name, certs.size(), worst)};
}

}  // namespace

int main() {
    criterion(1, "mu quadrature and rho closure", kLimit1, [] {
        const HamiltonianModel m = example1(FourierSeries(1.0, {0.0, 0.25}, {0.5}));
        const AubryData a = compute_aubry(m, constant_solution(0.0), 256);
        const double dmu = std::abs(a.mu - 1.0);
        const double drho = std::abs(a.rho.back() - 1.0);
        return Outcome{dmu <= kMuTol && drho <= kRhoCloseTol,
                       fmt::format("|mu - 1| = {:.2e} (tol {:.0e}), |rho(1) - 1| = {:.2e} (tol {:.0e})", dmu, kMuTol,
                                   drho, kRhoCloseTol)};
    });

    criterion(2, "flow average vs quadrature", kLimit2, [] {
        double worst = 0.0;
        for (double level : {1.0, -1.0}) {
            const HamiltonianModel m = ex2(FourierSeries::constant(1.0));
            const StationarySolution s = constant_solution(level);
            const AubryData a = compute_aubry(m, s, 256);
            worst = std::max(worst, std::abs(mu_flow_average(m, s, a, kFlowAverageSteps) - a.mu));
        }
        return Outcome{worst <= kFlowAverageTol,
                       fmt::format("max |mu_flow - mu| over u = +-1: {:.2e} (tol {:.0e})", worst, kFlowAverageTol)};
    });

    criterion(3, "certificate residual signs", kLimit3, [] {
        const Setup cases[] = {
            {example1(FourierSeries(1.0, {}, {0.5})), 0.0},
            {example1(FourierSeries(-1.0, {}, {-0.5})), 0.0},
            {ex2(FourierSeries::constant(1.0)), 1.0},
            {ex2(FourierSeries::constant(1.0)), -1.0},
        };
        const char* names[] = {"ex1 mu>0", "ex1 mu<0", "ex2 u=1", "ex2 u=-1"};
        std::string detail;
        for (int i = 0; i < 4; ++i) {
            const Outcome o = check_certificates(cases[i], names[i]);
            if (!o.ok) return o;
            detail += (i ? "; " : "") + o.detail;
        }
        return Outcome{true, detail};
    });

    criterion(4, "ODE-reduction decay rate", kLimit4, [] {
        const double coarse = ode_rate(256);
        const double fine = ode_rate(512);
        const double extrapolated = 2.0 * fine - coarse;
        return Outcome{std::abs(extrapolated + 1.0) <= kOdeRateTol,
                       fmt::format("rate(256) = {:.5f}, rate(512) = {:.5f}, extrapolated {:.5f} (target -1 +- {})",
                                   coarse, fine, extrapolated, kOdeRateTol)};
    });

    criterion(5, "rate bounds for lambda = 1 + 0.5 sin", kLimit5, [] {
        const Setup e(example1(FourierSeries(1.0, {}, {0.5})), 0.0);
        RateBoundsOptions opt;
        opt.tol = kRateBoundTol;
        const RateBoundsReport r = rate_bounds_check(e.model, e.s, e.a, e.ledger, opt);
        double slowest = -std::numeric_limits<double>::infinity();
        for (const RateMeasurement& m : r.random_trials) slowest = std::max(slowest, m.rate_extrapolated);
        return Outcome{r.upper_ok && r.lower_ok,
                       fmt::format("mu = {:.6f}; slowest random {:.4f} <= {:.4f}; extremal {:.4f} >= {:.4f}", r.mu,
                                   slowest, -r.mu + r.tol, r.extremal.rate_extrapolated, -r.mu - r.tol)};
    });

    criterion(6, "escape from the eps0-tube for lambda = -1", kLimit6, [] {
        const Setup e(example1(FourierSeries::constant(-1.0)), 0.0);
        StabilityOptions opt;
        opt.n = 512;
        const StabilityVerdict v = classify_stability(e.model, e.s, e.a, e.ledger, 3, kEscapeDelta, opt);
        const double predicted = std::log(e.ledger.eps0 / kEscapeDelta);
        const double escape = v.escape_time.value_or(std::nan(""));
        const bool ok = v.kind == VerdictKind::Unstable && std::abs(escape - predicted) <= kEscapeRelTol * predicted;
        return Outcome{ok, fmt::format("verdict {}, escape t = {:.4f}, predicted ln(eps0/delta) = {:.4f} +- {:.0f}%",
                                       to_string(v.kind), escape, predicted, 100 * kEscapeRelTol)};
    });

    criterion(7, "nontrivial periodic fixed points", kLimit7, [] {
        const Setup e(example1(FourierSeries::constant(-1.0)), 0.0);
        PeriodicOptions opt;
        opt.n = kPeriodicN;
        opt.max_iters = kPeriodicMaxIters;
        opt.tol = kPeriodicTol;
        const PeriodicReport p0 = find_periodic(e.model, e.s, e.a, e.ledger, 0.0, opt);
        const PeriodicReport p1 = find_periodic(e.model, e.s, e.a, e.ledger, 0.37, opt);
        double gap = 0.0;
        for (std::size_t i = 0; i < p0.fixed_point.size(); ++i) {
            gap = std::max(gap, std::abs(p0.fixed_point[i] - p1.fixed_point[i]));
        }
        const auto good = [](const PeriodicReport& p) {
            return p.converged && p.iterations <= kPeriodicMaxIters && p.increments.back() < kPeriodicTol &&
                   p.variation > kMinVariation;
        };
        return Outcome{good(p0) && good(p1) && gap > kMinAnchorGap,
                       fmt::format("x0 = 0: {} iters, variation {:.4f}; x0 = 0.37: {} iters, variation {:.4f}; "
                                   "anchor gap {:.4f}",
                                   p0.iterations, p0.variation, p1.iterations, p1.variation, gap)};
    });

    criterion(8, "discrete comparison principle", kLimit8, [] {
        const HamiltonianModel m = example1(FourierSeries::constant(1.0));
        const SchemeConfig cfg = default_scheme_config(m, constant_solution(0.0));
        const GridFunction zero = constant_grid(kComparisonN, 0.0);
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> amp(0.01, 0.5);
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < kComparisonPairs; ++k) {
            const GridFunction lo = random_perturbation(zero, amp(rng), rng);
            const GridFunction gap = random_perturbation(zero, amp(rng), rng);
            std::vector<double> hi(static_cast<std::size_t>(kComparisonN));
            for (int i = 0; i < kComparisonN; ++i) hi[static_cast<std::size_t>(i)] = lo[i] + std::abs(gap[i]);
            const EvolutionTrace a = evolve(m, cfg, lo, 2.0, 0.1, zero);
            const EvolutionTrace b = evolve(m, cfg, GridFunction(std::move(hi)), 2.0, 0.1, zero);
            for (std::size_t s = 0; s < a.samples.size(); ++s) {
                const GridFunction& wa = *a.samples[s].snapshot;
                const GridFunction& wb = *b.samples[s].snapshot;
                for (int i = 0; i < kComparisonN; ++i) worst = std::min(worst, wb[i] - wa[i]);
            }
        }
        return Outcome{worst >= kOrderSlack, fmt::format("{} pairs, min(upper - lower) = {:.3e} (slack {:.0e})",
                                                         kComparisonPairs, worst, kOrderSlack)};
    });

    criterion(9, "characteristics stay on the Aubry graph", kLimit9, [] {
        struct Case {
            HamiltonianModel model;
            double level;
        };
        const Case cases[] = {
            {example1(FourierSeries(1.0, {}, {0.5})), 0.0},
            {ex2(FourierSeries::constant(1.0)), 1.0},
            {ex2(FourierSeries::constant(1.0)), -1.0},
        };
        double drift = 0.0;
        double period_err = 0.0;
        for (const Case& c : cases) {
            const AubryData a = compute_aubry(c.model, constant_solution(c.level), 256);
            const ContactState start{0.1, 0.0, c.level};
            for (const ContactState& st : flow_b6(c.model, start, a.period_T, kOrbitSteps)) {
                drift = std::max(drift, std::abs(st.u - c.level));
            }
            period_err = std::max(period_err, std::abs(b6_return_time(c.model, start, kOrbitSteps) - std::abs(a.Z)));
        }
        return Outcome{drift <= kOrbitTol && period_err <= kOrbitTol,
                       fmt::format("max |u - u0| = {:.2e}, max |T_return - |Z|| = {:.2e} (tol {:.0e})", drift,
                                   period_err, kOrbitTol)};
    });

    criterion(10, "first-order convergence on transport", kLimit10, [] {
        double errors[4];
        for (int k = 0; k < 4; ++k) errors[k] = transport_error(128 << k);
        bool ok = true;
        std::string ratios;
        for (int k = 0; k < 3; ++k) {
            const double r = errors[k] / errors[k + 1];
            ok = ok && r >= kOrderLo && r <= kOrderHi;
            ratios += fmt::format("{}e({})/e({}) = {:.4f}", k ? ", " : "", 128 << k, 256 << k, r);
        }
        return Outcome{ok, ratios + fmt::format(" (band [{}, {}])", kOrderLo, kOrderHi)};
    });

    fmt::print("{} of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
