#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hjstab/aubry.hpp"
#include "hjstab/evolution.hpp"

namespace hjstab {

/// Least-squares slope of ln dist against t over samples with t in [t_lo, t_hi].
/// Needs at least 10 samples in the window (DegenerateWindow otherwise).
/// Returns -infinity when any distance in the window is at the 1e-14 floor.
double estimate_rate(const EvolutionTrace& trace, double t_lo, double t_hi);

inline constexpr double kDistanceFloor = 1e-14;

/// base + low-pass Fourier noise (modes 0..modes) rescaled so that its sup norm
/// equals amplitude.
GridFunction random_perturbation(const GridFunction& base, double amplitude, std::mt19937_64& rng, int modes = 4);

/// u0 + scale * rho on the grid.
GridFunction tilt_by_rho(const AubryData& a, int n, double scale);

enum class VerdictKind { AsymptoticallyStable, Unstable, Inconclusive };

std::string_view to_string(VerdictKind kind) noexcept;

struct TrialResult {
    int index = 0;
    std::string label;
    VerdictKind kind = VerdictKind::Inconclusive;
    double initial_distance = 0.0;
    double final_distance = 0.0;
    std::optional<double> rate;
    std::optional<double> escape_time;
    EvolutionTrace trace;
};

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    /// Worst (largest) decay rate over the trials, AsymptoticallyStable only.
    std::optional<double> measured_rate;
    /// Earliest ε0-tube exit, Unstable only.
    std::optional<double> escape_time;
    double tube = 0.0;
    double floor = 0.0;
    std::vector<TrialResult> trials;
};

struct StabilityOptions {
    int n = 512;
    std::uint64_t seed = 1;
    /// Defaults: (ln 1e6 + 2)/mu + 1 for mu > 0, 3 ln(eps0/delta)/|mu| + 1 for mu < 0.
    std::optional<double> t_final;
    std::optional<double> sample_dt;
    bool keep_snapshots = false;
};

/// Evolves `trials` initial data in the delta-tube around u0. Trial 0 is the
/// extremal profile u0 - min(eps~0(mu/2), delta/||rho||) rho for mu > 0, and
/// u0 + (delta/||rho||) rho for mu < 0 (trial 1 mirrors it below u0); the
/// remaining trials are random low-pass perturbations of sup norm delta.
/// AsymptoticallyStable when every distance ends below max(1e-6 delta, floor),
/// Unstable when some trace leaves the eps0-tube without re-entering.
StabilityVerdict classify_stability(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                    const ConstantsLedger& ledger, int trials, double delta,
                                    const StabilityOptions& options = {});

struct RateMeasurement {
    std::string label;
    double rate_fine = 0.0;
    double rate_coarse = 0.0;
    /// 2 rate(n) - rate(n/2).
    double rate_extrapolated = 0.0;
};

struct RateBoundsReport {
    bool upper_ok = false;
    bool lower_ok = false;
    double mu = 0.0;
    double tol = 0.1;
    std::vector<RateMeasurement> random_trials;
    RateMeasurement extremal;
};

struct RateBoundsOptions {
    int n = 512;
    int trials = 5;
    double tol = 0.1;
    std::uint64_t seed = 1;
    /// Fit window in units of 1/mu.
    double window_lo = 2.0;
    double window_hi = 12.0;
};

/// Random data in the delta0-tube must decay at least as fast as -mu + tol;
/// the extremal u0 - eps~0(mu/2) rho must decay no faster than -mu - tol.
/// Rates are Richardson-extrapolated over n and n/2.
RateBoundsReport rate_bounds_check(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                   const ConstantsLedger& ledger, const RateBoundsOptions& options = {});

struct PeriodicOptions {
    int n = 512;
    int max_iters = 200;
    double tol = 1e-6;
    /// Seed amplitude; defaults to eps~1.
    std::optional<double> eps;
    /// Snapshots per period when measuring the time variation.
    int samples_per_period = 64;
};

struct PeriodicReport {
    double x0 = 0.0;
    double eps = 0.0;
    double period = 0.0;
    int iterations = 0;
    bool converged = false;
    /// ||Φ^{k+1} w - Φ^k w|| per iteration.
    std::vector<double> increments;
    /// max over iterations and nodes of (Φ^k w - Φ^{k+1} w)_+.
    double monotonicity_defect = 0.0;
    /// max over t of ||w(t) - P|| for the fixed point P.
    double variation = 0.0;
    /// ||Φ(P) - P||.
    double return_gap = 0.0;
    /// ||Φ_free(P) - P|| for the map without the anchor constraint.
    double free_return_gap = 0.0;
    /// min over nodes of P - seed.
    double seed_margin = 0.0;
    std::vector<double> seed;
    std::vector<double> fixed_point;
    EvolutionTrace period_trace;
};

/// Nontrivial periodic solution by fixed-point iteration of the time-T map Φ,
/// seeded with the periodic subsolution anchored at x0. Along the Aubry
/// trajectory through x0 the solution equals u0; Φ imposes this at the grid
/// node nearest the anchor, w_j <- min(w_j, u0(x_j)), after every step. The
/// constraint removes the neutral-shift instability that numerical viscosity
/// otherwise excites and keeps the update monotone.
/// Throws MuNotNegative, NoConvergence, or Trivialized (variation <= 10 tol).
PeriodicReport find_periodic(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                             const ConstantsLedger& ledger, double x0, const PeriodicOptions& options = {});

/// Position at time t of the Aubry trajectory through x0, from
/// f(x(t)) = f(x0) - 2π t / Z.
double aubry_anchor(const AubryData& a, double x0, double t);

}  // namespace hjstab
