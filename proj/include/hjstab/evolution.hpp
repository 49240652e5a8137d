#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjstab/hamiltonian.hpp"

namespace hjstab {

/// Periodic samples w_i = w(i/n), i = 0..n-1.
class GridFunction {
public:
    static constexpr int kMinSize = 16;

    explicit GridFunction(std::vector<double> values);

    template <class F>
    static GridFunction sample(int n, F&& f) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
        return GridFunction(std::move(v));
    }

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] double spacing() const noexcept { return 1.0 / size(); }
    [[nodiscard]] double node(int i) const noexcept { return static_cast<double>(i) / size(); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] double sup_distance(const GridFunction& other) const;

private:
    std::vector<double> values_;
};

struct SchemeConfig {
    double cfl = 0.4;
    /// Lax–Friedrichs dissipation; must dominate |H_p| on the working range.
    double lf_alpha = 1.0;
    /// Abort level for sup |w|.
    double blowup_threshold = 10.0;

    [[nodiscard]] double max_dt(int n) const noexcept { return cfl / (n * lf_alpha); }
};

/// cfl = 0.4, blowup_threshold = 10 (1 + ||u0||), lf_alpha = max |H_p| over
/// x ∈ S, |p| <= box.p_max, |u| <= blowup_threshold.
SchemeConfig default_scheme_config(const HamiltonianModel& model, const StationarySolution& s);

/// Explicit Euler update with the global Lax–Friedrichs numerical Hamiltonian
///   Ĥ(x, a, b, u) = H(x, (a + b)/2, u) - lf_alpha (b - a)/2
/// on backward/forward differences a, b. Keeps the model's H frozen at every
/// grid node so repeated steps avoid re-evaluating x-dependent coefficients.
class LaxFriedrichsScheme {
public:
    LaxFriedrichsScheme(const HamiltonianModel& model, int n);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(frozen_.size()); }

    /// out = in - dt Ĥ(in). Does not check CFL or blow-up.
    void apply(std::span<const double> in, std::span<double> out, double lf_alpha, double dt) const;

    /// max over nodes of |H_p| at both one-sided differences.
    [[nodiscard]] double max_abs_hp(std::span<const double> w) const;

private:
    std::vector<FrozenHamiltonian> frozen_;
};

/// One checked step. Throws CFLViolation if dt > cfl Δx / lf_alpha and BlowUp
/// if the result leaves the blow-up threshold.
GridFunction step(const HamiltonianModel& model, const SchemeConfig& cfg, const GridFunction& w, double dt);

struct TraceSample {
    double t = 0.0;
    double dist = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::optional<GridFunction> snapshot;
};

/// Time-stamped sup-norm distances to a reference, with optional snapshots.
struct EvolutionTrace {
    std::string model_id;
    int n = 0;
    double lf_alpha = 0.0;
    int lf_alpha_raises = 0;
    bool stopped_early = false;
    std::vector<TraceSample> samples;

    [[nodiscard]] const TraceSample& back() const { return samples.back(); }
    [[nodiscard]] const GridFunction& final_state() const;
};

struct EvolveOptions {
    double t_final = 1.0;
    double sample_dt = 0.1;
    bool keep_snapshots = true;
    /// Stop once the distance to the reference reaches this level.
    double stop_distance = std::numeric_limits<double>::infinity();
    /// Invoked after every step with the new time; may modify the values.
    std::function<void(double t, std::span<double> values)> after_step;
};

/// Repeated steps with dt chosen from the CFL bound and shortened so every
/// sample time is hit exactly. lf_alpha is re-validated against the running
/// solution at each sample and raised (x1.25 margin) if it no longer dominates.
EvolutionTrace evolve(const HamiltonianModel& model, SchemeConfig cfg, const GridFunction& phi,
                      const GridFunction& reference, const EvolveOptions& options);

EvolutionTrace evolve(const HamiltonianModel& model, const SchemeConfig& cfg, const GridFunction& phi,
                      double t_final, double sample_dt, const GridFunction& reference);

// Characteristics -------------------------------------------------------------

struct ContactState {
    double x = 0.0;
    double p = 0.0;
    double u = 0.0;
};

/// RK4 for ẋ = H_p, ṗ = -H_x - H_u p, u̇ = H_p p - H with x wrapped mod 1.
/// Returns steps + 1 states including the start.
std::vector<ContactState> flow_b6(const HamiltonianModel& model, const ContactState& start, double t_final,
                                  int steps);

/// First time the characteristic from start has wound once around the circle.
/// dt = 1 / (steps_per_unit |H_p(start)|); the final partial step is refined by
/// Newton iteration.
double b6_return_time(const HamiltonianModel& model, const ContactState& start, int steps_per_unit);

}  // namespace hjstab
