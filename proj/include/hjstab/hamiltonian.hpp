#pragma once

#include <functional>
#include <string>

#include "hjstab/fourier.hpp"

namespace hjstab {

/// A scalar function of (x, p, u) on S x R x R.
using PhaseFunction = std::function<double(double x, double p, double u)>;
/// A scalar function of (p, u) with the position already fixed.
using FiberFunction = std::function<double(double p, double u)>;

/// Compact region {x in S, |p| <= p_max, |u| <= u_max} on which derivative
/// bounds of a model are certified by sampling.
struct ValidityBox {
    double p_max = 2.0;
    double u_max = 2.0;
};

/// H restricted to a fixed position x. The scheme evaluates H at the same grid
/// nodes millions of times, so models may precompute their x-dependent
/// coefficients here.
struct FrozenHamiltonian {
    FiberFunction eval;
    FiberFunction d_p;
};

/// Contact Hamiltonian H(x, p, u) with analytic first and second partials.
struct HamiltonianModel {
    std::string id;
    PhaseFunction eval;
    PhaseFunction d_p, d_u, d_x;
    PhaseFunction d_pp, d_uu, d_up, d_xp;
    /// Declared global bound on |∂H/∂u|.
    double kappa = 0.0;
    ValidityBox box;
    /// Optional specialisation of frozen_at(); empty means "wrap eval/d_p".
    std::function<FrozenHamiltonian(double x)> freeze;

    [[nodiscard]] FrozenHamiltonian frozen_at(double x) const;
};

/// Smooth 1-periodic solution u0 of H(x, u0', u0) = 0 with its derivative.
struct StationarySolution {
    std::string id;
    std::function<double(double)> u0;
    std::function<double(double)> du0;
    double residual_tol = 1e-12;
};

/// u0 ≡ level.
StationarySolution constant_solution(double level, double residual_tol = 1e-12);

/// P_max = 2(1 + max|u0'|), U_max = 2(1 + max|u0|), sampled on n points.
ValidityBox default_box(const StationarySolution& s, int n = 256);

// Builtin models --------------------------------------------------------------

/// H = p² + p + λ(x) u.
HamiltonianModel example1(const FourierSeries& lambda, ValidityBox box = {});
/// H = p² + V(x) p + λ(x)(sqrt(u² + 1) - sqrt 2).
HamiltonianModel example2(const FourierSeries& v, const FourierSeries& lambda, ValidityBox box = {});
/// H = c p² (u-independent).
HamiltonianModel pure_quadratic(double c, ValidityBox box = {});
/// H = a p. Not strictly convex; used only as a scheme benchmark.
HamiltonianModel linear_transport(double speed, ValidityBox box = {});

// Assumption checks -----------------------------------------------------------

struct AssumptionReport {
    double min_d_pp = 0.0;        // (H1): must be > 0
    double max_abs_d_u = 0.0;     // (H3): must be <= kappa
    double kappa = 0.0;
    double growth_slope = 0.0;    // (H2) proxy: min (H(x, ±P_max, u) - H(x, 0, u)) / P_max
    double slope_threshold = 0.0;
    bool h1 = false;
    bool h2_proxy = false;
    bool h3 = false;

    [[nodiscard]] bool passed() const noexcept { return h1 && h2_proxy && h3; }
};

/// Samples the validity box on a samples_per_axis^3 lattice. Superlinearity is
/// only checked as a finite slope proxy on the |p| = P_max faces.
AssumptionReport check_assumptions(const HamiltonianModel& model, int samples_per_axis,
                                   double slope_threshold = 0.0);

struct StationaryReport {
    double max_residual = 0.0;
    double min_abs_b = 0.0;
    double max_abs_b = 0.0;
    int b_sign = 0;
    bool residual_ok = false;

    [[nodiscard]] bool passed() const noexcept { return residual_ok && b_sign != 0; }
};

/// Residual of the stationary equation and the sign of B(x) = H_p(x, u0', u0)
/// on an n-point grid. Throws AssumptionAViolated if B vanishes or changes sign.
StationaryReport check_stationary(const HamiltonianModel& model, const StationarySolution& s, int n);

}  // namespace hjstab
