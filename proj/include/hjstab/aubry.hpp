#pragma once

#include <optional>
#include <vector>

#include "hjstab/hamiltonian.hpp"
#include "hjstab/numerics.hpp"

namespace hjstab {

/// Quantities carried by the Aubry orbit of a stationary solution u0:
///
///   B(x)   = H_p(x, u0', u0)
///   mu     = ∫ H_u/B / ∫ 1/B
///   rho(x) = exp ∫_0^x (mu - H_u)/B,   rho(0) = rho(1) = 1
///   f(x)   = 2π ∫_0^x 1/B / ∫_0^1 1/B
///   Z      = -∫_0^1 1/B,   period T = |Z|
///
/// Tables hold grid_n + 1 nodes x_i = i / grid_n including the closing node
/// x = 1. Between nodes rho is interpolated with periodic cubics; rho' is
/// always obtained from the identity rho' B = rho (mu - H_u), never by
/// differencing.
class AubryData {
public:
    int grid_n = 0;
    double mu = 0.0;
    double Z = 0.0;
    double period_T = 0.0;
    int b_sign = 0;
    double min_abs_b = 0.0;
    double rho_sup = 0.0;
    double rho_min = 0.0;
    double drho_sup = 0.0;
    double df_sup = 0.0;
    /// |mu(n) - mu(2n)| from the refinement check.
    double mu_refinement_delta = 0.0;

    std::vector<double> x, B, rho, drho, f;

    double B_at(double x) const;
    double du_at(double x) const;  // H_u(x, u0', u0)
    double rho_at(double x) const;
    double drho_at(double x) const;
    /// f extended to R by f(x + 1) = f(x) + 2π.
    double f_at(double x) const;
    double df_at(double x) const;  // f' = -2π / (Z B)

    [[nodiscard]] const HamiltonianModel& model() const noexcept { return model_; }
    [[nodiscard]] const StationarySolution& stationary() const noexcept { return stationary_; }

private:
    friend AubryData compute_aubry(const HamiltonianModel&, const StationarySolution&, int);

    HamiltonianModel model_;
    StationarySolution stationary_;
    PeriodicCubic rho_interp_;
    PeriodicCubic f_offset_interp_;  // f(x) - 2πx, which is periodic
};

/// Composite Simpson on n panels (midpoint-augmented), with a refinement check
/// against 2n. n must be a power of two >= 64.
AubryData compute_aubry(const HamiltonianModel& model, const StationarySolution& s, int n);

/// Constants used by the sub/supersolution certificates.
struct ConstantsLedger {
    double mu = 0.0;
    double M0 = 0.0;
    double M0_tilde = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
    double alpha = 0.0;
    double eps0 = 0.0;
    /// Only defined for mu > 0.
    std::optional<double> delta0;
    /// Only defined for mu < 0.
    std::optional<double> eps_tilde1;
    /// mu == 0: no strict certificate exists and eps0 is 0.
    bool degenerate_mu = false;

    /// Lattice extent used for M0: |s| <= p_radius, |r| <= u_radius around
    /// (u0', u0).
    double p_radius = 0.0;
    double u_radius = 0.0;

    /// min{ |mu - theta| M2 / (M0 M1 (M1 + M2)), 1 }
    [[nodiscard]] double eps_tilde0(double theta) const;
};

struct ConstantsOptions {
    int lattice_per_axis = 33;
    /// M0 = max + inflation * (max - min) over the lattice.
    double inflation = 0.10;
};

ConstantsLedger compute_constants(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                                  const ConstantsOptions& options = {});

/// Time average of H_u along the Aubry orbit ẋ = B(x) over one period,
/// integrated with RK4. Throws PeriodMismatch if the orbit does not close.
double mu_flow_average(const HamiltonianModel& model, const StationarySolution& s, const AubryData& a,
                       int rk4_steps);

/// First time the orbit ẋ = B(x), x(0) = 0 has travelled once around the
/// circle (RK4 with Newton refinement of the final partial step).
double aubry_return_time(const HamiltonianModel& model, const StationarySolution& s, int rk4_steps);

}  // namespace hjstab
