#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hjstab/aubry.hpp"
#include "hjstab/error.hpp"

namespace hjstab {

enum class CertificateKind { StationarySub, StationarySuper, EvolSub, EvolSuper, PeriodicSub };

std::string_view to_string(CertificateKind kind) noexcept;
[[nodiscard]] bool is_sub(CertificateKind kind) noexcept;
[[nodiscard]] bool is_stationary(CertificateKind kind) noexcept;

struct TimeWindow {
    double begin = 0.0;
    double end = std::numeric_limits<double>::infinity();
    [[nodiscard]] bool bounded() const noexcept { return std::isfinite(end); }
};

/// Which construction produced the profile.
enum class Regime { Stationary, Decay, FiniteGrowth, FastDecay, Periodic };

/// Explicit smooth sub- or supersolution together with its analytic
/// derivatives. The profile closures own a copy of the Aubry data.
struct Certificate {
    CertificateKind kind = CertificateKind::StationarySub;
    Regime regime = Regime::Stationary;
    double eps = 0.0;
    double theta = 0.0;
    double x0 = 0.0;
    TimeWindow valid_t;
    /// Time period of the profile (PeriodicSub only, 0 otherwise).
    double period = 0.0;

    std::function<double(double x, double t)> value;
    std::function<double(double x, double t)> dx;
    std::function<double(double x, double t)> dt;
};

/// Enforce rejects eps outside the admissible range; Unchecked builds the
/// profile anyway (used to demonstrate that oversized eps breaks the sign).
enum class EpsPolicy { Enforce, Unchecked };

/// u_eps = u0 - sign(mu) eps rho; sub for eps in (0, eps0], super for [-eps0, 0).
Certificate make_stationary(const AubryData& a, const ConstantsLedger& ledger, double eps,
                            EpsPolicy policy = EpsPolicy::Enforce);

/// w_eps = u0 - eps rho e^{-theta t} in one of three regimes:
///   mu > 0, theta in [0, mu)   : sub (eps > 0) / super (eps < 0) on [0, ∞)
///   mu < 0, theta in (mu, 0)   : super (eps > 0) / sub (eps < 0) on the finite
///                                window [0, (ln eps~0 - ln|eps|) / (-theta)]
///   mu > 0, theta in (mu, ∞)   : super (eps > 0) / sub (eps < 0) on [0, ∞)
/// with |eps| <= eps~0(theta).
Certificate make_evolutionary(const AubryData& a, const ConstantsLedger& ledger, double eps, double theta,
                              EpsPolicy policy = EpsPolicy::Enforce);

/// T-periodic subsolution
///   w = u0 + eps rho + eps rho sin(-π/2 + f(x) - f(x0) + 2π t / Z),
/// requires mu < 0 and 0 < eps <= eps~1.
Certificate make_periodic_sub(const AubryData& a, const ConstantsLedger& ledger, double eps, double x0,
                              EpsPolicy policy = EpsPolicy::Enforce);

struct VerifyGrid {
    int nx = 256;
    int nt = 256;
    /// Last time slice. Defaults: the period for PeriodicSub, the validity
    /// window end when bounded, 10 / max(|theta|, 0.1) otherwise.
    std::optional<double> t_max;
};

struct ResidualSlice {
    double t = 0.0;
    double min_residual = 0.0;
    double max_residual = 0.0;
};

struct ResidualReport {
    CertificateKind kind = CertificateKind::StationarySub;
    double max_residual = 0.0;
    double min_residual = 0.0;
    /// Point where the sign is worst (largest r for sub, smallest for super).
    double worst_x = 0.0;
    double worst_t = 0.0;
    double worst_residual = 0.0;
    bool passed = false;
    std::vector<ResidualSlice> slices;
};

/// Absolute tolerance on the residual sign.
inline constexpr double kResidualSignTolerance = 1e-10;

/// Thrown by verify_certificate when the residual has the wrong sign.
class SignViolation : public Error {
public:
    explicit SignViolation(ResidualReport report);
    [[nodiscard]] const ResidualReport& report() const noexcept { return report_; }

private:
    ResidualReport report_;
};

/// Evaluates r = ∂t w + H(x, ∂x w, w) exactly on an nx x nt grid. Throws
/// SignViolation on failure and OutsideValidWindow if t_max exceeds the window.
ResidualReport verify_certificate(const Certificate& c, const HamiltonianModel& model, const VerifyGrid& grid = {});

}  // namespace hjstab
