#include "hjstab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace hjstab {

std::string_view to_string(CertificateKind kind) noexcept {
    switch (kind) {
        case CertificateKind::StationarySub: return "StationarySub";
        case CertificateKind::StationarySuper: return "StationarySuper";
        case CertificateKind::EvolSub: return "EvolSub";
        case CertificateKind::EvolSuper: return "EvolSuper";
        case CertificateKind::PeriodicSub: return "PeriodicSub";
    }
    return "Unknown";
}

bool is_sub(CertificateKind kind) noexcept {
    return kind == CertificateKind::StationarySub || kind == CertificateKind::EvolSub ||
           kind == CertificateKind::PeriodicSub;
}

bool is_stationary(CertificateKind kind) noexcept {
    return kind == CertificateKind::StationarySub || kind == CertificateKind::StationarySuper;
}

namespace {

void check_eps(bool ok, EpsPolicy policy, const std::string& message) {
    if (!ok && policy == EpsPolicy::Enforce) throw Error(ErrorCode::EpsOutOfRange, message);
}

}  // namespace

Certificate make_stationary(const AubryData& a, const ConstantsLedger& ledger, double eps, EpsPolicy policy) {
    if (a.mu == 0.0) {
        throw Error(ErrorCode::PreconditionFailed, "stationary certificates need mu != 0 (DegenerateMu)");
    }
    check_eps(eps != 0.0 && std::abs(eps) <= ledger.eps0, policy,
              fmt::format("need 0 < |eps| <= eps0 = {:.6g}, got {:.6g}", ledger.eps0, eps));

    auto data = std::make_shared<const AubryData>(a);
    const double shift = (a.mu > 0.0 ? 1.0 : -1.0) * eps;

    Certificate c;
    c.kind = eps > 0.0 ? CertificateKind::StationarySub : CertificateKind::StationarySuper;
    c.regime = Regime::Stationary;
    c.eps = eps;
    c.value = [data, shift](double x, double) { return data->stationary().u0(x) - shift * data->rho_at(x); };
    c.dx = [data, shift](double x, double) { return data->stationary().du0(x) - shift * data->drho_at(x); };
    c.dt = [](double, double) { return 0.0; };
    return c;
}

Certificate make_evolutionary(const AubryData& a, const ConstantsLedger& ledger, double eps, double theta,
                              EpsPolicy policy) {
    const double mu = a.mu;
    Certificate c;
    c.eps = eps;
    c.theta = theta;
    if (mu > 0.0 && theta >= 0.0 && theta < mu) {
        c.regime = Regime::Decay;
        c.kind = eps > 0.0 ? CertificateKind::EvolSub : CertificateKind::EvolSuper;
    } else if (mu < 0.0 && theta > mu && theta < 0.0) {
        c.regime = Regime::FiniteGrowth;
        c.kind = eps > 0.0 ? CertificateKind::EvolSuper : CertificateKind::EvolSub;
    } else if (mu > 0.0 && theta > mu) {
        c.regime = Regime::FastDecay;
        c.kind = eps > 0.0 ? CertificateKind::EvolSuper : CertificateKind::EvolSub;
    } else {
        std::string expected;
        if (mu > 0.0) {
            expected = fmt::format("theta in [0, {0:.6g}) or ({0:.6g}, inf) for mu = {0:.6g}", mu);
        } else if (mu < 0.0) {
            expected = fmt::format("theta in ({0:.6g}, 0) for mu = {0:.6g}", mu);
        } else {
            expected = "mu != 0";
        }
        throw Error(ErrorCode::RegimeMismatch, fmt::format("theta = {:.6g} is outside {}", theta, expected));
    }

    const double cap = ledger.eps_tilde0(theta);
    check_eps(eps != 0.0 && std::abs(eps) <= cap, policy,
              fmt::format("need 0 < |eps| <= eps~0({:.6g}) = {:.6g}, got {:.6g}", theta, cap, eps));
    if (c.regime == Regime::FiniteGrowth) {
        c.valid_t.end = std::max(0.0, (std::log(cap) - std::log(std::abs(eps))) / (-theta));
    }

    auto data = std::make_shared<const AubryData>(a);
    c.value = [data, eps, theta](double x, double t) {
        return data->stationary().u0(x) - eps * data->rho_at(x) * std::exp(-theta * t);
    };
    c.dx = [data, eps, theta](double x, double t) {
        return data->stationary().du0(x) - eps * data->drho_at(x) * std::exp(-theta * t);
    };
    c.dt = [data, eps, theta](double x, double t) {
        return eps * theta * data->rho_at(x) * std::exp(-theta * t);
    };
    return c;
}

Certificate make_periodic_sub(const AubryData& a, const ConstantsLedger& ledger, double eps, double x0,
                              EpsPolicy policy) {
    if (!(a.mu < 0.0)) {
        throw Error(ErrorCode::MuNotNegative, fmt::format("periodic subsolutions need mu < 0, got {:.6g}", a.mu));
    }
    const double cap = ledger.eps_tilde1.value_or(0.0);
    check_eps(eps > 0.0 && eps <= cap, policy, fmt::format("need 0 < eps <= eps~1 = {:.6g}, got {:.6g}", cap, eps));

    auto data = std::make_shared<const AubryData>(a);
    const double f_anchor = a.f_at(x0);
    const double omega = 2.0 * std::numbers::pi / a.Z;

    Certificate c;
    c.kind = CertificateKind::PeriodicSub;
    c.regime = Regime::Periodic;
    c.eps = eps;
    c.x0 = x0;
    c.period = a.period_T;
    auto phase = [data, f_anchor, omega](double x, double t) {
        return -0.5 * std::numbers::pi + data->f_at(x) - f_anchor + omega * t;
    };
    c.value = [data, eps, phase](double x, double t) {
        return data->stationary().u0(x) + eps * data->rho_at(x) * (1.0 + std::sin(phase(x, t)));
    };
    c.dx = [data, eps, phase](double x, double t) {
        const double F = phase(x, t);
        return data->stationary().du0(x) + eps * data->drho_at(x) * (1.0 + std::sin(F)) +
               eps * data->rho_at(x) * std::cos(F) * data->df_at(x);
    };
    c.dt = [data, eps, phase, omega](double x, double t) {
        return eps * data->rho_at(x) * std::cos(phase(x, t)) * omega;
    };
    return c;
}

SignViolation::SignViolation(ResidualReport report)
    : Error(ErrorCode::SignViolation,
            fmt::format("{} residual {:.6e} at (x={:.6g}, t={:.6g})", to_string(report.kind), report.worst_residual,
                        report.worst_x, report.worst_t)),
      report_(std::move(report)) {}

ResidualReport verify_certificate(const Certificate& c, const HamiltonianModel& model, const VerifyGrid& grid) {
    const bool stationary = is_stationary(c.kind);
    if (grid.nx < 64 || (!stationary && grid.nt < 64)) {
        throw Error(ErrorCode::PreconditionFailed, "verify_certificate needs nx >= 64 and nt >= 64");
    }
    double t_max = 0.0;
    if (!stationary) {
        if (grid.t_max) {
            t_max = *grid.t_max;
        } else if (c.kind == CertificateKind::PeriodicSub) {
            t_max = c.period;
        } else if (c.valid_t.bounded()) {
            t_max = c.valid_t.end;
        } else {
            t_max = 10.0 / std::max(std::abs(c.theta), 0.1);
        }
        if (t_max > c.valid_t.end * (1.0 + 1e-12)) {
            throw Error(ErrorCode::OutsideValidWindow,
                        fmt::format("t_max = {:.6g} exceeds the validity window end {:.6g}", t_max, c.valid_t.end));
        }
    }

    const bool sub = is_sub(c.kind);
    const int nt = stationary ? 1 : grid.nt;
    ResidualReport report;
    report.kind = c.kind;
    report.max_residual = -std::numeric_limits<double>::infinity();
    report.min_residual = std::numeric_limits<double>::infinity();
    report.worst_residual = sub ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    report.slices.reserve(static_cast<std::size_t>(nt));

    for (int j = 0; j < nt; ++j) {
        const double t = nt == 1 ? 0.0 : t_max * j / (nt - 1);
        ResidualSlice slice{t, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (int i = 0; i < grid.nx; ++i) {
            const double x = static_cast<double>(i) / grid.nx;
            const double r = c.dt(x, t) + model.eval(x, c.dx(x, t), c.value(x, t));
            if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, fmt::format("residual at (x={}, t={})", x, t));
            slice.min_residual = std::min(slice.min_residual, r);
            slice.max_residual = std::max(slice.max_residual, r);
            if (sub ? r > report.worst_residual : r < report.worst_residual) {
                report.worst_residual = r;
                report.worst_x = x;
                report.worst_t = t;
            }
        }
        report.min_residual = std::min(report.min_residual, slice.min_residual);
        report.max_residual = std::max(report.max_residual, slice.max_residual);
        report.slices.push_back(slice);
    }
    report.passed = sub ? report.max_residual <= kResidualSignTolerance
                        : report.min_residual >= -kResidualSignTolerance;
    if (!report.passed) throw SignViolation(std::move(report));
    return report;
}

}  // namespace hjstab
