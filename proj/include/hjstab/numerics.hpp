#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hjstab {

/// One classical Runge–Kutta step for ẏ = f(y) (autonomous systems only).
template <std::size_t N, class Rhs>
std::array<double, N> rk4_step(const std::array<double, N>& y, double dt, Rhs&& rhs) {
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
        return out;
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(y, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(y, dt, k3));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// x mod 1 in [0, 1).
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

/// Four-point Lagrange interpolation of 1-periodic data sampled at i/n.
class PeriodicCubic {
public:
    PeriodicCubic() = default;
    explicit PeriodicCubic(std::vector<double> samples) : samples_(std::move(samples)) {}

    double operator()(double x) const {
        const auto n = static_cast<long>(samples_.size());
        const double s = wrap_unit(x) * static_cast<double>(n);
        const long i = static_cast<long>(std::floor(s));
        const double t = s - static_cast<double>(i);
        auto at = [&](long k) { return samples_[static_cast<std::size_t>(((k % n) + n) % n)]; };
        const double fm = at(i - 1), f0 = at(i), f1 = at(i + 1), f2 = at(i + 2);
        return -t * (t - 1.0) * (t - 2.0) / 6.0 * fm + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f0 -
               (t + 1.0) * t * (t - 2.0) / 2.0 * f1 + (t + 1.0) * t * (t - 1.0) / 6.0 * f2;
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }

private:
    std::vector<double> samples_;
};

}  // namespace hjstab
