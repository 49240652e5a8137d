#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hjstab {

/// Truncated real Fourier series on the unit circle,
///   a0 + sum_k (a_k cos 2πkx + b_k sin 2πkx),  k = 1..modes().
/// Coefficient vectors are indexed from k = 1 (element 0 is mode 1).
class FourierSeries {
public:
    static constexpr std::size_t kMaxModes = 32;

    FourierSeries() = default;
    FourierSeries(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

    static FourierSeries constant(double a0) { return FourierSeries(a0, {}, {}); }

    double operator()(double x) const;
    double derivative(double x) const;

    /// Mean over one period (the a0 coefficient).
    [[nodiscard]] double mean() const noexcept { return a0_; }
    /// |a0| + sum_k (|a_k| + |b_k|), an upper bound for sup |series|.
    [[nodiscard]] double abs_bound() const noexcept;
    /// Upper bound for sup |series'|.
    [[nodiscard]] double derivative_bound() const noexcept;

    [[nodiscard]] std::size_t modes() const noexcept { return cos_.size(); }
    [[nodiscard]] bool is_constant() const noexcept;
    [[nodiscard]] const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
    [[nodiscard]] const std::vector<double>& sin_coeffs() const noexcept { return sin_; }

    /// Human-readable form, e.g. "1 + 0.5 sin(2πx)".
    [[nodiscard]] std::string describe() const;

private:
    double a0_ = 0.0;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

}  // namespace hjstab
