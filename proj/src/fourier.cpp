#include "hjstab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hjstab/error.hpp"

namespace hjstab {

FourierSeries::FourierSeries(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : a0_(a0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    const std::size_t modes = std::max(cos_.size(), sin_.size());
    if (modes > kMaxModes) {
        throw Error(ErrorCode::PreconditionFailed,
                    fmt::format("Fourier series truncated at {} modes, got {}", kMaxModes, modes));
    }
    cos_.resize(modes, 0.0);
    sin_.resize(modes, 0.0);
    // Trailing zero modes cost a recurrence step each; drop them.
    while (!cos_.empty() && cos_.back() == 0.0 && sin_.back() == 0.0) {
        cos_.pop_back();
        sin_.pop_back();
    }
}

// Both evaluators use one sincos call and the angle-addition recurrence for
// the higher harmonics.
double FourierSeries::operator()(double x) const {
    double sum = a0_;
    if (cos_.empty()) return sum;
    const double theta = 2.0 * std::numbers::pi * x;
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    double ck = c1;
    double sk = s1;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        sum += cos_[k] * ck + sin_[k] * sk;
        const double next_c = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = next_c;
    }
    return sum;
}

double FourierSeries::derivative(double x) const {
    if (cos_.empty()) return 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    const double theta = two_pi * x;
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    double ck = c1;
    double sk = s1;
    double sum = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const double freq = two_pi * static_cast<double>(k + 1);
        sum += freq * (-cos_[k] * sk + sin_[k] * ck);
        const double next_c = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = next_c;
    }
    return sum;
}

double FourierSeries::abs_bound() const noexcept {
    double bound = std::abs(a0_);
    for (std::size_t k = 0; k < cos_.size(); ++k) bound += std::abs(cos_[k]) + std::abs(sin_[k]);
    return bound;
}

double FourierSeries::derivative_bound() const noexcept {
    double bound = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        bound += 2.0 * std::numbers::pi * static_cast<double>(k + 1) * (std::abs(cos_[k]) + std::abs(sin_[k]));
    }
    return bound;
}

bool FourierSeries::is_constant() const noexcept { return cos_.empty(); }

std::string FourierSeries::describe() const {
    std::string out = fmt::format("{:g}", a0_);
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const std::string arg = k == 0 ? "2πx" : fmt::format("{}πx", 2 * (k + 1));
        if (cos_[k] != 0.0) out += fmt::format(" {} {:g} cos({})", cos_[k] < 0 ? '-' : '+', std::abs(cos_[k]), arg);
        if (sin_[k] != 0.0) out += fmt::format(" {} {:g} sin({})", sin_[k] < 0 ? '-' : '+', std::abs(sin_[k]), arg);
    }
    return out;
}

}  // namespace hjstab
