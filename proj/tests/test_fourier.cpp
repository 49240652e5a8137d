#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hjstab/error.hpp"
#include "hjstab/fourier.hpp"

using namespace hjstab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double direct_sum(double a0, const std::vector<double>& c, const std::vector<double>& s, double x) {
    double v = a0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        v += c[k] * std::cos(kTwoPi * (k + 1) * x) + s[k] * std::sin(kTwoPi * (k + 1) * x);
    }
    return v;
}

}  // namespace

TEST_CASE("recurrence evaluation matches the direct trigonometric sum") {
    const std::vector<double> c{0.3, -0.2, 0.0, 0.05, 0.01};
    const std::vector<double> s{0.5, 0.1, -0.25, 0.0, 0.02};
    const FourierSeries f(1.5, c, s);
    for (int i = 0; i <= 97; ++i) {
        const double x = -0.3 + 1.7 * i / 97.0;
        CHECK(f(x) == doctest::Approx(direct_sum(1.5, c, s, x)).epsilon(1e-13));
    }
}

TEST_CASE("derivative agrees with a central difference") {
    const FourierSeries f(0.2, {0.3, -0.2, 0.1}, {0.5, 0.1, -0.25});
    const double h = 1e-6;
    for (int i = 0; i < 40; ++i) {
        const double x = i / 40.0 + 0.0123;
        const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
        CHECK(f.derivative(x) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("series is 1-periodic and its mean is a0") {
    const FourierSeries f(0.75, {0.4, 0.0, 0.1}, {0.0, 0.3});
    CHECK(f.mean() == 0.75);
    double avg = 0.0;
    const int m = 1024;
    for (int i = 0; i < m; ++i) avg += f(static_cast<double>(i) / m) / m;
    CHECK(avg == doctest::Approx(0.75).epsilon(1e-14));
    for (double x : {0.0, 0.13, 0.5, 0.91}) CHECK(f(x + 1.0) == doctest::Approx(f(x)).epsilon(1e-13));
}

TEST_CASE("bounds dominate the sampled sup norms") {
    const FourierSeries f(1.0, {0.5, -0.25}, {0.1, 0.3});
    double sup = 0.0;
    double dsup = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double x = i / 4096.0;
        sup = std::max(sup, std::abs(f(x)));
        dsup = std::max(dsup, std::abs(f.derivative(x)));
    }
    CHECK(f.abs_bound() >= sup);
    CHECK(f.derivative_bound() >= dsup);
}

TEST_CASE("construction validates the truncation and trims zero modes") {
    CHECK_THROWS_AS(FourierSeries(1.0, std::vector<double>(33, 0.1), {}), Error);
    const FourierSeries f(1.0, {0.5, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
    CHECK(f.modes() == 1);
    CHECK_FALSE(f.is_constant());
    const FourierSeries g(2.0, {0.0}, {0.0});
    CHECK(g.is_constant());
    CHECK(g.modes() == 0);
    CHECK(FourierSeries::constant(-1.0)(0.37) == -1.0);
}

TEST_CASE("describe prints the nonzero terms") {
    CHECK(FourierSeries::constant(1.0).describe() == "1");
    const std::string d = FourierSeries(1.0, {}, {0.5}).describe();
    CHECK(d.find("0.5") != std::string::npos);
    CHECK(d.find("sin") != std::string::npos);
}
