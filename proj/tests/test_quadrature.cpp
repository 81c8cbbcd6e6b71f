#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tpa/errors.hpp"
#include "tpa/quadrature.hpp"

using namespace tpa;

TEST_CASE("adaptive quadrature reproduces elementary integrals") {
    const auto r = integrate<double>([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

    const auto s = integrate<double>([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));

    const auto c = integrate<std::complex<double>>(
        [](double x) { return std::exp(std::complex<double>(0.0, 7.0 * x)); }, 0.0, 1.0);
    const auto ref = (std::exp(std::complex<double>(0.0, 7.0)) - 1.0) / std::complex<double>(0.0, 7.0);
    CHECK(std::abs(c.value - ref) < 1e-12);
}

TEST_CASE("breakpoints handle kinks") {
    const std::vector<double> br{-1.0, 0.3, 1.0};
    const auto r = integrate<double>([](double x) { return std::abs(x - 0.3); }, br);
    CHECK(r.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-12));
}

TEST_CASE("non-integrable singularity raises a convergence error") {
    QuadOptions opt;
    opt.max_depth = 12;
    CHECK_THROWS_AS(integrate<double>([](double x) { return 1.0 / x; }, 0.0, 1.0, opt), ConvergenceError);
}

TEST_CASE("golden section locates an interior maximum") {
    const auto m = golden_section_maximize([](double x) { return -(x - 0.7) * (x - 0.7) + 2.0; }, 0.0, 2.0, 1e-8);
    CHECK(m.x == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(m.value == doctest::Approx(2.0));
}
