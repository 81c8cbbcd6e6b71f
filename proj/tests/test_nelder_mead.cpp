#include <doctest.h>

#include <cmath>

#include "tpa/errors.hpp"
#include "tpa/nelder_mead.hpp"

using namespace tpa;

TEST_CASE("simplex minimizes a shifted quadratic") {
    auto f = [](const std::vector<double>& x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0) + 0.5;
    };
    NelderMeadOptions opt;
    opt.diameter_tol = 1e-8;
    opt.max_evals = 2000;
    const auto r = nelder_mead_minimize(f, {0.0, 0.0}, opt);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(0.5));
}

TEST_CASE("simplex handles the Rosenbrock valley") {
    auto f = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.diameter_tol = 1e-9;
    opt.max_evals = 5000;
    const auto r = nelder_mead_minimize(f, {-1.2, 1.0}, opt);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("budget exhaustion is reported") {
    auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 3.0, 2) + std::pow(x[1], 2) + std::pow(x[2], 2); };
    NelderMeadOptions opt;
    opt.max_evals = 20;
    const auto r = nelder_mead_minimize(f, {0.0, 0.0, 0.0}, opt);
    CHECK(!r.converged);
    CHECK(r.evals <= 20 + 4);
    CHECK_THROWS_AS(nelder_mead_minimize(f, {}, opt), DomainError);
}

TEST_CASE("non-finite objective values are treated as worst") {
    auto f = [](const std::vector<double>& x) { return x[0] < 0 ? NAN : (x[0] - 2.0) * (x[0] - 2.0); };
    NelderMeadOptions opt;
    const auto r = nelder_mead_minimize(f, {0.5}, opt);
    CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-3));
}
