#include <doctest.h>

#include <cmath>

#include "tpa/atom.hpp"
#include "tpa/errors.hpp"

using namespace tpa;

TEST_CASE("transition frequencies are split symmetrically around the reference") {
    const auto a = from_ratios(0.5, 2.5);
    CHECK(a.gamma_f == 1.0);
    CHECK(a.gamma_e == 0.5);
    CHECK(a.omega_eg() == doctest::Approx(-1.25));
    CHECK(a.omega_fe() == doctest::Approx(1.25));
    CHECK(a.omega_fg() == doctest::Approx(0.0));
    CHECK(a.omega_fe() - a.omega_eg() == doctest::Approx(a.delta_a));
}

TEST_CASE("frame offset moves both transitions") {
    auto a = from_ratios(1.0, 1.0);
    a.frame_offset = 3.0;
    CHECK(a.omega_eg() == doctest::Approx(2.5));
    CHECK(a.omega_fe() == doctest::Approx(3.5));
    CHECK(a.omega_fg() == doctest::Approx(6.0));
}

TEST_CASE("invalid atoms are rejected") {
    CHECK_THROWS_AS(from_ratios(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(from_ratios(-1.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_atom(1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_atom(1.0, 1.0, NAN), DomainError);
    CHECK_THROWS_AS(make_atom(INFINITY, 1.0, 0.0), DomainError);
    CHECK_NOTHROW(make_atom(1e-4, 1.0, -20.0));
}

TEST_CASE("expm1 ratio series agrees with the direct form near the switch") {
    for (double tau : {0.1, 1.0, 5.0}) {
        for (double eps : {1e-7, -1e-7, 3e-6}) {
            const double direct = std::expm1(-eps * tau) / eps;
            CHECK(expm1_ratio(eps, tau, 1e-5) == doctest::Approx(direct).epsilon(1e-8));
        }
        CHECK(expm1_ratio(0.0, tau, 1e-5) == doctest::Approx(-tau));
        CHECK(expm1_ratio(0.3, tau, 1e-5) == doctest::Approx(std::expm1(-0.3 * tau) / 0.3));
    }
}
