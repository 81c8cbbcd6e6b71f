#include <doctest.h>

#include <cmath>

#include "tpa/errors.hpp"
#include "tpa/optimizer.hpp"

using namespace tpa;

namespace {
Budget small_budget() {
    Budget b;
    b.max_evals = 300;
    b.starts = 8;
    b.seed = 7;
    return b;
}
} // namespace

TEST_CASE("coordinate encoding round-trips") {
    const AtomParams atom = from_ratios(0.3, 1.5);
    const ConstraintMode free_mode{ConstraintTag::FullyFree, true};
    const FamilyParams gp = GaussianProductParams{0.7, 2.1, 0.9, -0.4, 0.25};
    const auto u = encode(atom, PulseFamily::GaussianProduct, free_mode, gp);
    CHECK(u.size() == 5);
    const auto back = std::get<GaussianProductParams>(decode(atom, PulseFamily::GaussianProduct, free_mode, u));
    CHECK(back.omega_a_width == doctest::Approx(0.7));
    CHECK(back.omega_b_width == doctest::Approx(2.1));
    CHECK(back.mu == doctest::Approx(0.9));
    CHECK(back.delta_f == doctest::Approx(-0.4));
    CHECK(back.carrier_sum_detuning == doctest::Approx(0.25));

    CHECK(free_dimension(PulseFamily::GaussianProduct, {ConstraintTag::DegenerateResonant, false}) == 2);
    CHECK(free_dimension(PulseFamily::GaussianProduct, {ConstraintTag::DegenerateResonant, true}) == 3);
    CHECK(free_dimension(PulseFamily::CorrelatedGaussian, {ConstraintTag::TwoPhotonResonant, true}) == 4);
    CHECK(free_dimension(PulseFamily::Coherent, {ConstraintTag::DegenerateResonant, true}) == 1);
    CHECK(free_dimension(PulseFamily::Coherent, {ConstraintTag::FullyFree, true}) == 2);

    // constrained modes pin the fixed coordinates
    const auto dr = std::get<GaussianProductParams>(
        decode(atom, PulseFamily::GaussianProduct, {ConstraintTag::DegenerateResonant, false}, {0.1, 0.2}));
    CHECK(dr.mu == 0.0);
    CHECK(dr.delta_f == 0.0);
    CHECK(dr.carrier_sum_detuning == 0.0);
}

TEST_CASE("optimizer respects the budget contract") {
    const AtomParams atom = from_ratios(1.0, 0.0);
    Budget b = small_budget();
    b.max_evals = 100;
    CHECK_THROWS_AS(optimize(atom, PulseFamily::Coherent, {}, b), DomainError);
    const auto rec = optimize(atom, PulseFamily::Coherent, {}, small_budget());
    CHECK(rec.pf_max >= 0.0);
    CHECK(rec.pf_max <= 1.0);
    CHECK(rec.objective_evals <= 300 + 20);
    CHECK(rec.starts == 8);
}

TEST_CASE("optimization is deterministic and a one-cell sweep reproduces it") {
    const AtomParams atom = from_ratios(2.0, 1.0);
    const ConstraintMode mode{ConstraintTag::DegenerateResonant, false};
    const auto a = optimize(atom, PulseFamily::GaussianProduct, mode, small_budget());
    const auto b = optimize(atom, PulseFamily::GaussianProduct, mode, small_budget());
    CHECK(a.pf_max == b.pf_max);
    const auto cells = sweep(PulseFamily::GaussianProduct, mode, {2.0}, {1.0}, small_budget());
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].record.has_value());
    CHECK(cells[0].record->pf_max == a.pf_max);
    CHECK(cells[0].record->objective_evals == a.objective_evals);
    const auto& pa = std::get<GaussianProductParams>(a.best_params);
    const auto& pc = std::get<GaussianProductParams>(cells[0].record->best_params);
    CHECK(pa.omega_a_width == pc.omega_a_width);
    CHECK(pa.omega_b_width == pc.omega_b_width);
    // objective re-evaluation at the reported optimum
    CHECK(evaluate_objective(atom, a.best_params).pf == doctest::Approx(a.pf_max).epsilon(1e-12));
}

TEST_CASE("parallel sweeps match serial ones") {
    const ConstraintMode mode{ConstraintTag::DegenerateResonant, false};
    Budget serial = small_budget();
    Budget parallel = serial;
    parallel.jobs = 3;
    const auto a = sweep(PulseFamily::Coherent, mode, {0.5, 2.0}, {0.0, 1.0}, serial);
    const auto b = sweep(PulseFamily::Coherent, mode, {0.5, 2.0}, {0.0, 1.0}, parallel);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ratio == b[i].ratio);
        CHECK(a[i].delta_a == b[i].delta_a);
        CHECK(a[i].record->pf_max == b[i].record->pf_max);
    }
}

TEST_CASE("warm-started sweeps are flagged") {
    const auto cells = sweep(PulseFamily::Coherent, {}, {1.0}, {0.0, 0.5}, small_budget(), {}, true);
    CHECK(!cells[0].warm_started);
    CHECK(cells[1].warm_started);
    CHECK(cells[1].record->diagnostics.find("warm start") != std::string::npos);
}

TEST_CASE("per-cell failures are recorded and the sweep continues") {
    CHECK_THROWS_AS(sweep(PulseFamily::Coherent, {}, {-1.0}, {0.0}, small_budget()), DomainError);
    Budget bad = small_budget();
    bad.max_evals = 10;
    const auto cells = sweep(PulseFamily::Coherent, {}, {1.0, 2.0}, {0.0}, bad);
    REQUIRE(cells.size() == 2);
    for (const auto& c : cells) {
        CHECK(!c.record.has_value());
        CHECK(!c.error.empty());
    }
}

TEST_CASE("constraint nesting holds cell by cell") {
    const AtomParams atom = from_ratios(1.0, 2.5);
    const auto dr = optimize(atom, PulseFamily::GaussianProduct, {ConstraintTag::DegenerateResonant, true}, small_budget());
    const auto tpr = optimize(atom, PulseFamily::GaussianProduct, {ConstraintTag::TwoPhotonResonant, true}, small_budget());
    CHECK(tpr.pf_max >= dr.pf_max - 1e-4);
    const auto& p = std::get<GaussianProductParams>(tpr.best_params);
    CHECK(p.carrier_sum_detuning == 0.0);
    CHECK(std::get<GaussianProductParams>(dr.best_params).delta_f == 0.0);
}

TEST_CASE("names round-trip") {
    for (auto f : {PulseFamily::GaussianProduct, PulseFamily::CorrelatedGaussian, PulseFamily::Coherent})
        CHECK(pulse_family_from_string(to_string(f)) == f);
    for (auto t : {ConstraintTag::DegenerateResonant, ConstraintTag::TwoPhotonResonant, ConstraintTag::FullyFree})
        CHECK(constraint_tag_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(pulse_family_from_string("optimal"), DomainError);
}
