#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cost/measures.hpp"

using namespace cost;

TEST_CASE("effect measures at a 2% to 3% risk increase") {
    const EffectSummary m = measures_from_risks(RiskPair{0.02, 0.03});
    CHECK(m.rd == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.rr_minus.has_value());
    CHECK(*m.rr_minus == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(m.rr_plus.has_value());
    CHECK(*m.rr_plus == doctest::Approx(0.98979591836734693).epsilon(1e-12));
    CHECK(m.odds_ratio.has_value());
    CHECK(*m.odds_ratio == doctest::Approx(1.5154639175257734).epsilon(1e-12));
}

TEST_CASE("degenerate denominators yield absent measures, never NaN") {
    SUBCASE("p0 = 0 removes rr_minus and odds_ratio") {
        const EffectSummary m = measures_from_risks(RiskPair{0.0, 0.4});
        CHECK(!m.rr_minus.has_value());
        CHECK(!m.odds_ratio.has_value());
        CHECK(m.rr_plus.has_value());
        CHECK(*m.rr_plus == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(m.rd == doctest::Approx(0.4));
    }
    SUBCASE("p0 = 1 removes rr_plus and odds_ratio") {
        const EffectSummary m = measures_from_risks(RiskPair{1.0, 0.4});
        CHECK(!m.rr_plus.has_value());
        CHECK(!m.odds_ratio.has_value());
        CHECK(m.rr_minus.has_value());
        CHECK(*m.rr_minus == doctest::Approx(0.4));
    }
    SUBCASE("p1 on the boundary removes only the odds ratio") {
        const EffectSummary a = measures_from_risks(RiskPair{0.5, 0.0});
        CHECK(!a.odds_ratio.has_value());
        CHECK(a.rr_minus.has_value());
        CHECK(*a.rr_minus == doctest::Approx(0.0));
        const EffectSummary b = measures_from_risks(RiskPair{0.5, 1.0});
        CHECK(!b.odds_ratio.has_value());
        CHECK(b.rr_plus.has_value());
        CHECK(*b.rr_plus == doctest::Approx(0.0));
    }
}

TEST_CASE("risks outside [0,1] are rejected") {
    CHECK_THROWS_AS(measures_from_risks(RiskPair{-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(measures_from_risks(RiskPair{0.5, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(measures_from_risks(RiskPair{std::nan(""), 0.5}), std::invalid_argument);
}

TEST_CASE("counts convert to risks with treated mapping to p1") {
    const RiskPair r = risks_from_counts(ArmCounts{3, 100}, ArmCounts{2, 100});
    CHECK(r.p0 == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(r.p1 == doctest::Approx(0.03).epsilon(1e-15));

    CHECK_THROWS_AS(risks_from_counts(ArmCounts{3, 0}, ArmCounts{2, 100}), std::invalid_argument);
    CHECK_THROWS_AS(risks_from_counts(ArmCounts{5, 4}, ArmCounts{2, 100}), std::invalid_argument);
    CHECK_THROWS_AS(risks_from_counts(ArmCounts{-1, 4}, ArmCounts{2, 100}), std::invalid_argument);
}

TEST_CASE("odds ratio equals rr_minus / rr_plus whenever all three exist") {
    std::mt19937_64 rng(20260816u);
    std::uniform_real_distribution<double> unif(0.001, 0.999);
    for (int k = 0; k < 20000; ++k) {
        const RiskPair r{unif(rng), unif(rng)};
        const EffectSummary m = measures_from_risks(r);
        REQUIRE(m.odds_ratio.has_value());
        const double ratio = *m.rr_minus / *m.rr_plus;
        CHECK(std::fabs(*m.odds_ratio - ratio) <= 1e-12 * std::max(1.0, std::fabs(ratio)));
    }
}

TEST_CASE("recoding the outcome swaps rr_minus with rr_plus and negates rd") {
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> unif(0.001, 0.999);
    for (int k = 0; k < 20000; ++k) {
        const RiskPair r{unif(rng), unif(rng)};
        const RiskPair flipped{1.0 - r.p0, 1.0 - r.p1};
        const EffectSummary m = measures_from_risks(r);
        const EffectSummary fm = measures_from_risks(flipped);
        CHECK(std::fabs(fm.rd + m.rd) <= 1e-15);
        CHECK(std::fabs(*fm.rr_minus - *m.rr_plus) <= 1e-12 * *m.rr_plus);
        CHECK(std::fabs(*fm.rr_plus - *m.rr_minus) <= 1e-12 * *m.rr_minus);
        CHECK(std::fabs(*fm.odds_ratio - 1.0 / *m.odds_ratio) <=
              1e-12 * (1.0 / *m.odds_ratio));
    }
}

TEST_CASE("null effect pins every measure to its null value") {
    const EffectSummary m = measures_from_risks(RiskPair{0.37, 0.37});
    CHECK(m.rd == 0.0);
    CHECK(*m.rr_minus == 1.0);
    CHECK(*m.rr_plus == 1.0);
    CHECK(*m.odds_ratio == doctest::Approx(1.0).epsilon(1e-15));
}
