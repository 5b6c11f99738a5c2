#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cost/params.hpp"

using namespace cost;

namespace {

ResponseTypeDistribution random_distribution(std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    double m[4];
    double total = 0.0;
    for (double& v : m) {
        v = expo(rng) + 1e-9;
        total += v;
    }
    return ResponseTypeDistribution{m[0] / total, m[1] / total, m[2] / total, m[3] / total};
}

}  // namespace

TEST_CASE("distribution validation") {
    CHECK_NOTHROW(require_valid(ResponseTypeDistribution{0.1, 0.05, 0.02, 0.83}));
    CHECK_THROWS_AS(require_valid(ResponseTypeDistribution{0.5, 0.5, 0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(require_valid(ResponseTypeDistribution{-0.1, 0.5, 0.3, 0.3}),
                    std::invalid_argument);

    const auto n = normalized(ResponseTypeDistribution{1.0, 2.0, 3.0, 4.0});
    CHECK(n.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(n.doomed == doctest::Approx(0.1));
    CHECK_THROWS_AS(normalized(ResponseTypeDistribution{0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(normalized(ResponseTypeDistribution{-1.0, 1.0, 1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("risks from a response-type distribution") {
    const RiskPair r = risks_from_distribution(ResponseTypeDistribution{0.1, 0.05, 0.02, 0.83});
    CHECK(r.p0 == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(r.p1 == doctest::Approx(0.15).epsilon(1e-12));

    const RiskPair all_immune = risks_from_distribution(ResponseTypeDistribution{0, 0, 0, 1});
    CHECK(all_immune.p0 == 0.0);
    CHECK(all_immune.p1 == 0.0);

    const RiskPair inc = risks_from_distribution(ResponseTypeDistribution{0.02, 0.01, 0, 0.97});
    CHECK(inc.p0 == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(inc.p1 == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("introduce parameters from a distribution") {
    const CostIntroduce c = cost_introduce(ResponseTypeDistribution{0.1, 0.05, 0.02, 0.83});
    REQUIRE(c.g.has_value());
    REQUIRE(c.h.has_value());
    CHECK(*c.g == doctest::Approx(0.1 / 0.12).epsilon(1e-12));
    CHECK(*c.h == doctest::Approx(0.83 / 0.88).epsilon(1e-12));

    const CostIntroduce inc = cost_introduce(ResponseTypeDistribution{0.02, 0.01, 0, 0.97});
    CHECK(*inc.g == 1.0);
    CHECK(*inc.h == doctest::Approx(0.97 / 0.98).epsilon(1e-12));

    const CostIntroduce imm = cost_introduce(ResponseTypeDistribution{0, 0, 0, 1});
    CHECK(!imm.g.has_value());
    REQUIRE(imm.h.has_value());
    CHECK(*imm.h == 1.0);
}

TEST_CASE("remove parameters from a distribution") {
    const CostRemove c = cost_remove(ResponseTypeDistribution{0.1, 0.05, 0.02, 0.83});
    REQUIRE(c.i.has_value());
    REQUIRE(c.j.has_value());
    CHECK(*c.i == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(*c.j == doctest::Approx(0.83 / 0.85).epsilon(1e-12));

    const CostRemove inc = cost_remove(ResponseTypeDistribution{0.02, 0.01, 0, 0.97});
    CHECK(*inc.i == doctest::Approx(0.02 / 0.03).epsilon(1e-12));
    CHECK(*inc.j == 1.0);

    // sharp null: treatment affects nobody
    const CostRemove null_effect = cost_remove(ResponseTypeDistribution{0.5, 0, 0, 0.5});
    CHECK(*null_effect.i == 1.0);
    CHECK(*null_effect.j == 1.0);
}

TEST_CASE("outcome recoding swaps g and h") {
    const ResponseTypeDistribution d{0.1, 0.05, 0.02, 0.83};
    const ResponseTypeDistribution r = recode_outcome(d);
    CHECK(r.doomed == 0.83);
    CHECK(r.causal == 0.02);
    CHECK(r.preventative == 0.05);
    CHECK(r.immune == 0.1);

    const CostIntroduce orig = cost_introduce(d);
    const CostIntroduce flipped = cost_introduce(r);
    CHECK(*flipped.g == doctest::Approx(*orig.h).epsilon(1e-15));
    CHECK(*flipped.h == doctest::Approx(*orig.g).epsilon(1e-15));

    // fixed point
    const ResponseTypeDistribution sym{0.25, 0.25, 0.25, 0.25};
    const ResponseTypeDistribution rsym = recode_outcome(sym);
    CHECK(rsym.doomed == 0.25);
    CHECK(rsym.causal == 0.25);
}

TEST_CASE("exposure recoding exchanges introduce and remove parameters") {
    const ResponseTypeDistribution d{0.1, 0.05, 0.02, 0.83};
    const ResponseTypeDistribution r = recode_exposure(d);
    CHECK(r.doomed == 0.1);
    CHECK(r.causal == 0.02);
    CHECK(r.preventative == 0.05);
    CHECK(r.immune == 0.83);

    const CostIntroduce gi = cost_introduce(r);
    const CostRemove orig_remove = cost_remove(d);
    CHECK(*gi.g == doctest::Approx(*orig_remove.i).epsilon(1e-15));
    CHECK(*gi.h == doctest::Approx(*orig_remove.j).epsilon(1e-15));

    const CostRemove ri = cost_remove(r);
    const CostIntroduce orig_intro = cost_introduce(d);
    CHECK(*ri.i == doctest::Approx(*orig_intro.g).epsilon(1e-15));
    CHECK(*ri.j == doctest::Approx(*orig_intro.h).epsilon(1e-15));

    // a monotone-increase distribution becomes monotone-decreasing
    const ResponseTypeDistribution inc{0.02, 0.01, 0, 0.97};
    const ResponseTypeDistribution dec = recode_exposure(inc);
    CHECK(dec.causal == 0.0);
    CHECK(dec.preventative == 0.01);

    const ResponseTypeDistribution null_dist{0.5, 0, 0, 0.5};
    const ResponseTypeDistribution rn = recode_exposure(null_dist);
    CHECK(rn.causal == 0.0);
    CHECK(rn.preventative == 0.0);
}

TEST_CASE("recodings are involutions; risk identity links g,h to p1") {
    std::mt19937_64 rng(99u);
    for (int k = 0; k < 20000; ++k) {
        const ResponseTypeDistribution d = random_distribution(rng);
        const ResponseTypeDistribution oo = recode_outcome(recode_outcome(d));
        CHECK(oo.doomed == d.doomed);
        CHECK(oo.causal == d.causal);
        const ResponseTypeDistribution ee = recode_exposure(recode_exposure(d));
        CHECK(ee.preventative == d.preventative);

        const RiskPair r = risks_from_distribution(d);
        const CostIntroduce c = cost_introduce(d);
        if (c.g && c.h) {
            const double rebuilt = r.p0 * *c.g + (1.0 - r.p0) * (1.0 - *c.h);
            CHECK(std::fabs(rebuilt - r.p1) <= 1e-12);
        }
    }
}

TEST_CASE("monotonicity correspondences: h=1 iff causal mass is zero") {
    const CostIntroduce no_causal = cost_introduce(ResponseTypeDistribution{0.3, 0, 0.2, 0.5});
    CHECK(*no_causal.h == 1.0);
    const CostIntroduce no_prev = cost_introduce(ResponseTypeDistribution{0.3, 0.2, 0, 0.5});
    CHECK(*no_prev.g == 1.0);
    const CostIntroduce both = cost_introduce(ResponseTypeDistribution{0.3, 0.1, 0.1, 0.5});
    CHECK(*both.h < 1.0);
    CHECK(*both.g < 1.0);
}

TEST_CASE("collapsing two strata reproduces the pooled mixture parameters") {
    const std::vector<CollapsibilityStratum> strata{
        {"v1", ResponseTypeDistribution{0.1, 0.05, 0.02, 0.83}, 0.5},
        {"v2", ResponseTypeDistribution{0.3, 0.1, 0.05, 0.55}, 0.5},
    };
    const CollapseReport rep = collapse_cost(strata);
    CHECK(rep.mixture.doomed == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rep.mixture.preventative == doctest::Approx(0.035).epsilon(1e-15));

    REQUIRE(rep.g.pooled.has_value());
    REQUIRE(rep.g.weighted.has_value());
    CHECK(*rep.g.pooled == doctest::Approx(0.2 / 0.235).epsilon(1e-12));
    CHECK(rep.g.discrepancy <= 1e-12);
    // weights are Pr(V=v | baseline case)
    CHECK(rep.g.weights[0] == doctest::Approx(0.06 / 0.235).epsilon(1e-12));
    CHECK(rep.g.weights[1] == doctest::Approx(0.175 / 0.235).epsilon(1e-12));

    CHECK(*rep.h.pooled == doctest::Approx(0.69 / 0.765).epsilon(1e-12));
    CHECK(*rep.i.pooled == doctest::Approx(0.2 / 0.275).epsilon(1e-12));
    CHECK(*rep.j.pooled == doctest::Approx(0.69 / 0.725).epsilon(1e-12));
    CHECK(rep.uncollapsible.empty());
}

TEST_CASE("identical strata collapse to the stratum value") {
    const ResponseTypeDistribution d{0.1, 0.05, 0.02, 0.83};
    const CollapseReport rep = collapse_cost({{"a", d, 0.25}, {"b", d, 0.75}});
    CHECK(*rep.g.pooled == doctest::Approx(0.1 / 0.12).epsilon(1e-12));
    CHECK(*rep.g.weighted == doctest::Approx(0.1 / 0.12).epsilon(1e-12));
}

TEST_CASE("strata sharing g collapse to the common g despite different baselines") {
    // both strata have g = 0.5 but baseline risks 0.4 vs 0.1
    const std::vector<CollapsibilityStratum> strata{
        {"low", ResponseTypeDistribution{0.05, 0.05, 0.05, 0.85}, 0.5},
        {"high", ResponseTypeDistribution{0.2, 0.1, 0.2, 0.5}, 0.5},
    };
    const CollapseReport rep = collapse_cost(strata);
    CHECK(*rep.g.pooled == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*rep.g.weighted == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty conditioning events are reported as uncollapsible") {
    // no baseline cases anywhere: g has an empty conditioning event
    const std::vector<CollapsibilityStratum> strata{
        {"a", ResponseTypeDistribution{0, 0.1, 0, 0.9}, 0.5},
        {"b", ResponseTypeDistribution{0, 0.2, 0, 0.8}, 0.5},
    };
    const CollapseReport rep = collapse_cost(strata);
    CHECK(!rep.g.pooled.has_value());
    CHECK(!rep.g.weighted.has_value());
    REQUIRE(rep.uncollapsible.size() == 1);
    CHECK(rep.uncollapsible[0] == "g");
    // h is still fine
    CHECK(rep.h.pooled.has_value());
}

TEST_CASE("collapse validates prevalences") {
    const ResponseTypeDistribution d{0.25, 0.25, 0.25, 0.25};
    CHECK_THROWS_AS(collapse_cost({{"a", d, 0.5}, {"b", d, 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(collapse_cost({}), std::invalid_argument);
}

TEST_CASE("weighted averages agree with pooled values on random stratum sets") {
    std::mt19937_64 rng(20260816u);
    std::uniform_int_distribution<int> n_strata(2, 5);
    std::exponential_distribution<double> expo(1.0);
    for (int rep = 0; rep < 5000; ++rep) {
        const int n = n_strata(rng);
        std::vector<CollapsibilityStratum> strata;
        std::vector<double> prev(n);
        double total = 0.0;
        for (double& p : prev) {
            p = expo(rng) + 1e-6;
            total += p;
        }
        for (int v = 0; v < n; ++v)
            strata.push_back({"s" + std::to_string(v), random_distribution(rng), prev[v] / total});
        // make the prevalences sum to one exactly enough for validation
        const CollapseReport out = collapse_cost(strata);
        for (const CollapsedParameter* p : {&out.g, &out.h, &out.i, &out.j}) {
            if (p->pooled && p->weighted) CHECK(p->discrepancy <= 1e-12);
        }
    }
}
