#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cost/mechanism.hpp"

using namespace cost;
using namespace cost::mech;

namespace {

MechanismSpec c3_spec() {
    MechanismSpec spec;
    spec.s.pr_x = Frac{3, 10};
    spec.s.pr_frailty = Frac{1, 2};
    spec.t.pr_x = Frac{3, 10};
    spec.t.pr_frailty = Frac{1, 4};
    spec.conditions = ConditionSet{XCondition::c3, std::nullopt};
    return spec;
}

// one fully inert individual: outcome equals the frailty bit in every cell
MechanismIndividual inert_individual(PopulationId id, bool x, bool frailty) {
    MechanismIndividual ind;
    ind.population = id;
    ind.x = x;
    for (int a = 0; a < 2; ++a)
        for (int xx = 0; xx < 2; ++xx)
            for (int z = 0; z < 2; ++z) ind.outcomes.set(a, xx, z, frailty ? 1 : 0);
    return ind;
}

}  // namespace

TEST_CASE("fraction parsing and validation") {
    const Frac f = parse_frac("3/10");
    CHECK(f.num == 3);
    CHECK(f.den == 10);
    CHECK(parse_frac("0").den == 1);
    CHECK(parse_frac("1").num == 1);
    CHECK_THROWS_AS(parse_frac("3/2"), std::invalid_argument);   // > 1
    CHECK_THROWS_AS(parse_frac("-1/2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_frac("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_frac("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_frac("1/2x"), std::invalid_argument);
}

TEST_CASE("protective-attribute populations share g despite unequal baselines") {
    const MechanismPopulation pop = build_population(c3_spec());
    CHECK(pop.size_of(PopulationId::s) == 20);
    CHECK(pop.size_of(PopulationId::t) == 40);

    const MechanismParams ps = cost_from_mechanism(pop, PopulationId::s);
    const MechanismParams pt = cost_from_mechanism(pop, PopulationId::t);

    // baselines follow the frailty laws and differ
    CHECK(ps.distribution.doomed + ps.distribution.preventative == doctest::Approx(0.5));
    CHECK(pt.distribution.doomed + pt.distribution.preventative == doctest::Approx(0.25));

    // g equals the unsusceptible share exactly, in both populations
    REQUIRE(ps.introduce.g.has_value());
    REQUIRE(pt.introduce.g.has_value());
    CHECK(*ps.introduce.g == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(*pt.introduce.g == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(equal_g(pop) == std::optional<bool>(true));

    // no causal individuals under this law, so h = 1
    CHECK(ps.counts.causal == 0);
    CHECK(*ps.introduce.h == 1.0);
    CHECK(equal_h(pop) == std::optional<bool>(true));

    const ConditionReport rep = check_conditions(pop, c3_spec().conditions);
    CHECK(rep.all_pass);
    for (const char* id : {"1", "2", "3a", "3b", "3c"}) {
        const ConditionCheck* c = rep.find(id);
        REQUIRE(c != nullptr);
        CHECK(c->pass);
    }
}

TEST_CASE("causal-attribute populations share j") {
    MechanismSpec spec = c3_spec();
    spec.conditions.x = XCondition::c4;
    const MechanismPopulation pop = build_population(spec);

    const MechanismParams ps = cost_from_mechanism(pop, PopulationId::s);
    REQUIRE(ps.remove.j.has_value());
    CHECK(*ps.remove.j == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(equal_j(pop) == std::optional<bool>(true));

    const ConditionReport rep = check_conditions(pop, spec.conditions);
    CHECK(rep.all_pass);
    REQUIRE(rep.find("4a") != nullptr);
    CHECK(rep.find("4b")->pass);
}

TEST_CASE("a zero-prevalence attribute leaves treatment inert") {
    MechanismSpec spec = c3_spec();
    spec.s.pr_x = Frac{0, 2};
    spec.t.pr_x = Frac{0, 2};
    const MechanismPopulation pop = build_population(spec);
    const MechanismParams ps = cost_from_mechanism(pop, PopulationId::s);
    CHECK(ps.counts.causal == 0);
    CHECK(ps.counts.preventative == 0);
    CHECK(*ps.introduce.g == 1.0);
    CHECK(*ps.introduce.h == 1.0);
}

TEST_CASE("incoherent condition pairings are rejected") {
    MechanismSpec spec = c3_spec();
    spec.conditions.z = ZCondition::c6;  // c3 pairs with c5 only
    CHECK_THROWS_AS(build_population(spec), std::invalid_argument);
    CHECK_THROWS_AS(check_conditions(MechanismPopulation{}, spec.conditions),
                    std::invalid_argument);
}

TEST_CASE("mutating one table entry fails 3b and breaks the g equality") {
    MechanismPopulation pop = build_population(c3_spec());
    // individuals are laid out x-major; index 0 is (x=1, frailty=1) in s
    REQUIRE(pop.individuals[0].x);
    REQUIRE(pop.individuals[0].realized(0) == 1);
    pop.individuals[0].outcomes.set(1, 1, 0, 1);

    const ConditionReport rep = check_conditions(pop, c3_spec().conditions);
    CHECK(!rep.all_pass);
    const ConditionCheck* c3b = rep.find("3b");
    REQUIRE(c3b != nullptr);
    CHECK(!c3b->pass);
    REQUIRE(!c3b->counterexamples.empty());
    CHECK(c3b->counterexamples[0] == 0);

    CHECK(equal_g(pop) == std::optional<bool>(false));
}

TEST_CASE("mutating one attribute bit fails condition 1 and breaks the g equality") {
    MechanismPopulation pop = build_population(c3_spec());
    // index 6 is (x=0, frailty=1) in s; flipping x makes its cell protective
    REQUIRE(!pop.individuals[6].x);
    REQUIRE(pop.individuals[6].realized(0) == 1);
    pop.individuals[6].x = true;

    const ConditionReport rep = check_conditions(pop, c3_spec().conditions);
    CHECK(!rep.find("1")->pass);
    CHECK(equal_g(pop) == std::optional<bool>(false));
}

TEST_CASE("frailty-correlated attribute fails 3c and decouples g from Pr(X=0)") {
    MechanismPopulation pop;
    const ConditionSet cs{XCondition::c3, std::nullopt};
    for (const PopulationId id : {PopulationId::s, PopulationId::t}) {
        for (int k = 0; k < 2; ++k) {
            // susceptible individuals are exactly the frail ones
            MechanismIndividual frail = inert_individual(id, true, true);
            frail.outcomes.set(1, 1, 0, 0);
            frail.outcomes.set(1, 1, 1, 0);
            pop.individuals.push_back(frail);
            MechanismIndividual tough = inert_individual(id, false, false);
            tough.outcomes.set(1, 1, 0, 0);
            tough.outcomes.set(1, 1, 1, 0);
            pop.individuals.push_back(tough);
        }
    }
    const ConditionReport rep = check_conditions(pop, cs);
    CHECK(!rep.find("3c")->pass);
    CHECK(rep.find("3a")->pass);
    CHECK(rep.find("3b")->pass);

    // Pr(X=0) = 0.5, but every baseline case is susceptible: g collapses to 0
    const MechanismParams ps = cost_from_mechanism(pop, PopulationId::s);
    REQUIRE(ps.introduce.g.has_value());
    CHECK(*ps.introduce.g == 0.0);
}

TEST_CASE("two-attribute build satisfies the paired conditions and the joint cell") {
    MechanismSpec spec;
    spec.s = PopulationLaw{Frac{1, 2}, Frac{1, 2}, Frac{1, 5}};
    spec.t = PopulationLaw{Frac{1, 2}, Frac{1, 3}, Frac{1, 5}};
    spec.conditions = ConditionSet{XCondition::c3, ZCondition::c5};
    spec.joint_cell = CellEffect::forces_one;
    const MechanismPopulation pop = build_population(spec);
    CHECK(pop.size_of(PopulationId::s) == 20);
    CHECK(pop.size_of(PopulationId::t) == 30);

    const ConditionReport rep = check_conditions(pop, spec.conditions, spec.joint_cell);
    CHECK(rep.all_pass);
    for (const char* id : {"1", "2", "3a", "3b", "3c", "5a", "5b", "5c", "joint-cell",
                           "joint-independence"}) {
        const ConditionCheck* c = rep.find(id);
        REQUIRE(c != nullptr);
        CHECK(c->pass);
    }

    // the treated-side parameters are equal across populations
    CHECK(equal_g(pop) == std::optional<bool>(true));
    CHECK(equal_h(pop) == std::optional<bool>(true));
}

TEST_CASE("u strata: counting supports the complement mapping, not the direct one") {
    MechanismSpec spec;
    spec.s = PopulationLaw{Frac{1, 2}, Frac{1, 2}, Frac{1, 5}};
    spec.t = PopulationLaw{Frac{1, 2}, Frac{1, 3}, Frac{1, 5}};
    spec.conditions = ConditionSet{XCondition::c3, ZCondition::c5};
    spec.joint_cell = CellEffect::forces_one;
    const MechanismPopulation pop = build_population(spec);

    const CellMap cells{CellEffect::no_effect, CellEffect::forces_zero, CellEffect::forces_one,
                        CellEffect::forces_one};
    const UStrataReport rep = assign_u_strata(pop, PopulationId::s, cells);
    CHECK(rep.population_size == 20);
    CHECK(rep.counts[0] == 8);
    CHECK(rep.counts[1] == 8);
    CHECK(rep.counts[2] == 4);
    CHECK(rep.pr_u1 == doctest::Approx(0.4).epsilon(1e-15));

    REQUIRE(rep.params.introduce.g.has_value());
    CHECK(*rep.params.introduce.g == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(*rep.params.introduce.h == doctest::Approx(0.8).epsilon(1e-15));

    // g = 1 - Pr(U=1) and h = 1 - Pr(U=2) hold exactly; the direct readings fail
    CHECK(rep.g_complement_of_u1 == std::optional<bool>(true));
    CHECK(rep.h_complement_of_u2 == std::optional<bool>(true));
    CHECK(rep.g_direct_u1 == std::optional<bool>(false));
    CHECK(rep.h_direct_u2 == std::optional<bool>(false));

    // same in the other population, with equality across the two
    const UStrataReport rept = assign_u_strata(pop, PopulationId::t, cells);
    CHECK(rept.g_complement_of_u1 == std::optional<bool>(true));
    CHECK(*rept.params.introduce.g == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("u strata: all-inert map gives Pr(U=0)=1 and g=h=1") {
    MechanismPopulation pop;
    pop.individuals.push_back(inert_individual(PopulationId::s, false, true));
    pop.individuals.push_back(inert_individual(PopulationId::s, true, false));
    pop.individuals.push_back(inert_individual(PopulationId::s, false, false));
    pop.individuals.push_back(inert_individual(PopulationId::s, true, true));

    const CellMap cells{CellEffect::no_effect, CellEffect::no_effect, CellEffect::no_effect,
                        CellEffect::no_effect};
    const UStrataReport rep = assign_u_strata(pop, PopulationId::s, cells);
    CHECK(rep.pr_u0 == 1.0);
    CHECK(*rep.params.introduce.g == 1.0);
    CHECK(*rep.params.introduce.h == 1.0);
    CHECK(rep.g_complement_of_u1 == std::optional<bool>(true));
}

TEST_CASE("u strata reject a map contradicted by the tables") {
    const MechanismPopulation pop = build_population(c3_spec());
    // the x=1 cell forces the treated outcome to zero; claiming no_effect is wrong
    const CellMap cells{CellEffect::no_effect, CellEffect::no_effect, CellEffect::no_effect,
                        CellEffect::no_effect};
    CHECK_THROWS_AS(assign_u_strata(pop, PopulationId::s, cells), std::invalid_argument);
}

TEST_CASE("monte carlo sampling is seeded and converges to the exhaustive value") {
    MechanismSpec spec = c3_spec();
    spec.mode = BuildMode::monte_carlo;
    spec.seed = 42;
    spec.sample_size = 10000;
    const MechanismPopulation a = build_population(spec);
    const MechanismPopulation b = build_population(spec);
    REQUIRE(a.individuals.size() == b.individuals.size());
    for (std::size_t k = 0; k < a.individuals.size(); ++k) {
        CHECK(a.individuals[k].x == b.individuals[k].x);
        CHECK(a.individuals[k].outcomes.y == b.individuals[k].outcomes.y);
    }

    const MechanismParams ps = cost_from_mechanism(a, PopulationId::s);
    REQUIRE(ps.introduce.g.has_value());
    const double denom =
        static_cast<double>(ps.counts.doomed + ps.counts.preventative);
    const double se = std::sqrt(0.7 * 0.3 / denom);
    CHECK(std::fabs(*ps.introduce.g - 0.7) <= 3.0 * se);

    spec.seed = 43;
    const MechanismPopulation c = build_population(spec);
    const MechanismParams ps2 = cost_from_mechanism(c, PopulationId::s);
    const double denom2 =
        static_cast<double>(ps2.counts.doomed + ps2.counts.preventative);
    CHECK(std::fabs(*ps2.introduce.g - 0.7) <= 3.0 * std::sqrt(0.7 * 0.3 / denom2));
}

TEST_CASE("exhaustive roster cap guards against runaway denominators") {
    MechanismSpec spec = c3_spec();
    spec.s.pr_x = Frac{1, 1000};
    spec.s.pr_frailty = Frac{1, 1000};
    CHECK_THROWS_AS(build_population(spec), std::invalid_argument);
}
