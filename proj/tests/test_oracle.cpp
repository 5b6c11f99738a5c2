#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "cost/oracle.hpp"

using namespace cost::oracle;

TEST_CASE("population enumeration covers every composition exactly once") {
    CHECK(composition_count(1) == 4);
    CHECK(composition_count(2) == 10);
    CHECK(composition_count(3) == 20);

    CHECK(populations_of_size(1).size() == 4);
    CHECK(populations_of_size(2).size() == 10);

    long long visited = 0;
    std::set<std::array<long long, 4>> seen;
    enumerate_populations(3, [&](const FinitePopulation& p) {
        ++visited;
        CHECK(p.size() >= 1);
        CHECK(p.size() <= 3);
        seen.insert({p.doomed, p.causal, p.preventative, p.immune});
    });
    CHECK(visited == 4 + 10 + 20);
    CHECK(seen.size() == static_cast<std::size_t>(visited));

    CHECK_THROWS_AS(composition_count(-1), std::invalid_argument);
}

TEST_CASE("finite-population accessors agree with direct counting") {
    FinitePopulation p{10, 5, 2, 83};
    CHECK(p.size() == 100);
    CHECK(p.p0() == Rational(3, 25));
    CHECK(p.p1() == Rational(3, 20));
    CHECK(*p.g() == Rational(5, 6));
    CHECK(*p.h() == Rational(83, 88));
    CHECK(*p.i() == Rational(2, 3));
    CHECK(*p.j() == Rational(83, 85));

    FinitePopulation no_baseline_cases{0, 5, 0, 5};
    CHECK(!no_baseline_cases.g().has_value());
    CHECK(no_baseline_cases.h().has_value());
    FinitePopulation everyone_doomed{4, 0, 0, 0};
    CHECK(!everyone_doomed.h().has_value());
    CHECK(!everyone_doomed.j().has_value());
    CHECK(*everyone_doomed.g() == 1);
    CHECK(*everyone_doomed.i() == 1);
}

TEST_CASE("proposition names round-trip and parse case-insensitively") {
    for (Proposition p : all_propositions()) {
        auto parsed = proposition_from_string(to_string(p));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == p);
    }
    CHECK(proposition_from_string("P3") == Proposition::p3);
    CHECK(proposition_from_string("COLLAPSIBILITY") == Proposition::collapsibility);
    CHECK(!proposition_from_string("bogus").has_value());
}

TEST_CASE("single-population identification holds on the full universe") {
    OracleBounds b;
    b.single_n_max = 40;
    for (Proposition p : {Proposition::p1, Proposition::p4}) {
        auto check = verify(p, b);
        CHECK(check.pass);
        CHECK(check.as_expected());
        CHECK(check.cases_checked > 10000);
        CHECK(!check.witness.has_value());
    }
}

TEST_CASE("transport across shared-parameter pairs is exact, both directions") {
    OracleBounds b;
    b.pair_n_max = 14;
    b.sampled_pair_n_max = 30;
    b.samples_per_size = 60;
    b.seed = 7;
    for (Proposition p : {Proposition::p2, Proposition::p5}) {
        auto check = verify(p, b);
        CHECK(check.pass);
        CHECK(check.cases_checked > 1000);
        CHECK(!check.witness.has_value());
    }
}

TEST_CASE("carry-over bias factorization and sign hold without monotonicity") {
    OracleBounds b;
    b.pair_n_max = 12;
    b.sampled_pair_n_max = 28;
    b.samples_per_size = 60;
    b.seed = 11;
    for (Proposition p : {Proposition::p3, Proposition::p6}) {
        auto check = verify(p, b);
        CHECK(check.pass);
        CHECK(check.cases_checked > 1000);
    }
}

TEST_CASE("mechanism rosters with a shared attribute law agree on the fixed parameter") {
    auto check = verify(Proposition::p7);
    CHECK(check.pass);
    CHECK(check.cases_checked == 2 * 5 * 3 * 3 * 3);
}

TEST_CASE("rare-outcome pairs with equal survivor ratios have stable risk differences") {
    OracleBounds b;
    b.single_n_max = 40;
    auto check = verify(Proposition::p8, b);
    CHECK(check.pass);
    CHECK(check.cases_checked > 100);
}

TEST_CASE("every two-stratum mixture collapses through event-mass weights") {
    OracleBounds b;
    b.collapse_n_max = 8;
    auto check = verify(Proposition::collapsibility, b);
    CHECK(check.pass);
    CHECK(check.cases_checked > 100000);
}

TEST_CASE("recoding symmetries hold over the full composition universe") {
    OracleBounds b;
    b.single_n_max = 30;
    long long universe = 0;
    for (long long n = 1; n <= b.single_n_max; ++n) {
        universe += composition_count(n);
    }
    for (Proposition p : {Proposition::symmetry_outcome, Proposition::symmetry_exposure}) {
        auto check = verify(p, b);
        CHECK(check.pass);
        CHECK(check.cases_checked == universe);
    }
}

TEST_CASE("injecting an off-direction individual breaks transport every time") {
    OracleBounds b;
    b.pair_n_max = 8;

    auto p2 = verify(Proposition::p2_negative_control, b);
    CHECK(!p2.pass);
    CHECK(!p2.expected_pass);
    CHECK(p2.as_expected());
    REQUIRE(p2.witness.has_value());
    CHECK(p2.witness->target.causal >= 1);

    auto p5 = verify(Proposition::p5_negative_control, b);
    CHECK(!p5.pass);
    CHECK(p5.as_expected());
    REQUIRE(p5.witness.has_value());
    CHECK(p5.witness->target.preventative >= 1);
}

TEST_CASE("frozen numeric goldens match their exact recomputation") {
    auto check = verify(Proposition::worked_examples);
    CHECK(check.pass);
    CHECK(check.as_expected());
    CHECK(check.cases_checked >= 35);
    if (check.witness) {
        // surface which golden drifted in the failure output
        FAIL_CHECK(check.witness->note);
    }
}

TEST_CASE("verify_all runs every check and only the negative controls fail") {
    OracleBounds b;
    b.single_n_max = 30;
    b.pair_n_max = 12;
    b.collapse_n_max = 6;
    b.sampled_pair_n_max = 20;
    b.samples_per_size = 30;
    b.seed = 3;
    auto checks = verify_all(b);
    CHECK(checks.size() == all_propositions().size());
    int failures = 0;
    for (const auto& check : checks) {
        CHECK(check.as_expected());
        CHECK(!check.universe.empty());
        CHECK(check.cases_checked > 0);
        if (!check.pass) ++failures;
    }
    CHECK(failures == 2);
}
