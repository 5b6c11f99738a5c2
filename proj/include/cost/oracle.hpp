#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

// Exact finite-population verification engine. Everything here runs on
// arbitrary-precision rationals: a check either holds exactly or yields a
// concrete counterexample population pair. The fixed numeric values asserted
// by the library's tests were frozen from this module's output.
namespace cost::oracle {

using Rational = boost::multiprecision::cpp_rational;

// Integer instantiation of a response-type distribution.
struct FinitePopulation {
    long long doomed = 0;
    long long causal = 0;
    long long preventative = 0;
    long long immune = 0;

    long long size() const { return doomed + causal + preventative + immune; }
    Rational p0() const;
    Rational p1() const;
    std::optional<Rational> g() const;
    std::optional<Rational> h() const;
    std::optional<Rational> i() const;
    std::optional<Rational> j() const;
};

// number of compositions of n into four nonnegative parts: C(n+3,3)
long long composition_count(long long n);

// Visits every composition of every N in [1, n_max], exactly once.
void enumerate_populations(long long n_max,
                           const std::function<void(const FinitePopulation&)>& visit);

std::vector<FinitePopulation> populations_of_size(long long n);

enum class Proposition {
    p1,                   // monotone decrease: identified g equals the counted g
    p2,                   // shared-(g,h) decrease pairs: rr(-) transport is exact
    p3,                   // non-monotone pairs: naive rr(-) bias equals (f-1)(1-h)
    p4,                   // monotone increase: identified h equals the counted h
    p5,                   // shared-(g,h) increase pairs: rr(+) transport is exact
    p6,                   // rr(+) mirror of the bias identity
    p7,                   // mechanism counting: shared attribute law forces shared g (or j)
    p8,                   // rare outcomes with equal rr(+): rd gap bounded by 2r^2
    collapsibility,       // weighted stratum averages reproduce marginal parameters
    symmetry_outcome,     // outcome recode swaps g<->h and i<->j
    symmetry_exposure,    // exposure recode exchanges (g,h) with (i,j)
    p2_negative_control,  // injected causal individual must break p2 transport
    p5_negative_control,  // injected preventative individual must break p5 transport
    worked_examples,      // frozen numeric goldens recomputed exactly
};

const char* to_string(Proposition p);
std::optional<Proposition> proposition_from_string(const std::string& s);
std::vector<Proposition> all_propositions();

struct OracleBounds {
    long long single_n_max = 60;        // single-population universes (p1, p4, symmetries)
    long long pair_n_max = 24;          // exhaustive shared-parameter pair stage
    long long collapse_n_max = 12;      // per-stratum size bound for collapsibility pairs
    long long rare_denominator = 10;    // p8 universe: risks <= 1/rare_denominator
    long long sampled_pair_n_max = 60;  // sampled pair stage reaches up to this size
    std::size_t samples_per_size = 200; // constructed pairs per study size in that stage
    std::uint64_t seed = 0;
};

struct Witness {
    FinitePopulation study;
    FinitePopulation target;
    std::string note;
};

struct PropositionCheck {
    Proposition proposition = Proposition::p1;
    std::string universe;        // human-readable description of the enumerated domain
    long long cases_checked = 0;
    bool pass = false;
    bool expected_pass = true;   // negative controls expect pass == false
    std::optional<Witness> witness;

    bool as_expected() const { return pass == expected_pass; }
};

PropositionCheck verify(Proposition prop, const OracleBounds& bounds = {});
std::vector<PropositionCheck> verify_all(const OracleBounds& bounds = {});

}  // namespace cost::oracle
