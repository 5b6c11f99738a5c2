#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cost/params.hpp"

// Generative model of treatment response driven by latent biological
// attributes. Populations are explicit rosters of individuals carrying full
// joint counterfactual tables Y^{a,x(,z)}, so every distributional claim can
// be checked by exact counting.
namespace cost::mech {

enum class PopulationId { s, t };

const char* to_string(PopulationId id);

// Exact fraction (e.g. 3/10) used for attribute and frailty laws, so that
// exhaustive rosters realize the law without rounding.
struct Frac {
    long long num = 0;
    long long den = 1;
};

void require_valid(const Frac& f);          // 0 <= num <= den, den >= 1
Frac parse_frac(const std::string& text);   // "3/10", "0", "1"

// Joint counterfactual outcomes. Indexed by treatment a, attribute x and
// (when has_z) attribute z; the z dimension is ignored otherwise.
struct OutcomeTable {
    bool has_z = false;
    std::array<std::uint8_t, 8> y{};

    int operator()(int a, int x, int z = 0) const { return y[idx(a, x, has_z ? z : 0)]; }
    void set(int a, int x, int z, int value) { y[idx(a, x, z)] = static_cast<std::uint8_t>(value); }

    static std::size_t idx(int a, int x, int z) {
        return static_cast<std::size_t>(a + 2 * x + 4 * z);
    }
};

struct MechanismIndividual {
    PopulationId population = PopulationId::s;
    bool x = false;
    std::optional<bool> z;
    OutcomeTable outcomes;

    // realized potential outcome under treatment level a (consistency)
    int realized(int a) const { return outcomes(a, x ? 1 : 0, z.value_or(false) ? 1 : 0); }
};

struct MechanismPopulation {
    std::vector<MechanismIndividual> individuals;

    long long size_of(PopulationId id) const;
};

// Which direction the attribute acts in. C3/C4 apply to X (protective with
// treatment / causing without treatment); C5/C6 are the corresponding laws
// for a second attribute Z acting in the opposite direction.
enum class XCondition { c3, c4 };
enum class ZCondition { c5, c6 };

struct ConditionSet {
    XCondition x = XCondition::c3;
    std::optional<ZCondition> z;

    // only the pairings 3<->5 and 4<->6 are coherent
    bool coherent() const {
        if (!z) return true;
        return (x == XCondition::c3 && *z == ZCondition::c5) ||
               (x == XCondition::c4 && *z == ZCondition::c6);
    }
};

// Behavior of one (x,z) cell on the side the conditions act on (the treated
// outcome for the 3/5 pairing, the untreated outcome for 4/6).
enum class CellEffect { no_effect, forces_zero, forces_one };

const char* to_string(CellEffect e);
std::optional<CellEffect> cell_effect_from_string(const std::string& s);

enum class BuildMode { exhaustive, monte_carlo };

// Per-population laws. pr_z is only consulted when the condition set carries
// a Z condition. pr_frailty is the law of the latent baseline bit that
// determines the outcome wherever no attribute forces it.
struct PopulationLaw {
    Frac pr_x{0, 1};
    Frac pr_frailty{0, 1};
    Frac pr_z{0, 1};
};

struct MechanismSpec {
    PopulationLaw s;
    PopulationLaw t;
    ConditionSet conditions;
    // direction of the contested (x=1,z=1) cell when both attributes are
    // present; e.g. "the allergic reaction supersedes the susceptibility"
    // is forces_one under the 3/5 pairing
    CellEffect joint_cell = CellEffect::forces_one;
    BuildMode mode = BuildMode::exhaustive;
    std::uint64_t seed = 0;
    std::size_t sample_size = 10000;  // per population, monte_carlo only
};

// Exhaustive mode lays out one individual per cell of the cross product of
// the law denominators (attributes exactly independent of frailty by
// construction); monte_carlo draws sample_size individuals per population
// from the same laws.
MechanismPopulation build_population(const MechanismSpec& spec);

// ---- counting ---------------------------------------------------------------

struct ResponseTypeCounts {
    long long doomed = 0;
    long long causal = 0;
    long long preventative = 0;
    long long immune = 0;

    long long total() const { return doomed + causal + preventative + immune; }
};

struct MechanismParams {
    ResponseTypeCounts counts;
    ResponseTypeDistribution distribution;
    CostIntroduce introduce;
    CostRemove remove;
};

MechanismParams cost_from_mechanism(const MechanismPopulation& pop, PopulationId id);

// exact equality of num_a/den_a and num_b/den_b (den > 0)
bool same_fraction(long long num_a, long long den_a, long long num_b, long long den_b);

// Cross-population exact equality of one parameter at the count level;
// absent when the conditioning event is empty in either population.
std::optional<bool> equal_g(const MechanismPopulation& pop);
std::optional<bool> equal_h(const MechanismPopulation& pop);
std::optional<bool> equal_i(const MechanismPopulation& pop);
std::optional<bool> equal_j(const MechanismPopulation& pop);

// ---- condition checking ------------------------------------------------------

struct ConditionCheck {
    std::string id;  // "1", "2", "3a", "3b", "3c", "joint-cell", "joint-independence", ...
    bool pass = true;
    std::string detail;
    std::vector<std::size_t> counterexamples;  // indices into pop.individuals (first few)
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;
    bool all_pass = true;

    const ConditionCheck* find(const std::string& id) const;
};

// Verifies the requested conditions against an arbitrary roster (not only
// built ones): table-level clauses individual by individual, independence
// clauses as exact count-level independence within each population.
ConditionReport check_conditions(const MechanismPopulation& pop, const ConditionSet& cs,
                                 CellEffect joint_cell = CellEffect::forces_one);

// ---- U-strata (joint X,Z classification) -------------------------------------

// Cell map indexed by x + 2*z, classifying the effect of treatment on the
// treated outcome Y^{a=1} in each (x,z) stratum.
using CellMap = std::array<CellEffect, 4>;

struct UStrataReport {
    std::array<long long, 3> counts{};  // individuals with U = 0, 1, 2
    long long population_size = 0;
    double pr_u0 = 0.0, pr_u1 = 0.0, pr_u2 = 0.0;
    MechanismParams params;
    // exact count-level identities, absent when the parameter is undefined:
    //   G == 1 - Pr(U=1)  and  H == 1 - Pr(U=2)
    std::optional<bool> g_complement_of_u1;
    std::optional<bool> h_complement_of_u2;
    // the nominal direct readings G == Pr(U=1), H == Pr(U=2), for comparison
    std::optional<bool> g_direct_u1;
    std::optional<bool> h_direct_u2;
};

// Classifies each individual of `id` by the declared effect direction of its
// realized (x,z) cell. Rejects populations whose tables contradict the map
// (mixed effect directions within a cell).
UStrataReport assign_u_strata(const MechanismPopulation& pop, PopulationId id,
                              const CellMap& cells);

}  // namespace cost::mech
