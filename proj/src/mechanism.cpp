#include "cost/mechanism.hpp"

#include <random>
#include <stdexcept>

namespace cost::mech {

const char* to_string(PopulationId id) { return id == PopulationId::s ? "s" : "t"; }

const char* to_string(CellEffect e) {
    switch (e) {
        case CellEffect::no_effect: return "no_effect";
        case CellEffect::forces_zero: return "forces_zero";
        case CellEffect::forces_one: return "forces_one";
    }
    return "?";
}

std::optional<CellEffect> cell_effect_from_string(const std::string& s) {
    if (s == "no_effect") return CellEffect::no_effect;
    if (s == "forces_zero") return CellEffect::forces_zero;
    if (s == "forces_one") return CellEffect::forces_one;
    return std::nullopt;
}

void require_valid(const Frac& f) {
    if (f.den < 1)
        throw std::invalid_argument("fraction denominator must be >= 1, got " +
                                    std::to_string(f.den));
    if (f.num < 0 || f.num > f.den)
        throw std::invalid_argument("fraction " + std::to_string(f.num) + "/" +
                                    std::to_string(f.den) + " is not a probability");
}

Frac parse_frac(const std::string& text) {
    Frac f;
    std::size_t pos = 0;
    try {
        f.num = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse fraction '" + text + "'");
    }
    if (pos == text.size()) {
        f.den = 1;  // bare integer: 0 or 1
    } else if (text[pos] == '/') {
        std::size_t pos2 = 0;
        const std::string rest = text.substr(pos + 1);
        try {
            f.den = std::stoll(rest, &pos2);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse fraction '" + text + "'");
        }
        if (pos2 != rest.size())
            throw std::invalid_argument("cannot parse fraction '" + text + "'");
    } else {
        throw std::invalid_argument("cannot parse fraction '" + text + "'");
    }
    require_valid(f);
    return f;
}

long long MechanismPopulation::size_of(PopulationId id) const {
    long long n = 0;
    for (const auto& ind : individuals)
        if (ind.population == id) ++n;
    return n;
}

namespace {

int forced_value(CellEffect e, int frailty) {
    switch (e) {
        case CellEffect::no_effect: return frailty;
        case CellEffect::forces_zero: return 0;
        case CellEffect::forces_one: return 1;
    }
    return frailty;
}

OutcomeTable make_table(const ConditionSet& cs, CellEffect joint_cell, bool frailty_bit) {
    OutcomeTable tb;
    tb.has_z = cs.z.has_value();
    const int fr = frailty_bit ? 1 : 0;
    if (!tb.has_z) {
        if (cs.x == XCondition::c3) {
            tb.set(0, 0, 0, fr);  // baseline untouched by x
            tb.set(0, 1, 0, fr);
            tb.set(1, 0, 0, fr);  // treatment inert without the attribute
            tb.set(1, 1, 0, 0);   // x protective under treatment
        } else {
            tb.set(1, 0, 0, fr);  // treated outcome untouched by x
            tb.set(1, 1, 0, fr);
            tb.set(0, 0, 0, fr);
            tb.set(0, 1, 0, 1);   // x causes the outcome without treatment
        }
        // fill the unused z plane so the table is total either way
        for (int a = 0; a < 2; ++a)
            for (int x = 0; x < 2; ++x) tb.set(a, x, 1, tb(a, x, 0));
        return tb;
    }
    if (cs.x == XCondition::c3) {
        // 3/5 pairing: attributes redirect the treated outcome only
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) tb.set(0, x, z, fr);
        tb.set(1, 0, 0, fr);
        tb.set(1, 1, 0, 0);  // x alone: protective
        tb.set(1, 0, 1, 1);  // z alone: harmful
        tb.set(1, 1, 1, forced_value(joint_cell, fr));
    } else {
        // 4/6 pairing: attributes redirect the untreated outcome only
        for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z) tb.set(1, x, z, fr);
        tb.set(0, 0, 0, fr);
        tb.set(0, 1, 0, 1);  // x alone: causes without treatment
        tb.set(0, 0, 1, 0);  // z alone: prevents without treatment
        tb.set(0, 1, 1, forced_value(joint_cell, fr));
    }
    return tb;
}

constexpr long long kExhaustiveRosterCap = 200000;

void append_exhaustive(std::vector<MechanismIndividual>& out, PopulationId id,
                       const PopulationLaw& law, const ConditionSet& cs, CellEffect joint_cell) {
    const bool has_z = cs.z.has_value();
    const long long zden = has_z ? law.pr_z.den : 1;
    const long long size = law.pr_x.den * law.pr_frailty.den * zden;
    if (size > kExhaustiveRosterCap)
        throw std::invalid_argument("exhaustive roster of " + std::to_string(size) +
                                    " individuals exceeds the cap of " +
                                    std::to_string(kExhaustiveRosterCap) +
                                    "; reduce the law denominators or use monte_carlo");
    for (long long ix = 0; ix < law.pr_x.den; ++ix) {
        for (long long ifr = 0; ifr < law.pr_frailty.den; ++ifr) {
            for (long long iz = 0; iz < zden; ++iz) {
                MechanismIndividual ind;
                ind.population = id;
                ind.x = ix < law.pr_x.num;
                if (has_z) ind.z = iz < law.pr_z.num;
                ind.outcomes = make_table(cs, joint_cell, ifr < law.pr_frailty.num);
                out.push_back(ind);
            }
        }
    }
}

void append_sampled(std::vector<MechanismIndividual>& out, PopulationId id,
                    const PopulationLaw& law, const ConditionSet& cs, CellEffect joint_cell,
                    std::size_t n, std::mt19937_64& rng) {
    const bool has_z = cs.z.has_value();
    const auto draw = [&rng](const Frac& f) {
        std::uniform_int_distribution<long long> d(0, f.den - 1);
        return d(rng) < f.num;
    };
    for (std::size_t k = 0; k < n; ++k) {
        MechanismIndividual ind;
        ind.population = id;
        ind.x = draw(law.pr_x);
        if (has_z) ind.z = draw(law.pr_z);
        ind.outcomes = make_table(cs, joint_cell, draw(law.pr_frailty));
        out.push_back(ind);
    }
}

}  // namespace

MechanismPopulation build_population(const MechanismSpec& spec) {
    if (!spec.conditions.coherent())
        throw std::invalid_argument(
            "incoherent condition pairing: the protective-X law 3(a-c) pairs with 5(a-c), "
            "the causal-X law 4(a-c) with 6(a-c)");
    for (const PopulationLaw* law : {&spec.s, &spec.t}) {
        require_valid(law->pr_x);
        require_valid(law->pr_frailty);
        if (spec.conditions.z) require_valid(law->pr_z);
    }
    MechanismPopulation pop;
    if (spec.mode == BuildMode::exhaustive) {
        append_exhaustive(pop.individuals, PopulationId::s, spec.s, spec.conditions,
                          spec.joint_cell);
        append_exhaustive(pop.individuals, PopulationId::t, spec.t, spec.conditions,
                          spec.joint_cell);
    } else {
        if (spec.sample_size == 0)
            throw std::invalid_argument("monte_carlo mode needs sample_size >= 1");
        std::mt19937_64 rng(spec.seed);
        append_sampled(pop.individuals, PopulationId::s, spec.s, spec.conditions, spec.joint_cell,
                       spec.sample_size, rng);
        append_sampled(pop.individuals, PopulationId::t, spec.t, spec.conditions, spec.joint_cell,
                       spec.sample_size, rng);
    }
    return pop;
}

MechanismParams cost_from_mechanism(const MechanismPopulation& pop, PopulationId id) {
    MechanismParams out;
    for (const auto& ind : pop.individuals) {
        if (ind.population != id) continue;
        const int y0 = ind.realized(0);
        const int y1 = ind.realized(1);
        if (y1 == 1 && y0 == 1) ++out.counts.doomed;
        else if (y1 == 1 && y0 == 0) ++out.counts.causal;
        else if (y1 == 0 && y0 == 1) ++out.counts.preventative;
        else ++out.counts.immune;
    }
    const long long n = out.counts.total();
    if (n == 0)
        throw std::invalid_argument(std::string("population ") + to_string(id) +
                                    " has no individuals");
    const double nd = static_cast<double>(n);
    out.distribution = ResponseTypeDistribution{out.counts.doomed / nd, out.counts.causal / nd,
                                                out.counts.preventative / nd,
                                                out.counts.immune / nd};
    if (out.counts.doomed + out.counts.preventative > 0)
        out.introduce.g = static_cast<double>(out.counts.doomed) /
                          static_cast<double>(out.counts.doomed + out.counts.preventative);
    if (out.counts.immune + out.counts.causal > 0)
        out.introduce.h = static_cast<double>(out.counts.immune) /
                          static_cast<double>(out.counts.immune + out.counts.causal);
    if (out.counts.doomed + out.counts.causal > 0)
        out.remove.i = static_cast<double>(out.counts.doomed) /
                       static_cast<double>(out.counts.doomed + out.counts.causal);
    if (out.counts.immune + out.counts.preventative > 0)
        out.remove.j = static_cast<double>(out.counts.immune) /
                       static_cast<double>(out.counts.immune + out.counts.preventative);
    return out;
}

bool same_fraction(long long num_a, long long den_a, long long num_b, long long den_b) {
    if (den_a <= 0 || den_b <= 0) throw std::invalid_argument("same_fraction: zero denominator");
    return static_cast<__int128>(num_a) * den_b == static_cast<__int128>(num_b) * den_a;
}

namespace {

std::optional<bool> equal_param(const MechanismPopulation& pop, long long ResponseTypeCounts::*num,
                                long long ResponseTypeCounts::*other) {
    const ResponseTypeCounts cs = cost_from_mechanism(pop, PopulationId::s).counts;
    const ResponseTypeCounts ct = cost_from_mechanism(pop, PopulationId::t).counts;
    const long long ds = cs.*num, es = cs.*num + cs.*other;
    const long long dt = ct.*num, et = ct.*num + ct.*other;
    if (es == 0 || et == 0) return std::nullopt;
    return same_fraction(ds, es, dt, et);
}

}  // namespace

std::optional<bool> equal_g(const MechanismPopulation& pop) {
    return equal_param(pop, &ResponseTypeCounts::doomed, &ResponseTypeCounts::preventative);
}
std::optional<bool> equal_h(const MechanismPopulation& pop) {
    return equal_param(pop, &ResponseTypeCounts::immune, &ResponseTypeCounts::causal);
}
std::optional<bool> equal_i(const MechanismPopulation& pop) {
    return equal_param(pop, &ResponseTypeCounts::doomed, &ResponseTypeCounts::causal);
}
std::optional<bool> equal_j(const MechanismPopulation& pop) {
    return equal_param(pop, &ResponseTypeCounts::immune, &ResponseTypeCounts::preventative);
}

const ConditionCheck* ConditionReport::find(const std::string& id) const {
    for (const auto& c : checks)
        if (c.id == id) return &c;
    return nullptr;
}

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

// table-level clause checked individual by individual
template <typename Pred>
ConditionCheck table_check(const MechanismPopulation& pop, std::string id, std::string detail,
                           Pred pred) {
    ConditionCheck check;
    check.id = std::move(id);
    check.detail = std::move(detail);
    for (std::size_t k = 0; k < pop.individuals.size(); ++k) {
        if (!pred(pop.individuals[k])) {
            check.pass = false;
            if (check.counterexamples.size() < kMaxCounterexamples)
                check.counterexamples.push_back(k);
        }
    }
    return check;
}

// exact count-level independence of two binary features within one population
template <typename FA, typename FB>
bool count_independent(const MechanismPopulation& pop, PopulationId id, FA fa, FB fb) {
    long long n = 0, na = 0, nb = 0, nab = 0;
    for (const auto& ind : pop.individuals) {
        if (ind.population != id) continue;
        ++n;
        const bool a = fa(ind), b = fb(ind);
        if (a) ++na;
        if (b) ++nb;
        if (a && b) ++nab;
    }
    if (n == 0) return false;
    return static_cast<__int128>(nab) * n == static_cast<__int128>(na) * nb;
}

template <typename FA, typename FB>
ConditionCheck independence_check(const MechanismPopulation& pop, std::string id,
                                  std::string detail, FA fa, FB fb) {
    ConditionCheck check;
    check.id = std::move(id);
    check.detail = std::move(detail);
    check.pass = count_independent(pop, PopulationId::s, fa, fb) &&
                 count_independent(pop, PopulationId::t, fa, fb);
    return check;
}

}  // namespace

ConditionReport check_conditions(const MechanismPopulation& pop, const ConditionSet& cs,
                                 CellEffect joint_cell) {
    if (!cs.coherent())
        throw std::invalid_argument("incoherent condition pairing (3 pairs with 5, 4 with 6)");
    const bool has_z = cs.z.has_value();
    const bool protective_x = cs.x == XCondition::c3;
    ConditionReport report;

    // 1: attribute laws equal across populations (joint law when z present)
    {
        ConditionCheck check;
        check.id = "1";
        check.detail = has_z ? "joint (x,z) distribution equal between populations"
                             : "x distribution equal between populations";
        const long long ns = pop.size_of(PopulationId::s);
        const long long nt = pop.size_of(PopulationId::t);
        if (ns == 0 || nt == 0) {
            check.pass = false;
            check.detail += "; a population roster is empty";
        } else {
            const int cells = has_z ? 4 : 2;
            for (int c = 0; c < cells && check.pass; ++c) {
                long long in_s = 0, in_t = 0;
                for (const auto& ind : pop.individuals) {
                    const int cell = (ind.x ? 1 : 0) + (ind.z.value_or(false) ? 2 : 0);
                    if (cell != c) continue;
                    (ind.population == PopulationId::s ? in_s : in_t) += 1;
                }
                if (static_cast<__int128>(in_s) * nt != static_cast<__int128>(in_t) * ns)
                    check.pass = false;
            }
        }
        report.checks.push_back(std::move(check));
    }

    // 2: treatment inert in the all-absent attribute stratum
    report.checks.push_back(table_check(
        pop, "2", "treatment has no effect when every attribute is absent",
        [](const MechanismIndividual& ind) { return ind.outcomes(0, 0, 0) == ind.outcomes(1, 0, 0); }));

    const int zplanes = has_z ? 2 : 1;
    if (protective_x) {
        report.checks.push_back(table_check(
            pop, "3a", "x has no effect on the untreated outcome",
            [zplanes](const MechanismIndividual& ind) {
                for (int z = 0; z < zplanes; ++z)
                    if (ind.outcomes(0, 0, z) != ind.outcomes(0, 1, z)) return false;
                return true;
            }));
        report.checks.push_back(table_check(
            pop, "3b", "x alone forces the treated outcome to zero",
            [](const MechanismIndividual& ind) { return ind.outcomes(1, 1, 0) == 0; }));
        report.checks.push_back(independence_check(
            pop, "3c", "x independent of the untreated outcome within each population",
            [](const MechanismIndividual& ind) { return ind.x; },
            [](const MechanismIndividual& ind) { return ind.realized(0) == 1; }));
    } else {
        report.checks.push_back(table_check(
            pop, "4a", "x has no effect on the treated outcome",
            [zplanes](const MechanismIndividual& ind) {
                for (int z = 0; z < zplanes; ++z)
                    if (ind.outcomes(1, 0, z) != ind.outcomes(1, 1, z)) return false;
                return true;
            }));
        report.checks.push_back(table_check(
            pop, "4b", "x alone forces the untreated outcome to one",
            [](const MechanismIndividual& ind) { return ind.outcomes(0, 1, 0) == 1; }));
        report.checks.push_back(independence_check(
            pop, "4c", "x independent of the treated outcome within each population",
            [](const MechanismIndividual& ind) { return ind.x; },
            [](const MechanismIndividual& ind) { return ind.realized(1) == 1; }));
    }

    if (has_z) {
        if (*cs.z == ZCondition::c5) {
            report.checks.push_back(table_check(
                pop, "5a", "z has no effect on the untreated outcome",
                [](const MechanismIndividual& ind) {
                    for (int x = 0; x < 2; ++x)
                        if (ind.outcomes(0, x, 0) != ind.outcomes(0, x, 1)) return false;
                    return true;
                }));
            report.checks.push_back(table_check(
                pop, "5b", "z alone forces the treated outcome to one",
                [](const MechanismIndividual& ind) { return ind.outcomes(1, 0, 1) == 1; }));
            report.checks.push_back(independence_check(
                pop, "5c", "z independent of the untreated outcome within each population",
                [](const MechanismIndividual& ind) { return ind.z.value_or(false); },
                [](const MechanismIndividual& ind) { return ind.realized(0) == 1; }));
        } else {
            report.checks.push_back(table_check(
                pop, "6a", "z has no effect on the treated outcome",
                [](const MechanismIndividual& ind) {
                    for (int x = 0; x < 2; ++x)
                        if (ind.outcomes(1, x, 0) != ind.outcomes(1, x, 1)) return false;
                    return true;
                }));
            report.checks.push_back(table_check(
                pop, "6b", "z alone forces the untreated outcome to zero",
                [](const MechanismIndividual& ind) { return ind.outcomes(0, 0, 1) == 0; }));
            report.checks.push_back(independence_check(
                pop, "6c", "z independent of the treated outcome within each population",
                [](const MechanismIndividual& ind) { return ind.z.value_or(false); },
                [](const MechanismIndividual& ind) { return ind.realized(1) == 1; }));
        }

        // the contested (x=1,z=1) cell follows the declared supersedence
        const int act_side = protective_x ? 1 : 0;
        const int other_side = 1 - act_side;
        report.checks.push_back(table_check(
            pop, "joint-cell",
            std::string("(x=1,z=1) cell acts as ") + to_string(joint_cell),
            [=](const MechanismIndividual& ind) {
                const int v = ind.outcomes(act_side, 1, 1);
                switch (joint_cell) {
                    case CellEffect::no_effect: return v == ind.outcomes(other_side, 1, 1);
                    case CellEffect::forces_zero: return v == 0;
                    case CellEffect::forces_one: return v == 1;
                }
                return false;
            }));

        // joint (x,z) cell independent of the free-side counterfactual; this is
        // what the U-strata argument leans on, beyond the per-attribute clauses
        const int free_side = other_side;
        ConditionCheck joint;
        joint.id = "joint-independence";
        joint.detail = "joint (x,z) cell independent of the unforced counterfactual";
        joint.pass = true;
        for (int c = 0; c < 4 && joint.pass; ++c) {
            const bool cx = (c & 1) != 0, cz = (c & 2) != 0;
            joint.pass =
                independence_check(
                    pop, "", "",
                    [cx, cz](const MechanismIndividual& ind) {
                        return ind.x == cx && ind.z.value_or(false) == cz;
                    },
                    [free_side](const MechanismIndividual& ind) {
                        return ind.realized(free_side) == 1;
                    })
                    .pass;
        }
        report.checks.push_back(std::move(joint));
    }

    for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
    return report;
}

UStrataReport assign_u_strata(const MechanismPopulation& pop, PopulationId id,
                              const CellMap& cells) {
    UStrataReport rep;
    for (std::size_t k = 0; k < pop.individuals.size(); ++k) {
        const auto& ind = pop.individuals[k];
        if (ind.population != id) continue;
        const int zcells = ind.outcomes.has_z ? 2 : 1;
        for (int z = 0; z < zcells; ++z) {
            for (int x = 0; x < 2; ++x) {
                const CellEffect e = cells[static_cast<std::size_t>(x + 2 * z)];
                const int y1 = ind.outcomes(1, x, z);
                const bool ok = e == CellEffect::no_effect ? y1 == ind.outcomes(0, x, z)
                                : e == CellEffect::forces_zero ? y1 == 0
                                                               : y1 == 1;
                if (!ok)
                    throw std::invalid_argument(
                        "cell (x=" + std::to_string(x) + ",z=" + std::to_string(z) +
                        ") has mixed effect directions: individual #" + std::to_string(k) +
                        " contradicts " + to_string(e));
            }
        }
        const std::size_t cell =
            static_cast<std::size_t>((ind.x ? 1 : 0) + (ind.z.value_or(false) ? 2 : 0));
        switch (cells[cell]) {
            case CellEffect::no_effect: ++rep.counts[0]; break;
            case CellEffect::forces_zero: ++rep.counts[1]; break;
            case CellEffect::forces_one: ++rep.counts[2]; break;
        }
    }
    rep.population_size = rep.counts[0] + rep.counts[1] + rep.counts[2];
    if (rep.population_size == 0)
        throw std::invalid_argument(std::string("population ") + to_string(id) +
                                    " has no individuals");
    const double n = static_cast<double>(rep.population_size);
    rep.pr_u0 = rep.counts[0] / n;
    rep.pr_u1 = rep.counts[1] / n;
    rep.pr_u2 = rep.counts[2] / n;
    rep.params = cost_from_mechanism(pop, id);

    const auto& c = rep.params.counts;
    const long long N = rep.population_size;
    if (c.doomed + c.preventative > 0) {
        rep.g_complement_of_u1 =
            same_fraction(c.doomed, c.doomed + c.preventative, N - rep.counts[1], N);
        rep.g_direct_u1 = same_fraction(c.doomed, c.doomed + c.preventative, rep.counts[1], N);
    }
    if (c.immune + c.causal > 0) {
        rep.h_complement_of_u2 =
            same_fraction(c.immune, c.immune + c.causal, N - rep.counts[2], N);
        rep.h_direct_u2 = same_fraction(c.immune, c.immune + c.causal, rep.counts[2], N);
    }
    return rep;
}

}  // namespace cost::mech
