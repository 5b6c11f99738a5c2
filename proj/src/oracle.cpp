#include "cost/oracle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

#include "cost/mechanism.hpp"

namespace cost::oracle {

namespace {

Rational rat(long long num, long long den) { return Rational(num, den); }

long long num_of(const Rational& r) {
    return boost::multiprecision::numerator(r).convert_to<long long>();
}

long long den_of(const Rational& r) {
    return boost::multiprecision::denominator(r).convert_to<long long>();
}

bool same_opt(const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a.has_value() || *a == *b;
}

std::string describe(const FinitePopulation& p) {
    return "(" + std::to_string(p.doomed) + "," + std::to_string(p.causal) + "," +
           std::to_string(p.preventative) + "," + std::to_string(p.immune) + ")";
}

}  // namespace

Rational FinitePopulation::p0() const {
    return rat(doomed + preventative, size());
}

Rational FinitePopulation::p1() const {
    return rat(doomed + causal, size());
}

std::optional<Rational> FinitePopulation::g() const {
    if (doomed + preventative == 0) return std::nullopt;
    return rat(doomed, doomed + preventative);
}

std::optional<Rational> FinitePopulation::h() const {
    if (immune + causal == 0) return std::nullopt;
    return rat(immune, immune + causal);
}

std::optional<Rational> FinitePopulation::i() const {
    if (doomed + causal == 0) return std::nullopt;
    return rat(doomed, doomed + causal);
}

std::optional<Rational> FinitePopulation::j() const {
    if (immune + preventative == 0) return std::nullopt;
    return rat(immune, immune + preventative);
}

long long composition_count(long long n) {
    if (n < 0) throw std::invalid_argument("composition_count: negative size");
    return (n + 1) * (n + 2) * (n + 3) / 6;
}

void enumerate_populations(long long n_max,
                           const std::function<void(const FinitePopulation&)>& visit) {
    for (long long n = 1; n <= n_max; ++n) {
        for (long long d = 0; d <= n; ++d) {
            for (long long c = 0; c + d <= n; ++c) {
                for (long long p = 0; p + c + d <= n; ++p) {
                    visit(FinitePopulation{d, c, p, n - d - c - p});
                }
            }
        }
    }
}

std::vector<FinitePopulation> populations_of_size(long long n) {
    std::vector<FinitePopulation> out;
    if (n < 1) return out;
    out.reserve(static_cast<std::size_t>(composition_count(n)));
    for (long long d = 0; d <= n; ++d) {
        for (long long c = 0; c + d <= n; ++c) {
            for (long long p = 0; p + c + d <= n; ++p) {
                out.push_back(FinitePopulation{d, c, p, n - d - c - p});
            }
        }
    }
    return out;
}

const char* to_string(Proposition p) {
    switch (p) {
        case Proposition::p1: return "p1";
        case Proposition::p2: return "p2";
        case Proposition::p3: return "p3";
        case Proposition::p4: return "p4";
        case Proposition::p5: return "p5";
        case Proposition::p6: return "p6";
        case Proposition::p7: return "p7";
        case Proposition::p8: return "p8";
        case Proposition::collapsibility: return "collapsibility";
        case Proposition::symmetry_outcome: return "symmetry-outcome";
        case Proposition::symmetry_exposure: return "symmetry-exposure";
        case Proposition::p2_negative_control: return "p2-negative-control";
        case Proposition::p5_negative_control: return "p5-negative-control";
        case Proposition::worked_examples: return "worked-examples";
    }
    return "?";
}

std::optional<Proposition> proposition_from_string(const std::string& s) {
    std::string key = s;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (Proposition p : all_propositions()) {
        if (key == to_string(p)) return p;
    }
    return std::nullopt;
}

std::vector<Proposition> all_propositions() {
    return {Proposition::p1,
            Proposition::p2,
            Proposition::p3,
            Proposition::p4,
            Proposition::p5,
            Proposition::p6,
            Proposition::p7,
            Proposition::p8,
            Proposition::collapsibility,
            Proposition::symmetry_outcome,
            Proposition::symmetry_exposure,
            Proposition::p2_negative_control,
            Proposition::p5_negative_control,
            Proposition::worked_examples};
}

namespace {

struct CheckState {
    PropositionCheck out;

    void fail(const FinitePopulation& s, const FinitePopulation& t, std::string note) {
        if (!out.witness) {
            out.witness = Witness{s, t, std::move(note)};
        }
        out.pass = false;
    }
};

// ---- single-population identification -----------------------------------------

// Treatment never causes the outcome: every population (d, 0, p, i). The risk
// ratio p1/p0 must reproduce the counted g, and (1-p0)/(1-p1) the counted j.
PropositionCheck check_p1(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p1;
    st.out.universe = "all monotone-decrease populations of size <= " +
                      std::to_string(b.single_n_max);
    st.out.pass = true;
    enumerate_populations(b.single_n_max, [&](const FinitePopulation& pop) {
        if (pop.causal != 0) return;
        if (pop.doomed + pop.preventative > 0) {
            ++st.out.cases_checked;
            Rational identified = pop.p1() / pop.p0();
            if (identified != *pop.g()) {
                st.fail(pop, pop, "risk ratio does not reproduce counted g at " + describe(pop));
            }
        }
        if (pop.preventative + pop.immune > 0) {
            ++st.out.cases_checked;
            Rational identified = (1 - pop.p0()) / (1 - pop.p1());
            if (identified != *pop.j()) {
                st.fail(pop, pop, "survivor ratio does not reproduce counted j at " + describe(pop));
            }
        }
    });
    return st.out;
}

// Treatment never prevents the outcome: every population (d, c, 0, i). The
// survivor ratio (1-p1)/(1-p0) must reproduce the counted h, and p0/p1 the
// counted i.
PropositionCheck check_p4(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p4;
    st.out.universe = "all monotone-increase populations of size <= " +
                      std::to_string(b.single_n_max);
    st.out.pass = true;
    enumerate_populations(b.single_n_max, [&](const FinitePopulation& pop) {
        if (pop.preventative != 0) return;
        if (pop.causal + pop.immune > 0) {
            ++st.out.cases_checked;
            Rational identified = (1 - pop.p1()) / (1 - pop.p0());
            if (identified != *pop.h()) {
                st.fail(pop, pop, "survivor ratio does not reproduce counted h at " + describe(pop));
            }
        }
        if (pop.doomed + pop.causal > 0) {
            ++st.out.cases_checked;
            Rational identified = pop.p0() / pop.p1();
            if (identified != *pop.i()) {
                st.fail(pop, pop, "risk ratio does not reproduce counted i at " + describe(pop));
            }
        }
    });
    return st.out;
}

// ---- shared-parameter pair universes -------------------------------------------

// Sentinel key for an undefined parameter; probabilities are never negative.
const Rational kUndefinedKey = Rational(-1);

Rational key_of(const std::optional<Rational>& v) { return v ? *v : kUndefinedKey; }

using PairKey = std::pair<Rational, Rational>;

std::map<PairKey, std::vector<FinitePopulation>> group_by_params(
    long long n_max, const std::function<bool(const FinitePopulation&)>& admit) {
    std::map<PairKey, std::vector<FinitePopulation>> groups;
    enumerate_populations(n_max, [&](const FinitePopulation& pop) {
        if (!admit(pop)) return;
        groups[{key_of(pop.g()), key_of(pop.h())}].push_back(pop);
    });
    return groups;
}

// Transport from study to target over every ordered pair of monotone-decrease
// populations sharing (g, h): the predicted target risk p0_t * (p1_s / p0_s)
// must equal the realized target risk exactly.
PropositionCheck check_p2(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p2;
    st.out.universe = "shared-(g,h) monotone-decrease pairs, exhaustive to size " +
                      std::to_string(b.pair_n_max) + ", constructed pairs to size " +
                      std::to_string(b.sampled_pair_n_max);
    st.out.pass = true;
    auto groups = group_by_params(b.pair_n_max, [](const FinitePopulation& p) {
        return p.causal == 0 && p.doomed + p.preventative > 0;
    });
    for (const auto& [key, members] : groups) {
        for (const FinitePopulation& s : members) {
            Rational rr_minus = s.p1() / s.p0();
            for (const FinitePopulation& t : members) {
                ++st.out.cases_checked;
                if (t.p0() * rr_minus != t.p1()) {
                    st.fail(s, t, "transported risk differs from realized risk");
                }
            }
        }
    }

    // constructed stage: random study, target built as an exact multiple of the
    // study's reduced g (preserving whether any immune individuals exist)
    std::mt19937_64 rng(b.seed);
    for (long long n = b.pair_n_max + 1; n <= b.sampled_pair_n_max; ++n) {
        for (std::size_t k = 0; k < b.samples_per_size; ++k) {
            std::uniform_int_distribution<long long> d_draw(0, n);
            long long d = d_draw(rng);
            std::uniform_int_distribution<long long> p_draw(0, n - d);
            long long p = p_draw(rng);
            if (d + p == 0) continue;
            FinitePopulation s{d, 0, p, n - d - p};
            Rational g = *s.g();
            long long num = num_of(g);
            long long den = den_of(g);
            long long reserve = s.immune > 0 ? 1 : 0;
            long long m_max = (b.sampled_pair_n_max - reserve) / den;
            if (m_max < 1) continue;
            std::uniform_int_distribution<long long> m_draw(1, m_max);
            long long m = m_draw(rng);
            long long i_t = 0;
            if (s.immune > 0) {
                std::uniform_int_distribution<long long> i_draw(1, b.sampled_pair_n_max - m * den);
                i_t = i_draw(rng);
            }
            FinitePopulation t{m * num, 0, m * (den - num), i_t};
            ++st.out.cases_checked;
            if (t.p0() * (s.p1() / s.p0()) != t.p1()) {
                st.fail(s, t, "transported risk differs from realized risk (constructed pair)");
            }
        }
    }
    return st.out;
}

// Mirror of p2 for monotone-increase pairs sharing (g, h): the predicted
// target non-risk (1-p0_t) * (1-p1_s)/(1-p0_s) must equal 1-p1_t exactly.
PropositionCheck check_p5(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p5;
    st.out.universe = "shared-(g,h) monotone-increase pairs, exhaustive to size " +
                      std::to_string(b.pair_n_max) + ", constructed pairs to size " +
                      std::to_string(b.sampled_pair_n_max);
    st.out.pass = true;
    auto groups = group_by_params(b.pair_n_max, [](const FinitePopulation& p) {
        return p.preventative == 0 && p.causal + p.immune > 0;
    });
    for (const auto& [key, members] : groups) {
        for (const FinitePopulation& s : members) {
            Rational rr_plus = (1 - s.p1()) / (1 - s.p0());
            for (const FinitePopulation& t : members) {
                ++st.out.cases_checked;
                if ((1 - t.p0()) * rr_plus != 1 - t.p1()) {
                    st.fail(s, t, "transported non-risk differs from realized non-risk");
                }
            }
        }
    }

    std::mt19937_64 rng(b.seed + 1);
    for (long long n = b.pair_n_max + 1; n <= b.sampled_pair_n_max; ++n) {
        for (std::size_t k = 0; k < b.samples_per_size; ++k) {
            std::uniform_int_distribution<long long> d_draw(0, n);
            long long d = d_draw(rng);
            std::uniform_int_distribution<long long> c_draw(0, n - d);
            long long c = c_draw(rng);
            long long i = n - d - c;
            if (c + i == 0) continue;
            FinitePopulation s{d, c, 0, i};
            Rational h = *s.h();
            long long num = num_of(h);
            long long den = den_of(h);
            long long reserve = s.doomed > 0 ? 1 : 0;
            long long m_max = (b.sampled_pair_n_max - reserve) / den;
            if (m_max < 1) continue;
            std::uniform_int_distribution<long long> m_draw(1, m_max);
            long long m = m_draw(rng);
            long long d_t = 0;
            if (s.doomed > 0) {
                std::uniform_int_distribution<long long> d_t_draw(1, b.sampled_pair_n_max - m * den);
                d_t = d_t_draw(rng);
            }
            FinitePopulation t{d_t, m * (den - num), 0, m * num};
            ++st.out.cases_checked;
            if ((1 - t.p0()) * ((1 - s.p1()) / (1 - s.p0())) != 1 - t.p1()) {
                st.fail(s, t, "transported non-risk differs from realized non-risk (constructed pair)");
            }
        }
    }
    return st.out;
}

// Bias of the naive risk-ratio carry-over across non-monotone pairs sharing
// (g, h): naive - true must equal (f - 1) * (1 - h) with f = p0_t / p0_s,
// with the matching sign classification.
void check_bias_pair(CheckState& st, const FinitePopulation& s, const FinitePopulation& t,
                     const Rational& g, const Rational& h) {
    ++st.out.cases_checked;
    Rational f = t.p0() / s.p0();
    Rational bias = t.p0() * (s.p1() / s.p0()) - t.p1();
    Rational closed = (f - 1) * (1 - h);
    if (bias != closed) {
        st.fail(s, t, "carry-over bias differs from (f-1)(1-h)");
        return;
    }
    bool zero_expected = (f == 1) || (h == 1);
    if (zero_expected ? (bias != 0) : ((bias > 0) != (f > 1))) {
        st.fail(s, t, "carry-over bias sign disagrees with (f-1)(1-h) classification");
    }
    (void)g;
}

// Mirror on the survivor scale: naive' - true' must equal (f'-1)(1-g) with
// f' = (1-p0_t)/(1-p0_s).
void check_bias_mirror_pair(CheckState& st, const FinitePopulation& s, const FinitePopulation& t,
                            const Rational& g) {
    ++st.out.cases_checked;
    Rational f_alt = (1 - t.p0()) / (1 - s.p0());
    Rational bias = (1 - t.p0()) * ((1 - s.p1()) / (1 - s.p0())) - (1 - t.p1());
    Rational closed = (f_alt - 1) * (1 - g);
    if (bias != closed) {
        st.fail(s, t, "survivor-scale carry-over bias differs from (f'-1)(1-g)");
        return;
    }
    bool zero_expected = (f_alt == 1) || (g == 1);
    if (zero_expected ? (bias != 0) : ((bias > 0) != (f_alt > 1))) {
        st.fail(s, t, "survivor-scale bias sign disagrees with classification");
    }
}

// Shared universe for p3/p6: both g and h defined, no monotonicity assumed.
// The constructed stage multiplies the reduced g- and h-fractions separately.
PropositionCheck check_bias(const OracleBounds& b, bool mirror) {
    CheckState st;
    st.out.proposition = mirror ? Proposition::p6 : Proposition::p3;
    st.out.universe = "shared-(g,h) pairs without monotonicity, exhaustive to size " +
                      std::to_string(b.pair_n_max) + ", constructed pairs to size " +
                      std::to_string(b.sampled_pair_n_max);
    st.out.pass = true;
    auto groups = group_by_params(b.pair_n_max, [](const FinitePopulation& p) {
        return p.doomed + p.preventative > 0 && p.causal + p.immune > 0;
    });
    for (const auto& [key, members] : groups) {
        for (const FinitePopulation& s : members) {
            for (const FinitePopulation& t : members) {
                if (mirror) {
                    check_bias_mirror_pair(st, s, t, key.first);
                } else {
                    check_bias_pair(st, s, t, key.first, key.second);
                }
            }
        }
    }

    std::mt19937_64 rng(b.seed + (mirror ? 3 : 2));
    for (long long n = b.pair_n_max + 1; n <= b.sampled_pair_n_max; ++n) {
        for (std::size_t k = 0; k < b.samples_per_size; ++k) {
            std::uniform_int_distribution<long long> d_draw(0, n);
            long long d = d_draw(rng);
            std::uniform_int_distribution<long long> c_draw(0, n - d);
            long long c = c_draw(rng);
            std::uniform_int_distribution<long long> p_draw(0, n - d - c);
            long long p = p_draw(rng);
            long long i = n - d - c - p;
            if (d + p == 0 || c + i == 0) continue;
            FinitePopulation s{d, c, p, i};
            Rational g = *s.g();
            Rational h = *s.h();
            long long gb = den_of(g);
            long long hb = den_of(h);
            if (gb + hb > b.sampled_pair_n_max) continue;
            std::uniform_int_distribution<long long> m_draw(1, (b.sampled_pair_n_max - hb) / gb);
            long long m = m_draw(rng);
            std::uniform_int_distribution<long long> k_draw(
                1, (b.sampled_pair_n_max - m * gb) / hb);
            long long kk = k_draw(rng);
            long long ga = num_of(g);
            long long ha = num_of(h);
            FinitePopulation t{m * ga, kk * (hb - ha), m * (gb - ga), kk * ha};
            if (mirror) {
                check_bias_mirror_pair(st, s, t, g);
            } else {
                check_bias_pair(st, s, t, g, h);
            }
        }
    }
    return st.out;
}

// Rare-outcome risk-difference stability: among populations whose risks are
// both <= 1/r, pairs with exactly equal survivor ratios have risk differences
// within 2/r^2 of each other, and the gap factors as p0_t*p1_s - p0_s*p1_t.
PropositionCheck check_p8(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p8;
    st.out.universe = "equal-rr(+) pairs with all risks <= 1/" +
                      std::to_string(b.rare_denominator) + ", sizes <= " +
                      std::to_string(b.single_n_max);
    st.out.pass = true;
    std::map<Rational, std::vector<FinitePopulation>> groups;
    enumerate_populations(b.single_n_max, [&](const FinitePopulation& pop) {
        long long n = pop.size();
        if (b.rare_denominator * (pop.doomed + pop.preventative) > n) return;
        if (b.rare_denominator * (pop.doomed + pop.causal) > n) return;
        groups[(1 - pop.p1()) / (1 - pop.p0())].push_back(pop);
    });
    Rational bound = 2 / (Rational(b.rare_denominator) * b.rare_denominator);
    for (const auto& [rr_plus, members] : groups) {
        for (const FinitePopulation& s : members) {
            Rational rd_s = s.p1() - s.p0();
            for (const FinitePopulation& t : members) {
                ++st.out.cases_checked;
                Rational gap = rd_s - (t.p1() - t.p0());
                if (gap != t.p0() * s.p1() - s.p0() * t.p1()) {
                    st.fail(s, t, "risk-difference gap does not factor as p0_t*p1_s - p0_s*p1_t");
                    continue;
                }
                if (abs(gap) > bound) {
                    st.fail(s, t, "risk-difference gap exceeds 2r^2");
                }
            }
        }
    }
    return st.out;
}

// ---- mechanism delegation -------------------------------------------------------

// Two populations with the same attribute law but different frailty laws must
// agree, by exact counting, on the parameter the attribute direction fixes
// (g under protective-attribute conditions, j under causing-attribute
// conditions), and that parameter must equal 1 - pr(x).
PropositionCheck check_p7(const OracleBounds&) {
    CheckState st;
    st.out.proposition = Proposition::p7;
    st.out.pass = true;
    const std::vector<mech::Frac> attr = {{1, 10}, {1, 4}, {3, 10}, {1, 2}, {3, 4}};
    const std::vector<mech::Frac> frail_s = {{1, 4}, {1, 2}, {2, 3}};
    const std::vector<mech::Frac> frail_t = {{1, 5}, {1, 2}, {3, 4}};
    st.out.universe = "mechanism rosters over " +
                      std::to_string(2 * attr.size() * frail_s.size() * frail_t.size()) +
                      " condition/law combinations";
    for (mech::XCondition cond : {mech::XCondition::c3, mech::XCondition::c4}) {
        for (const auto& ax : attr) {
            for (const auto& fs : frail_s) {
                for (const auto& ft : frail_t) {
                    mech::MechanismSpec spec;
                    spec.s = {ax, fs, {0, 1}};
                    spec.t = {ax, ft, {0, 1}};
                    spec.conditions = {cond, std::nullopt};
                    auto pop = mech::build_population(spec);
                    auto report = mech::check_conditions(pop, spec.conditions);
                    FinitePopulation marker{ax.num, 0, ax.den, 0};  // encodes the law
                    ++st.out.cases_checked;
                    if (!report.all_pass) {
                        st.fail(marker, marker, "built roster violates its own conditions");
                        continue;
                    }
                    auto equal = cond == mech::XCondition::c3 ? mech::equal_g(pop)
                                                              : mech::equal_j(pop);
                    ++st.out.cases_checked;
                    if (!equal.has_value() || !*equal) {
                        st.fail(marker, marker,
                                "populations with a shared attribute law disagree on the "
                                "attribute-fixed parameter");
                        continue;
                    }
                    Rational expected = 1 - rat(ax.num, ax.den);
                    auto counts = mech::cost_from_mechanism(pop, mech::PopulationId::s).counts;
                    Rational counted =
                        cond == mech::XCondition::c3
                            ? rat(counts.doomed, counts.doomed + counts.preventative)
                            : rat(counts.immune, counts.immune + counts.preventative);
                    ++st.out.cases_checked;
                    if (counted != expected) {
                        st.fail(marker, marker,
                                "attribute-fixed parameter does not equal 1 - pr(x)");
                    }
                }
            }
        }
    }
    return st.out;
}

// ---- collapsibility --------------------------------------------------------------

// Mixing two strata by pooling their individuals: each cost parameter of the
// mixture must equal the event-mass-weighted average of the stratum values.
PropositionCheck check_collapsibility(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::collapsibility;
    st.out.universe = "all two-stratum mixtures with stratum sizes <= " +
                      std::to_string(b.collapse_n_max);
    st.out.pass = true;

    std::vector<FinitePopulation> pops;
    enumerate_populations(b.collapse_n_max,
                          [&](const FinitePopulation& p) { pops.push_back(p); });

    struct ParamView {
        long long FinitePopulation::*num;
        long long (*event)(const FinitePopulation&);
    };
    // numerator type and conditioning-event mass for each of g, h, i, j
    const ParamView views[4] = {
        {&FinitePopulation::doomed,
         [](const FinitePopulation& p) { return p.doomed + p.preventative; }},
        {&FinitePopulation::immune,
         [](const FinitePopulation& p) { return p.immune + p.causal; }},
        {&FinitePopulation::doomed,
         [](const FinitePopulation& p) { return p.doomed + p.causal; }},
        {&FinitePopulation::immune,
         [](const FinitePopulation& p) { return p.immune + p.preventative; }},
    };

    for (std::size_t a = 0; a < pops.size(); ++a) {
        for (std::size_t c = a; c < pops.size(); ++c) {
            const FinitePopulation& A = pops[a];
            const FinitePopulation& B = pops[c];
            FinitePopulation mix{A.doomed + B.doomed, A.causal + B.causal,
                                 A.preventative + B.preventative, A.immune + B.immune};
            for (const ParamView& v : views) {
                ++st.out.cases_checked;
                long long ev_a = v.event(A);
                long long ev_b = v.event(B);
                if (ev_a + ev_b == 0) continue;  // parameter undefined everywhere
                Rational weighted = 0;
                if (ev_a > 0) {
                    weighted += rat(ev_a, ev_a + ev_b) * rat(A.*(v.num), ev_a);
                }
                if (ev_b > 0) {
                    weighted += rat(ev_b, ev_a + ev_b) * rat(B.*(v.num), ev_b);
                }
                if (weighted != rat(mix.*(v.num), ev_a + ev_b)) {
                    st.fail(A, B, "weighted stratum average differs from the marginal parameter");
                }
            }
        }
    }
    return st.out;
}

// ---- symmetries -------------------------------------------------------------------

PropositionCheck check_symmetry(const OracleBounds& b, bool exposure) {
    CheckState st;
    st.out.proposition =
        exposure ? Proposition::symmetry_exposure : Proposition::symmetry_outcome;
    st.out.universe = "all populations of size <= " + std::to_string(b.single_n_max);
    st.out.pass = true;
    enumerate_populations(b.single_n_max, [&](const FinitePopulation& pop) {
        ++st.out.cases_checked;
        bool ok = true;
        if (exposure) {
            // swapping the exposure coding exchanges causal and preventative
            FinitePopulation r{pop.doomed, pop.preventative, pop.causal, pop.immune};
            ok = same_opt(r.g(), pop.i()) && same_opt(r.h(), pop.j()) &&
                 same_opt(r.i(), pop.g()) && same_opt(r.j(), pop.h());
            if (!ok) st.fail(pop, r, "exposure recode fails to exchange (g,h) with (i,j)");
        } else {
            // swapping the outcome coding maps (d,c,p,i) to (i,p,c,d)
            FinitePopulation r{pop.immune, pop.preventative, pop.causal, pop.doomed};
            ok = same_opt(r.g(), pop.h()) && same_opt(r.h(), pop.g()) &&
                 same_opt(r.i(), pop.j()) && same_opt(r.j(), pop.i());
            if (!ok) st.fail(pop, r, "outcome recode fails to swap g<->h and i<->j");
        }
    });
    return st.out;
}

// ---- negative controls --------------------------------------------------------------

// Injecting one causal individual into the target of a valid p2 pair must
// break the transport identity in every single case (the predicted and the
// realized risk then differ by exactly 1/(n+1)).
PropositionCheck check_p2_negative(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p2_negative_control;
    st.out.universe = "p2 pairs (exhaustive stage) with one causal individual "
                      "added to the target";
    st.out.pass = true;
    st.out.expected_pass = false;
    auto groups = group_by_params(b.pair_n_max, [](const FinitePopulation& p) {
        return p.causal == 0 && p.doomed + p.preventative > 0;
    });
    for (const auto& [key, members] : groups) {
        for (const FinitePopulation& s : members) {
            Rational rr_minus = s.p1() / s.p0();
            for (const FinitePopulation& t : members) {
                ++st.out.cases_checked;
                FinitePopulation broken{t.doomed, t.causal + 1, t.preventative, t.immune};
                if (broken.p0() * rr_minus != broken.p1()) {
                    st.fail(s, broken, "transport identity broken as expected");
                }
            }
        }
    }
    return st.out;
}

// Mirror: injecting one preventative individual must break every p5 transport.
PropositionCheck check_p5_negative(const OracleBounds& b) {
    CheckState st;
    st.out.proposition = Proposition::p5_negative_control;
    st.out.universe = "p5 pairs (exhaustive stage) with one preventative individual "
                      "added to the target";
    st.out.pass = true;
    st.out.expected_pass = false;
    auto groups = group_by_params(b.pair_n_max, [](const FinitePopulation& p) {
        return p.preventative == 0 && p.causal + p.immune > 0;
    });
    for (const auto& [key, members] : groups) {
        for (const FinitePopulation& s : members) {
            Rational rr_plus = (1 - s.p1()) / (1 - s.p0());
            for (const FinitePopulation& t : members) {
                ++st.out.cases_checked;
                FinitePopulation broken{t.doomed, t.causal, t.preventative + 1, t.immune};
                if ((1 - broken.p0()) * rr_plus != 1 - broken.p1()) {
                    st.fail(s, broken, "transport identity broken as expected");
                }
            }
        }
    }
    return st.out;
}

// ---- frozen goldens ------------------------------------------------------------------

// Every fixed numeric value asserted by the unit tests, recomputed here in
// exact arithmetic and compared against the frozen decimal at 1e-12.
PropositionCheck check_worked_examples(const OracleBounds&) {
    CheckState st;
    st.out.proposition = Proposition::worked_examples;
    st.out.universe = "frozen numeric goldens used by the test suite";
    st.out.pass = true;

    struct Golden {
        const char* what;
        Rational exact;
        double frozen;
    };

    // distribution (0.10, 0.05, 0.02, 0.83), as counts per 100
    FinitePopulation base{10, 5, 2, 83};
    // table of risks (0.02, 0.03) measured on both scales, per 100
    FinitePopulation tbl{2, 1, 0, 97};  // p0 = 2/100, p1 = 3/100
    Rational t0 = rat(1, 10);
    Rational rr_plus_tbl = (1 - tbl.p1()) / (1 - tbl.p0());
    Rational odds_ratio_tbl =
        (tbl.p1() / (1 - tbl.p1())) / (tbl.p0() / (1 - tbl.p0()));
    Rational odds_pred = odds_ratio_tbl * (t0 / (1 - t0));

    // strongly non-monotone intervention: g=.05, h=.99, s0=.005, t0=.05
    Rational g2 = rat(1, 20), h2 = rat(99, 100), s0 = rat(1, 200), t02 = rat(1, 20);
    Rational f2 = t02 / s0;
    Rational naive2 = f2 * (s0 * g2 + (1 - s0) * (1 - h2));
    Rational true2 = t02 * g2 + (1 - t02) * (1 - h2);

    // two equal-prevalence strata mixed: (10,5,2,83) + (30,10,5,55) per 100 each
    FinitePopulation strat_b{30, 10, 5, 55};
    FinitePopulation mixture{40, 15, 7, 138};  // per 200

    // rare-outcome grid point: study risks (.001, .002), target baseline .005
    Rational rs0 = rat(1, 1000), rs1 = rat(2, 1000), rt0 = rat(5, 1000);
    Rational rr_plus_rare = (1 - rs1) / (1 - rs0);
    Rational rt1 = 1 - (1 - rt0) * rr_plus_rare;
    Rational rd_gap = (rs1 - rs0) - (rt1 - rt0);

    // same construction far from rarity: (.2, .4) onto baseline .5
    Rational ns0 = rat(1, 5), ns1 = rat(2, 5), nt0 = rat(1, 2);
    Rational nt1 = 1 - (1 - nt0) * ((1 - ns1) / (1 - ns0));

    const Golden goldens[] = {
        {"baseline risk of the four-type example", base.p0(), 0.12},
        {"treated risk of the four-type example", base.p1(), 0.15},
        {"g of the four-type example", *base.g(), 10.0 / 12.0},
        {"h of the four-type example", *base.h(), 83.0 / 88.0},
        {"i of the four-type example", *base.i(), 10.0 / 15.0},
        {"j of the four-type example", *base.j(), 83.0 / 85.0},
        {"risk difference at risks (.02,.03)", tbl.p1() - tbl.p0(), 0.01},
        {"risk ratio at risks (.02,.03)", tbl.p1() / tbl.p0(), 1.5},
        {"survivor ratio at risks (.02,.03)", rr_plus_tbl, 0.98979591836734693},
        {"odds ratio at risks (.02,.03)", odds_ratio_tbl, 1.5154639175257734},
        {"risk-ratio prediction at baseline .10", t0 * rat(3, 2), 0.15},
        {"survivor-ratio prediction at baseline .10", 1 - (1 - t0) * rr_plus_tbl,
         0.10918367346938776},
        {"risk-difference prediction at baseline .10", t0 + rat(1, 100), 0.11},
        {"odds-ratio prediction at baseline .10", odds_pred / (1 + odds_pred),
         0.14411764705882353},
        {"identified g from risks (.10,.05)", rat(5, 100) / rat(10, 100), 0.5},
        {"identified j from risks (.10,.05)", rat(90, 100) / rat(95, 100),
         0.9473684210526315},
        {"identified h from risks (.10,.55)", rat(45, 100) / rat(90, 100), 0.5},
        {"identified i from risks (.10,.55)", rat(10, 100) / rat(55, 100),
         0.18181818181818182},
        {"identified g from risks (.05,.012)", rat(12, 1000) / rat(5, 100), 0.24},
        {"naive carried-over risk (g=.05,h=.99,s0=.005,t0=.05)", naive2, 0.102},
        {"true target risk (g=.05,h=.99,t0=.05)", true2, 0.012},
        {"carry-over bias (g=.05,h=.99,s0=.005,t0=.05)", naive2 - true2, 0.09},
        {"study risk ratio (g=.05,h=.99,s0=.005)", naive2 / t02, 2.04},
        {"target risk ratio (g=.05,h=.99,t0=.05)", true2 / t02, 0.24},
        {"near-monotonicity margin (g=.05,h=.99,t0=.05)",
         g2 * t02 - (1 - h2) * (1 - t02), -0.007},
        {"marginal g of the two-stratum mixture", *mixture.g(), 0.2 / 0.235},
        {"marginal h of the two-stratum mixture", *mixture.h(), 0.69 / 0.765},
        {"marginal i of the two-stratum mixture", *mixture.i(), 0.2 / 0.275},
        {"marginal j of the two-stratum mixture", *mixture.j(), 0.69 / 0.725},
        {"first stratum g-weight of the mixture", rat(12, 12 + 35), 0.06 / 0.235},
        {"second stratum g-weight of the mixture", rat(35, 12 + 35), 0.175 / 0.235},
        {"g of the second stratum", *strat_b.g(), 0.3 / 0.35},
        {"transported rare-outcome risk at baseline .005", rt1, 0.005995995995995996},
        {"risk-difference gap at the rare grid point", rd_gap, 4.004004004004004e-06},
        {"transported non-rare risk at baseline .5", nt1, 0.625},
        {"risk-difference gap far from rarity", (ns1 - ns0) - (nt1 - nt0), 0.075},
        {"pooled risk ratio of the two-study example", rat(30, 300) / rat(15, 300), 2.0},
    };

    for (const Golden& gd : goldens) {
        ++st.out.cases_checked;
        double delta = gd.exact.convert_to<double>() - gd.frozen;
        if (delta < -1e-12 || delta > 1e-12) {
            FinitePopulation none{};
            st.fail(none, none, std::string("frozen golden drifted: ") + gd.what);
        }
    }

    // exact identities behind the frozen values
    ++st.out.cases_checked;
    if (naive2 - true2 != rat(9, 100)) {
        FinitePopulation none{};
        st.fail(none, none, "carry-over bias is not exactly 9/100");
    }
    ++st.out.cases_checked;
    if (naive2 - true2 != (f2 - 1) * (1 - h2)) {
        FinitePopulation none{};
        st.fail(none, none, "carry-over bias does not factor as (f-1)(1-h)");
    }
    ++st.out.cases_checked;
    if (rd_gap != rat(1, 249750)) {
        FinitePopulation none{};
        st.fail(none, none, "rare-grid gap is not exactly 1/249750");
    }
    return st.out;
}

}  // namespace

PropositionCheck verify(Proposition prop, const OracleBounds& bounds) {
    switch (prop) {
        case Proposition::p1: return check_p1(bounds);
        case Proposition::p2: return check_p2(bounds);
        case Proposition::p3: return check_bias(bounds, false);
        case Proposition::p4: return check_p4(bounds);
        case Proposition::p5: return check_p5(bounds);
        case Proposition::p6: return check_bias(bounds, true);
        case Proposition::p7: return check_p7(bounds);
        case Proposition::p8: return check_p8(bounds);
        case Proposition::collapsibility: return check_collapsibility(bounds);
        case Proposition::symmetry_outcome: return check_symmetry(bounds, false);
        case Proposition::symmetry_exposure: return check_symmetry(bounds, true);
        case Proposition::p2_negative_control: return check_p2_negative(bounds);
        case Proposition::p5_negative_control: return check_p5_negative(bounds);
        case Proposition::worked_examples: return check_worked_examples(bounds);
    }
    throw std::invalid_argument("verify: unknown proposition");
}

std::vector<PropositionCheck> verify_all(const OracleBounds& bounds) {
    std::vector<PropositionCheck> out;
    for (Proposition p : all_propositions()) {
        out.push_back(verify(p, bounds));
    }
    return out;
}

}  // namespace cost::oracle
