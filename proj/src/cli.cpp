#include "cost/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cost/io.hpp"
#include "cost/measures.hpp"
#include "cost/mechanism.hpp"
#include "cost/meta.hpp"
#include "cost/oracle.hpp"
#include "cost/params.hpp"
#include "cost/transport.hpp"

namespace cost::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json jnum(double v) { return io::round12(v); }

ordered_json jopt(const std::optional<double>& v) {
    if (!v) return nullptr;
    return io::round12(*v);
}

std::string cnum(double v) { return io::format_g12(v); }

std::string copt(const std::optional<double>& v) { return v ? io::format_g12(*v) : ""; }

std::string cbool(bool b) { return b ? "true" : "false"; }

// csv cells in key,value dumps must not contain the delimiter
std::string desemicolon(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string format = "json";
    std::uint64_t seed = 0;
    int exit_code = 0;

    bool json() const { return format == "json"; }

    void emit(const ordered_json& doc) { out << doc.dump(2) << "\n"; }

    void csv_header(const std::string& columns) {
        out << "# seed=" << seed << "\n" << columns << "\n";
    }
};

// two-column dump of a nested document; arrays get [index] path segments
void flatten(const ordered_json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& item : j.items())
            flatten(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
    } else if (j.is_array()) {
        std::size_t idx = 0;
        for (const auto& v : j) flatten(v, prefix + "[" + std::to_string(idx++) + "]", out);
    } else {
        std::string value = j.is_string() ? j.get<std::string>() : j.dump();
        out << prefix << "," << desemicolon(value) << "\n";
    }
}

void emit_flat(Context& ctx, const ordered_json& doc) {
    if (ctx.json()) {
        ctx.emit(doc);
    } else {
        ctx.csv_header("key,value");
        flatten(doc, "", ctx.out);
    }
}

// ---- measures ---------------------------------------------------------------

void run_measures(Context& ctx, const std::string& input) {
    auto pops = io::read_population_file(input);
    if (ctx.json()) {
        ordered_json doc;
        doc["command"] = "measures";
        doc["seed"] = ctx.seed;
        auto rows = ordered_json::array();
        for (const auto& p : pops) {
            EffectSummary m = measures_from_risks(p.risks);
            ordered_json row;
            row["population"] = p.id;
            row["p0"] = jnum(p.risks.p0);
            row["p1"] = jnum(p.risks.p1);
            row["rd"] = jnum(m.rd);
            row["rr_minus"] = jopt(m.rr_minus);
            row["rr_plus"] = jopt(m.rr_plus);
            row["odds_ratio"] = jopt(m.odds_ratio);
            rows.push_back(row);
        }
        doc["populations"] = rows;
        ctx.emit(doc);
    } else {
        // header starts population,p0,p1 so the file re-ingests as a risks csv
        ctx.csv_header("population,p0,p1,rd,rr_minus,rr_plus,odds_ratio");
        for (const auto& p : pops) {
            EffectSummary m = measures_from_risks(p.risks);
            ctx.out << p.id << "," << cnum(p.risks.p0) << "," << cnum(p.risks.p1) << ","
                    << cnum(m.rd) << "," << copt(m.rr_minus) << "," << copt(m.rr_plus) << ","
                    << copt(m.odds_ratio) << "\n";
        }
    }
}

// ---- transport --------------------------------------------------------------

struct TransportArgs {
    std::string input;
    std::optional<double> p0, p1;
    std::optional<double> g, h, i, j;
    std::optional<double> t0, t1, s0;
    std::string assume = "auto";
    std::string family = "introduce";
    bool compare = false;
    double near_threshold = 10.0;
};

Monotonicity resolve_direction(const std::string& assume, const RiskPair& risks) {
    if (assume == "auto")
        return risks.p1 >= risks.p0 ? Monotonicity::non_decreasing : Monotonicity::non_increasing;
    return *monotonicity_from_string(assume);  // spelling pre-validated by the option check
}

// rr(-) stands in for g only while g*t0 dominates (1-h)*(1-t0)
void warn_near_mono(Context& ctx, double g, double h, double t0, double threshold) {
    double den = (1.0 - h) * (1.0 - t0);
    if (den <= 0.0) return;
    double ratio = g * t0 / den;
    if (ratio < threshold)
        ctx.err << "warning: g*t0 = " << cnum(g * t0) << " against (1-h)*(1-t0) = " << cnum(den)
                << " (ratio " << cnum(ratio) << " < " << cnum(threshold)
                << "): risk-ratio transport is fragile at this baseline\n";
}

void run_transport_bias(Context& ctx, const TransportArgs& a) {
    if (!(a.g && a.h && a.t0))
        throw io::UsageError("bias mode (--s0) requires --g, --h and --t0");
    BiasReport rep = bias_under_nonmonotonicity(*a.g, *a.h, *a.s0, *a.t0);
    warn_near_mono(ctx, *a.g, *a.h, *a.t0, a.near_threshold);
    ordered_json doc;
    doc["command"] = "transport";
    doc["mode"] = "bias";
    doc["seed"] = ctx.seed;
    doc["g"] = jnum(rep.g);
    doc["h"] = jnum(rep.h);
    doc["s0"] = jnum(rep.s0);
    doc["t0"] = jnum(rep.t0);
    doc["f"] = jnum(rep.f);
    doc["rr_study"] = jnum(rep.rr_study);
    doc["rr_target"] = jopt(rep.rr_target);
    doc["naive_prediction"] = jnum(rep.naive_prediction);
    doc["true_risk"] = jnum(rep.true_risk);
    doc["bias"] = jnum(rep.bias);
    emit_flat(ctx, doc);
}

void run_transport_compare(Context& ctx, const TransportArgs& a,
                           const std::optional<RiskPair>& risks) {
    if (!risks)
        throw io::UsageError("compare mode needs source risks: --p0/--p1 or an input file");
    if (!a.t0) throw io::UsageError("compare mode requires --t0");
    Monotonicity dir = resolve_direction(a.assume, *risks);
    auto rows = compare_predictions(*risks, *a.t0, dir);
    if (ctx.json()) {
        ordered_json doc;
        doc["command"] = "transport";
        doc["mode"] = "compare";
        doc["seed"] = ctx.seed;
        doc["p0"] = jnum(risks->p0);
        doc["p1"] = jnum(risks->p1);
        doc["t0"] = jnum(*a.t0);
        doc["assumption"] = to_string(dir);
        auto arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["measure"] = r.measure;
            row["predicted"] = jopt(r.predicted);
            row["unclamped"] = jopt(r.unclamped);
            row["clamped"] = r.clamped;
            row["degenerate"] = r.degenerate;
            arr.push_back(row);
        }
        doc["rows"] = arr;
        ctx.emit(doc);
    } else {
        ctx.csv_header("measure,predicted,unclamped,clamped,degenerate");
        for (const auto& r : rows)
            ctx.out << r.measure << "," << copt(r.predicted) << "," << copt(r.unclamped) << ","
                    << cbool(r.clamped) << "," << cbool(r.degenerate) << "\n";
    }
}

void run_transport_predict(Context& ctx, const TransportArgs& a,
                           const std::optional<RiskPair>& risks) {
    TransportResult res;
    std::optional<double> used_g, used_h, used_i, used_j;
    if (a.family == "introduce") {
        if (!a.t0) throw io::UsageError("introduce-family prediction requires --t0");
        if (a.g || a.h) {
            if (!(a.g && a.h)) throw io::UsageError("direct parameters need both --g and --h");
            res = predict_introduce(CostIntroduce{a.g, a.h}, *a.t0);
            used_g = a.g;
            used_h = a.h;
        } else {
            if (!risks)
                throw io::UsageError(
                    "prediction needs --g/--h, or source risks (--p0/--p1 or an input file)");
            Monotonicity dir = resolve_direction(a.assume, *risks);
            res = transport_rr(*risks, *a.t0, dir);
            if (dir == Monotonicity::non_increasing) {
                used_g = identify_g_under_decrease(*risks);
                used_h = 1.0;
            } else {
                used_g = 1.0;
                used_h = identify_h_under_increase(*risks);
            }
        }
        warn_near_mono(ctx, *used_g, *used_h, *a.t0, a.near_threshold);
    } else {  // remove
        if (!a.t1) throw io::UsageError("remove-family prediction requires --t1");
        if (a.i || a.j) {
            if (!(a.i && a.j)) throw io::UsageError("direct parameters need both --i and --j");
            res = predict_remove(CostRemove{a.i, a.j}, *a.t1);
            used_i = a.i;
            used_j = a.j;
        } else {
            if (!risks)
                throw io::UsageError(
                    "prediction needs --i/--j, or source risks (--p0/--p1 or an input file)");
            Monotonicity dir = resolve_direction(a.assume, *risks);
            if (dir == Monotonicity::non_increasing) {
                used_i = 1.0;
                used_j = identify_j_under_decrease(*risks);
            } else {
                used_i = identify_i_under_increase(*risks);
                used_j = 1.0;
            }
            res = predict_remove(CostRemove{used_i, used_j}, *a.t1);
            res.assumption = dir;
            res.parameter_used = dir == Monotonicity::non_increasing ? CostParameter::j
                                                                     : CostParameter::i;
        }
    }
    ordered_json doc;
    doc["command"] = "transport";
    doc["mode"] = "predict";
    doc["seed"] = ctx.seed;
    doc["family"] = a.family;
    doc["assumption"] = to_string(res.assumption);
    doc["parameter_used"] = to_string(res.parameter_used);
    doc["p0"] = risks ? jnum(risks->p0) : ordered_json(nullptr);
    doc["p1"] = risks ? jnum(risks->p1) : ordered_json(nullptr);
    doc["g"] = jopt(used_g);
    doc["h"] = jopt(used_h);
    doc["i"] = jopt(used_i);
    doc["j"] = jopt(used_j);
    doc["t0"] = jopt(a.t0);
    doc["t1"] = jopt(a.t1);
    doc["predicted_risk"] = jnum(res.predicted_risk);
    doc["near_monotonicity_margin"] = jnum(res.near_monotonicity_margin);
    emit_flat(ctx, doc);
}

void run_transport(Context& ctx, const TransportArgs& a) {
    std::optional<RiskPair> risks;
    if (a.p0 || a.p1) {
        if (!(a.p0 && a.p1)) throw io::UsageError("--p0 and --p1 must be given together");
        risks = RiskPair{*a.p0, *a.p1};
        require_valid(*risks);
    } else if (!a.input.empty()) {
        risks = io::read_population_file(a.input).front().risks;
    }
    if (a.s0)
        run_transport_bias(ctx, a);
    else if (a.compare)
        run_transport_compare(ctx, a, risks);
    else
        run_transport_predict(ctx, a, risks);
}

// ---- bias-surface -----------------------------------------------------------

struct SurfaceArgs {
    double g = 0.05;
    std::vector<double> h_grid{0.9, 0.95, 0.99, 0.999};
    std::vector<double> f_grid{0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
};

void run_surface(Context& ctx, const SurfaceArgs& a) {
    auto rows = bias_surface(a.g, a.h_grid, a.f_grid);
    if (ctx.json()) {
        ordered_json doc;
        doc["command"] = "bias-surface";
        doc["seed"] = ctx.seed;
        doc["g"] = jnum(a.g);
        auto arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["h"] = jnum(r.h);
            row["f"] = jnum(r.f);
            row["s0"] = jnum(r.s0);
            row["t0"] = jnum(r.t0);
            row["rr_study"] = jnum(r.rr_study);
            row["rr_target"] = jopt(r.rr_target);
            row["naive_prediction"] = jnum(r.naive_prediction);
            row["true_risk"] = jnum(r.true_risk);
            row["bias"] = jnum(r.bias);
            arr.push_back(row);
        }
        doc["rows"] = arr;
        ctx.emit(doc);
    } else {
        ctx.csv_header("g,h,f,s0,t0,rr_study,rr_target,naive_prediction,true_risk,bias");
        for (const auto& r : rows)
            ctx.out << cnum(r.g) << "," << cnum(r.h) << "," << cnum(r.f) << "," << cnum(r.s0)
                    << "," << cnum(r.t0) << "," << cnum(r.rr_study) << "," << copt(r.rr_target)
                    << "," << cnum(r.naive_prediction) << "," << cnum(r.true_risk) << ","
                    << cnum(r.bias) << "\n";
    }
}

// ---- mechanism-sim ----------------------------------------------------------

struct MechArgs {
    int x_condition = 3;
    std::optional<int> z_condition;
    std::string joint_cell = "forces_one";
    std::string pr_x = "3/10";
    std::string pr_x_t;  // empty: same attribute frequency in both populations
    std::string pr_frailty_s = "1/2";
    std::string pr_frailty_t = "1/4";
    std::string pr_z_s = "1/5";
    std::string pr_z_t = "1/5";
    std::string mode = "exhaustive";
    std::size_t samples = 10000;
};

ordered_json frac_json(const mech::Frac& f) {
    return std::to_string(f.num) + "/" + std::to_string(f.den);
}

ordered_json population_json(const mech::MechanismPopulation& pop, mech::PopulationId id) {
    mech::MechanismParams p = mech::cost_from_mechanism(pop, id);
    ordered_json doc;
    doc["size"] = static_cast<long long>(pop.size_of(id));
    ordered_json counts;
    counts["doomed"] = p.counts.doomed;
    counts["causal"] = p.counts.causal;
    counts["preventative"] = p.counts.preventative;
    counts["immune"] = p.counts.immune;
    doc["counts"] = counts;
    ordered_json dist;
    dist["doomed"] = jnum(p.distribution.doomed);
    dist["causal"] = jnum(p.distribution.causal);
    dist["preventative"] = jnum(p.distribution.preventative);
    dist["immune"] = jnum(p.distribution.immune);
    doc["distribution"] = dist;
    doc["g"] = jopt(p.introduce.g);
    doc["h"] = jopt(p.introduce.h);
    doc["i"] = jopt(p.remove.i);
    doc["j"] = jopt(p.remove.j);
    return doc;
}

ordered_json opt_bool(const std::optional<bool>& v) {
    if (!v) return nullptr;
    return *v;
}

void run_mechanism(Context& ctx, const MechArgs& a) {
    mech::MechanismSpec spec;
    spec.conditions.x = a.x_condition == 3 ? mech::XCondition::c3 : mech::XCondition::c4;
    if (a.z_condition)
        spec.conditions.z = *a.z_condition == 5 ? mech::ZCondition::c5 : mech::ZCondition::c6;
    if (!spec.conditions.coherent())
        throw io::UsageError("incoherent pairing: condition 3 pairs with 5, condition 4 with 6");
    auto cell = mech::cell_effect_from_string(a.joint_cell);
    if (!cell)
        throw io::UsageError("unknown joint cell '" + a.joint_cell +
                             "' (expected no_effect, forces_zero or forces_one)");
    spec.joint_cell = *cell;
    spec.s.pr_x = mech::parse_frac(a.pr_x);
    spec.t.pr_x = mech::parse_frac(a.pr_x_t.empty() ? a.pr_x : a.pr_x_t);
    spec.s.pr_frailty = mech::parse_frac(a.pr_frailty_s);
    spec.t.pr_frailty = mech::parse_frac(a.pr_frailty_t);
    spec.s.pr_z = mech::parse_frac(a.pr_z_s);
    spec.t.pr_z = mech::parse_frac(a.pr_z_t);
    spec.mode = a.mode == "exhaustive" ? mech::BuildMode::exhaustive : mech::BuildMode::monte_carlo;
    spec.seed = ctx.seed;
    spec.sample_size = a.samples;

    mech::MechanismPopulation pop = mech::build_population(spec);
    mech::ConditionReport report = mech::check_conditions(pop, spec.conditions, spec.joint_cell);

    ordered_json doc;
    doc["command"] = "mechanism-sim";
    doc["seed"] = ctx.seed;
    ordered_json sj;
    sj["x_condition"] = a.x_condition;
    sj["z_condition"] = a.z_condition ? ordered_json(*a.z_condition) : ordered_json(nullptr);
    sj["joint_cell"] = mech::to_string(spec.joint_cell);
    sj["mode"] = a.mode;
    if (spec.mode == mech::BuildMode::monte_carlo)
        sj["samples"] = static_cast<long long>(a.samples);
    ordered_json law_s, law_t;
    law_s["pr_x"] = frac_json(spec.s.pr_x);
    law_s["pr_frailty"] = frac_json(spec.s.pr_frailty);
    law_s["pr_z"] = frac_json(spec.s.pr_z);
    law_t["pr_x"] = frac_json(spec.t.pr_x);
    law_t["pr_frailty"] = frac_json(spec.t.pr_frailty);
    law_t["pr_z"] = frac_json(spec.t.pr_z);
    sj["s"] = law_s;
    sj["t"] = law_t;
    doc["spec"] = sj;
    ordered_json pops;
    pops["s"] = population_json(pop, mech::PopulationId::s);
    pops["t"] = population_json(pop, mech::PopulationId::t);
    doc["populations"] = pops;
    ordered_json eq;
    eq["g"] = opt_bool(mech::equal_g(pop));
    eq["h"] = opt_bool(mech::equal_h(pop));
    eq["i"] = opt_bool(mech::equal_i(pop));
    eq["j"] = opt_bool(mech::equal_j(pop));
    doc["equal"] = eq;
    ordered_json cj;
    cj["all_pass"] = report.all_pass;
    auto checks = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json row;
        row["id"] = c.id;
        row["pass"] = c.pass;
        row["detail"] = c.detail;
        row["counterexamples"] = c.counterexamples.size();
        checks.push_back(row);
    }
    cj["checks"] = checks;
    doc["conditions"] = cj;
    if (a.x_condition == 3) {
        // declared effect of each (x,z) cell under the 3(/5) mechanism
        mech::CellMap cells{};
        cells[0] = mech::CellEffect::no_effect;
        cells[1] = mech::CellEffect::forces_zero;
        cells[2] = spec.conditions.z ? mech::CellEffect::forces_one : mech::CellEffect::no_effect;
        cells[3] = spec.conditions.z ? spec.joint_cell : mech::CellEffect::forces_zero;
        mech::UStrataReport u = mech::assign_u_strata(pop, mech::PopulationId::s, cells);
        ordered_json uj;
        uj["counts"] = {u.counts[0], u.counts[1], u.counts[2]};
        uj["population_size"] = u.population_size;
        uj["pr_u0"] = jnum(u.pr_u0);
        uj["pr_u1"] = jnum(u.pr_u1);
        uj["pr_u2"] = jnum(u.pr_u2);
        uj["g_complement_of_u1"] = opt_bool(u.g_complement_of_u1);
        uj["h_complement_of_u2"] = opt_bool(u.h_complement_of_u2);
        uj["g_direct_u1"] = opt_bool(u.g_direct_u1);
        uj["h_direct_u2"] = opt_bool(u.h_direct_u2);
        doc["u_strata"] = uj;
    } else {
        doc["u_strata"] = nullptr;
    }
    emit_flat(ctx, doc);
}

// ---- meta -------------------------------------------------------------------

struct MetaArgs {
    std::string input;
    std::optional<double> pooled_rd, pooled_rr_minus, pooled_rr_plus;
};

void run_meta(Context& ctx, const MetaArgs& a) {
    auto pops = io::read_population_file(a.input);
    std::vector<meta::StudyRecord> studies;
    studies.reserve(pops.size());
    for (const auto& p : pops) {
        if (!p.counts)
            throw io::DataError("meta requires the counts schema (population,arm,events,total)");
        studies.push_back(*p.counts);
    }

    meta::StudyRecord pooled = meta::pooled_counts(studies);
    EffectSummary pooled_measures = measures_from_risks(pooled.risks());

    auto override_for = [&](meta::Scale sc) -> std::optional<double> {
        switch (sc) {
            case meta::Scale::rd: return a.pooled_rd;
            case meta::Scale::rr_minus: return a.pooled_rr_minus;
            case meta::Scale::rr_plus: return a.pooled_rr_plus;
        }
        return std::nullopt;
    };

    std::vector<meta::ScaleDeviations> deviations;
    std::vector<meta::StudySwitch> switched;
    for (meta::Scale sc : meta::all_scales()) {
        std::optional<double> value = override_for(sc);
        if (!value) value = meta::study_estimate(pooled, sc);
        if (!value) continue;  // pooled measure degenerate on this scale, nothing to compare
        deviations.push_back(meta::scale_deviations(studies, sc, *value));
        for (const auto& st : studies)
            switched.push_back({st.id, sc, meta::switched_proportion(st, *value, sc)});
    }

    if (ctx.json()) {
        ordered_json doc;
        doc["command"] = "meta";
        doc["seed"] = ctx.seed;
        ordered_json pj;
        pj["id"] = pooled.id;
        pj["treated"] = {{"events", pooled.treated.events}, {"total", pooled.treated.total}};
        pj["control"] = {{"events", pooled.control.events}, {"total", pooled.control.total}};
        RiskPair pr = pooled.risks();
        pj["p0"] = jnum(pr.p0);
        pj["p1"] = jnum(pr.p1);
        pj["rd"] = jnum(pooled_measures.rd);
        pj["rr_minus"] = jopt(pooled_measures.rr_minus);
        pj["rr_plus"] = jopt(pooled_measures.rr_plus);
        pj["odds_ratio"] = jopt(pooled_measures.odds_ratio);
        doc["pooled"] = pj;
        auto scales = ordered_json::array();
        for (const auto& d : deviations) {
            ordered_json sj;
            sj["scale"] = meta::to_string(d.scale);
            sj["pooled"] = jnum(d.pooled);
            sj["compressed"] = d.compressed;
            sj["max_abs_deviation"] = jnum(d.max_abs_deviation);
            sj["mean_abs_deviation"] = jnum(d.mean_abs_deviation);
            auto rows = ordered_json::array();
            for (const auto& s : d.studies) {
                ordered_json row;
                row["id"] = s.id;
                row["estimate"] = jopt(s.estimate);
                row["deviation"] = jopt(s.deviation);
                row["degenerate"] = s.degenerate();
                rows.push_back(row);
            }
            sj["studies"] = rows;
            scales.push_back(sj);
        }
        doc["scales"] = scales;
        auto sw = ordered_json::array();
        for (const auto& s : switched) {
            ordered_json row;
            row["study"] = s.id;
            row["scale"] = meta::to_string(s.scale);
            row["attainable"] = s.result.attainable;
            row["flips"] = s.result.flips;
            row["proportion"] = jnum(s.result.proportion);
            row["treated_delta"] = s.result.treated_delta;
            row["control_delta"] = s.result.control_delta;
            row["achieved"] = jopt(s.result.achieved);
            sw.push_back(row);
        }
        doc["switched"] = sw;
        ctx.emit(doc);
    } else {
        ctx.out << "# pooled treated " << pooled.treated.events << "/" << pooled.treated.total
                << " control " << pooled.control.events << "/" << pooled.control.total << "\n";
        ctx.csv_header(
            "scale,study,estimate,pooled,deviation,degenerate,compressed,"
            "attainable,flips,proportion,treated_delta,control_delta,achieved");
        std::size_t k = 0;
        for (const auto& d : deviations) {
            for (const auto& s : d.studies) {
                const meta::SwitchResult& r = switched[k++].result;
                ctx.out << meta::to_string(d.scale) << "," << s.id << "," << copt(s.estimate)
                        << "," << cnum(d.pooled) << "," << copt(s.deviation) << ","
                        << cbool(s.degenerate()) << "," << cbool(d.compressed) << ","
                        << cbool(r.attainable) << "," << r.flips << "," << cnum(r.proportion)
                        << "," << r.treated_delta << "," << r.control_delta << ","
                        << copt(r.achieved) << "\n";
            }
        }
    }
}

// ---- oracle-verify ----------------------------------------------------------

struct OracleArgs {
    oracle::OracleBounds bounds;
    std::vector<std::string> propositions;
};

ordered_json population_counts_json(const oracle::FinitePopulation& p) {
    ordered_json doc;
    doc["doomed"] = p.doomed;
    doc["causal"] = p.causal;
    doc["preventative"] = p.preventative;
    doc["immune"] = p.immune;
    return doc;
}

void run_oracle(Context& ctx, const OracleArgs& a) {
    std::vector<oracle::Proposition> props;
    if (a.propositions.empty()) {
        props = oracle::all_propositions();
    } else {
        for (const auto& name : a.propositions) {
            auto p = oracle::proposition_from_string(name);
            if (!p) throw io::UsageError("unknown proposition '" + name + "'");
            props.push_back(*p);
        }
    }
    oracle::OracleBounds bounds = a.bounds;
    bounds.seed = ctx.seed;

    std::vector<oracle::PropositionCheck> checks;
    checks.reserve(props.size());
    bool all_ok = true;
    for (auto p : props) {
        checks.push_back(oracle::verify(p, bounds));
        all_ok = all_ok && checks.back().as_expected();
    }
    ctx.exit_code = all_ok ? 0 : 3;

    if (ctx.json()) {
        ordered_json doc;
        doc["command"] = "oracle-verify";
        doc["seed"] = ctx.seed;
        ordered_json bj;
        bj["single_n_max"] = bounds.single_n_max;
        bj["pair_n_max"] = bounds.pair_n_max;
        bj["collapse_n_max"] = bounds.collapse_n_max;
        bj["rare_denominator"] = bounds.rare_denominator;
        bj["sampled_pair_n_max"] = bounds.sampled_pair_n_max;
        bj["samples_per_size"] = bounds.samples_per_size;
        doc["bounds"] = bj;
        doc["all_as_expected"] = all_ok;
        auto arr = ordered_json::array();
        for (const auto& c : checks) {
            ordered_json row;
            row["proposition"] = oracle::to_string(c.proposition);
            row["universe"] = c.universe;
            row["cases_checked"] = c.cases_checked;
            row["pass"] = c.pass;
            row["expected_pass"] = c.expected_pass;
            row["as_expected"] = c.as_expected();
            if (c.witness) {
                ordered_json w;
                w["study"] = population_counts_json(c.witness->study);
                w["target"] = population_counts_json(c.witness->target);
                w["note"] = c.witness->note;
                row["witness"] = w;
            } else {
                row["witness"] = nullptr;
            }
            arr.push_back(row);
        }
        doc["checks"] = arr;
        ctx.emit(doc);
    } else {
        ctx.csv_header(
            "proposition,universe,cases_checked,pass,expected_pass,as_expected,witness_note");
        for (const auto& c : checks)
            ctx.out << oracle::to_string(c.proposition) << "," << desemicolon(c.universe) << ","
                    << c.cases_checked << "," << cbool(c.pass) << "," << cbool(c.expected_pass)
                    << "," << cbool(c.as_expected()) << ","
                    << (c.witness ? desemicolon(c.witness->note) : std::string()) << "\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};

    CLI::App app{"counterfactual outcome state transition toolkit"};
    app.name("cost");
    app.require_subcommand(1);
    app.set_config("--config")->envname("COST_CONFIG");
    app.add_option("--format", ctx.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--seed", ctx.seed, "rng seed, recorded in every output")
        ->capture_default_str();

    std::string measures_input;
    auto* measures = app.add_subcommand("measures", "effect measures for each population");
    measures->fallthrough();
    measures->add_option("input", measures_input, "csv of risks or arm counts")->required();
    measures->callback([&] { run_measures(ctx, measures_input); });

    TransportArgs ta;
    auto* transport =
        app.add_subcommand("transport", "carry an effect to a new baseline, or quantify the "
                                        "bias of doing so naively");
    transport->fallthrough();
    // free the default -h short flag: h is a transport parameter here
    transport->set_help_flag("--help", "print this help message and exit");
    transport->add_option("input", ta.input, "csv; first population supplies source risks");
    transport->add_option("--p0", ta.p0, "source baseline risk");
    transport->add_option("--p1", ta.p1, "source treated risk");
    transport->add_option("--g", ta.g, "introduce parameter g");
    transport->add_option("--h", ta.h, "introduce parameter h");
    transport->add_option("--i", ta.i, "remove parameter i");
    transport->add_option("--j", ta.j, "remove parameter j");
    transport->add_option("--t0", ta.t0, "target baseline risk");
    transport->add_option("--t1", ta.t1, "target treated risk (remove family)");
    transport->add_option("--s0", ta.s0, "study baseline risk; selects bias mode");
    transport->add_option("--assume", ta.assume, "monotonicity direction")
        ->check(CLI::IsMember({"auto", "non-increasing", "non-decreasing"}))
        ->capture_default_str();
    transport->add_option("--family", ta.family, "parameter family")
        ->check(CLI::IsMember({"introduce", "remove"}))
        ->capture_default_str();
    transport->add_flag("--compare", ta.compare, "transport every scale side by side");
    transport
        ->add_option("--near-mono-threshold", ta.near_threshold,
                     "warn when g*t0 / ((1-h)*(1-t0)) falls below this")
        ->capture_default_str();
    transport->callback([&] { run_transport(ctx, ta); });

    SurfaceArgs sa;
    auto* surface = app.add_subcommand("bias-surface", "bias of naive risk-ratio transport over "
                                                       "an (h, f) grid");
    surface->fallthrough();
    surface->add_option("--g", sa.g, "introduce parameter g")->capture_default_str();
    surface->add_option("--h-grid", sa.h_grid, "grid of h values");
    surface->add_option("--f-grid", sa.f_grid, "grid of baseline ratios f = t0/s0");
    surface->callback([&] { run_surface(ctx, sa); });

    MechArgs ma;
    auto* mechanism = app.add_subcommand(
        "mechanism-sim", "build populations from a shared biological mechanism and check "
                         "which transport parameters it pins");
    mechanism->fallthrough();
    mechanism->add_option("--x-condition", ma.x_condition, "attribute law: 3 or 4")
        ->check(CLI::IsMember({3, 4}))
        ->capture_default_str();
    mechanism->add_option("--z-condition", ma.z_condition, "optional second attribute law: 5 or 6")
        ->check(CLI::IsMember({5, 6}));
    mechanism->add_option("--joint-cell", ma.joint_cell, "effect of the (x=1,z=1) cell")
        ->capture_default_str();
    mechanism->add_option("--pr-x", ma.pr_x, "Pr(X=1), a fraction like 3/10")
        ->capture_default_str();
    mechanism->add_option("--pr-x-t", ma.pr_x_t, "override Pr(X=1) in the target population");
    mechanism->add_option("--pr-frailty-s", ma.pr_frailty_s, "study frailty share")
        ->capture_default_str();
    mechanism->add_option("--pr-frailty-t", ma.pr_frailty_t, "target frailty share")
        ->capture_default_str();
    mechanism->add_option("--pr-z-s", ma.pr_z_s, "study Pr(Z=1)")->capture_default_str();
    mechanism->add_option("--pr-z-t", ma.pr_z_t, "target Pr(Z=1)")->capture_default_str();
    mechanism->add_option("--mode", ma.mode, "population construction")
        ->check(CLI::IsMember({"exhaustive", "monte-carlo"}))
        ->capture_default_str();
    mechanism->add_option("--samples", ma.samples, "individuals per population in monte-carlo")
        ->capture_default_str();
    mechanism->callback([&] { run_mechanism(ctx, ma); });

    MetaArgs mta;
    auto* meta_cmd = app.add_subcommand("meta", "pooled measures, per-scale heterogeneity and "
                                                "switched-proportion robustness");
    meta_cmd->fallthrough();
    meta_cmd->add_option("input", mta.input, "csv of per-study arm counts")->required();
    meta_cmd->add_option("--pooled-rd", mta.pooled_rd, "externally supplied pooled rd");
    meta_cmd->add_option("--pooled-rr-minus", mta.pooled_rr_minus,
                         "externally supplied pooled rr(-)");
    meta_cmd->add_option("--pooled-rr-plus", mta.pooled_rr_plus,
                         "externally supplied pooled rr(+)");
    meta_cmd->callback([&] { run_meta(ctx, mta); });

    OracleArgs oa;
    auto* oracle_cmd = app.add_subcommand(
        "oracle-verify", "exhaustive finite-population check of every identity the library "
                         "relies on");
    oracle_cmd->fallthrough();
    oracle_cmd->add_option("--single-n-max", oa.bounds.single_n_max,
                           "largest single-population size")
        ->capture_default_str();
    oracle_cmd->add_option("--pair-n-max", oa.bounds.pair_n_max,
                           "largest size in exhaustive pair stages")
        ->capture_default_str();
    oracle_cmd->add_option("--collapse-n-max", oa.bounds.collapse_n_max,
                           "largest stratum size for collapsibility")
        ->capture_default_str();
    oracle_cmd->add_option("--rare-denominator", oa.bounds.rare_denominator,
                           "rarity threshold denominator")
        ->capture_default_str();
    oracle_cmd->add_option("--sampled-pair-n-max", oa.bounds.sampled_pair_n_max,
                           "largest size in sampled pair stages")
        ->capture_default_str();
    oracle_cmd->add_option("--samples-per-size", oa.bounds.samples_per_size,
                           "sampled pairs per study size")
        ->capture_default_str();
    oracle_cmd
        ->add_option("--proposition", oa.propositions,
                     "restrict to named propositions (repeatable); default: all")
        ->take_all();
    oracle_cmd->callback([&] { run_oracle(ctx, oa); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    } catch (const io::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const io::DataError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return ctx.exit_code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

}  // namespace cost::cli
