#include "cost/meta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cost::meta {

RiskPair StudyRecord::risks() const { return risks_from_counts(treated, control); }

const char* to_string(Scale s) {
    switch (s) {
        case Scale::rd: return "rd";
        case Scale::rr_minus: return "rr-";
        case Scale::rr_plus: return "rr+";
    }
    return "?";
}

std::optional<Scale> scale_from_string(const std::string& s) {
    if (s == "rd") return Scale::rd;
    if (s == "rr-" || s == "rr_minus") return Scale::rr_minus;
    if (s == "rr+" || s == "rr_plus") return Scale::rr_plus;
    return std::nullopt;
}

std::vector<Scale> all_scales() { return {Scale::rd, Scale::rr_minus, Scale::rr_plus}; }

StudyRecord pooled_counts(const std::vector<StudyRecord>& studies) {
    if (studies.empty()) throw std::invalid_argument("pooled_counts: no studies");
    StudyRecord pooled;
    pooled.id = "pooled";
    for (const StudyRecord& s : studies) {
        require_valid(s.treated);
        require_valid(s.control);
        pooled.treated.events += s.treated.events;
        pooled.treated.total += s.treated.total;
        pooled.control.events += s.control.events;
        pooled.control.total += s.control.total;
    }
    return pooled;
}

namespace {

std::optional<double> pick(const EffectSummary& m, Scale scale) {
    switch (scale) {
        case Scale::rd: return m.rd;
        case Scale::rr_minus: return m.rr_minus;
        case Scale::rr_plus: return m.rr_plus;
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> study_estimate(const StudyRecord& study, Scale scale) {
    return pick(measures_from_risks(study.risks()), scale);
}

std::optional<double> pool_studies(const std::vector<StudyRecord>& studies, Scale scale) {
    return study_estimate(pooled_counts(studies), scale);
}

ScaleDeviations scale_deviations(const std::vector<StudyRecord>& studies, Scale scale,
                                 double pooled_value) {
    if (studies.empty()) throw std::invalid_argument("scale_deviations: no studies");
    ScaleDeviations report;
    report.scale = scale;
    report.pooled = pooled_value;
    double sum = 0.0;
    long long defined = 0;
    bool all_in_band = true;
    for (const StudyRecord& s : studies) {
        StudyDeviation d;
        d.id = s.id;
        d.estimate = study_estimate(s, scale);
        if (d.estimate) {
            d.deviation = std::abs(*d.estimate - pooled_value);
            report.max_abs_deviation = std::max(report.max_abs_deviation, *d.deviation);
            sum += *d.deviation;
            ++defined;
            if (*d.estimate < 1.0 - kCompressionEpsilon || *d.estimate > 1.0) {
                all_in_band = false;
            }
        } else {
            all_in_band = false;  // a degenerate ratio is not a value near 1
        }
        report.studies.push_back(std::move(d));
    }
    report.mean_abs_deviation = defined > 0 ? sum / static_cast<double>(defined) : 0.0;
    report.compressed = scale == Scale::rr_plus && defined > 0 && all_in_band;
    return report;
}

ScaleDeviations scale_deviations(const std::vector<StudyRecord>& studies, Scale scale) {
    auto pooled = pool_studies(studies, scale);
    if (!pooled) {
        throw std::invalid_argument(std::string("scale_deviations: pooled measure is "
                                                "degenerate on scale ") +
                                    to_string(scale));
    }
    return scale_deviations(studies, scale, *pooled);
}

// ---- switched proportion ---------------------------------------------------------

namespace {

std::optional<double> measure_at(long long n1, long long n0, long long e1, long long e0,
                                 Scale scale) {
    double p1 = static_cast<double>(e1) / static_cast<double>(n1);
    double p0 = static_cast<double>(e0) / static_cast<double>(n0);
    switch (scale) {
        case Scale::rd: return p1 - p0;
        case Scale::rr_minus:
            if (e0 == 0) return std::nullopt;
            return p1 / p0;
        case Scale::rr_plus:
            if (e0 == n0) return std::nullopt;
            return (1.0 - p1) / (1.0 - p0);
    }
    return std::nullopt;
}

struct Frame {
    long long n1 = 0, n0 = 0, e1 = 0, e0 = 0;
    Scale scale = Scale::rd;

    // control-arm event counts where the measure is defined
    long long e0_min() const { return scale == Scale::rr_minus ? 1 : 0; }
    long long e0_max() const { return scale == Scale::rr_plus ? n0 - 1 : n0; }
};

// Visits the extremal allocations reachable with exactly `budget` switches in
// the given direction (+1 toward larger measure values, -1 toward smaller).
// All three measures move up with treated events and down with control events
// except rr(+), where both coordinates reverse. For a fixed treated count the
// extremum sits at the farthest defined control count, so scanning treated
// movement against maximal control movement covers the diamond's extremes;
// when the base control count sits on the undefined line the clamp spends one
// switch stepping off it.
template <typename Visitor>
void visit_frontier(const Frame& f, long long budget, int direction, Visitor&& visit) {
    int s1 = (f.scale == Scale::rr_plus ? -1 : 1) * direction;
    long long a_cap = std::min(budget, s1 > 0 ? f.n1 - f.e1 : f.e1);
    for (long long a = 0; a <= a_cap; ++a) {
        long long e1p = f.e1 + (s1 > 0 ? a : -a);
        long long left = budget - a;
        long long raw = s1 > 0 ? f.e0 - left : f.e0 + left;
        long long e0p = std::clamp(raw, f.e0_min(), f.e0_max());
        if (std::abs(e0p - f.e0) > left) continue;  // cannot reach the defined band
        auto value = measure_at(f.n1, f.n0, e1p, e0p, f.scale);
        if (value) visit(e1p, e0p, *value);
    }
}

bool brackets(const Frame& f, long long budget, double target) {
    std::optional<double> hi, lo;
    visit_frontier(f, budget, +1, [&](long long, long long, double v) {
        if (!hi || v > *hi) hi = v;
    });
    visit_frontier(f, budget, -1, [&](long long, long long, double v) {
        if (!lo || v < *lo) lo = v;
    });
    return hi && lo && *lo <= target && target <= *hi;
}

}  // namespace

SwitchResult switched_proportion(const StudyRecord& study, double target, Scale scale) {
    if (!std::isfinite(target)) {
        throw std::invalid_argument("switched_proportion: target must be finite");
    }
    require_valid(study.treated);
    require_valid(study.control);
    Frame f{study.treated.total, study.control.total, study.treated.events,
            study.control.events, scale};

    SwitchResult result;
    long long k_max = f.n1 + f.n0;
    if (!brackets(f, k_max, target)) {
        return result;  // unattainable: no switch count can bracket the target
    }
    long long lo = 0, hi = k_max;
    while (lo < hi) {
        long long mid = lo + (hi - lo) / 2;
        if (brackets(f, mid, target)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    result.attainable = true;
    result.flips = lo;
    result.proportion = static_cast<double>(lo) / static_cast<double>(k_max);

    // witness: the allocation closest to the target among extremal points; for
    // small switch counts, sweep every budget so under-spending allocations
    // are seen too
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](long long e1p, long long e0p, double v) {
        double d = std::abs(v - target);
        if (d < best) {
            best = d;
            result.treated_delta = e1p - f.e1;
            result.control_delta = e0p - f.e0;
            result.achieved = v;
        }
    };
    long long sweep_from = result.flips <= 2000 ? 0 : result.flips;
    for (long long j = sweep_from; j <= result.flips; ++j) {
        visit_frontier(f, j, +1, consider);
        visit_frontier(f, j, -1, consider);
    }
    return result;
}

SubstitutionCheck rd_substitution_check(const RiskPair& s, const RiskPair& t) {
    require_valid(s);
    require_valid(t);
    if (s.p0 >= 1.0 || t.p0 >= 1.0) {
        throw std::invalid_argument("rd_substitution_check: survivor ratio undefined");
    }
    double rr_s = (1.0 - s.p1) / (1.0 - s.p0);
    double rr_t = (1.0 - t.p1) / (1.0 - t.p0);
    if (std::abs(rr_s - rr_t) > 1e-12) {
        throw std::invalid_argument("rd_substitution_check: survivor ratios differ");
    }
    SubstitutionCheck check;
    check.rd_gap = std::abs((s.p1 - s.p0) - (t.p1 - t.p0));
    check.product_remainder = t.p0 * s.p1 - s.p0 * t.p1;
    double risk = std::max({s.p0, s.p1, t.p0, t.p1});
    check.bound = 2.0 * risk * risk;
    check.within_bound = check.rd_gap <= check.bound + 1e-15;
    return check;
}

HeterogeneityReport heterogeneity_report(const std::vector<StudyRecord>& studies) {
    HeterogeneityReport report;
    report.pooled = pooled_counts(studies);
    report.pooled_measures = measures_from_risks(report.pooled.risks());
    for (Scale scale : all_scales()) {
        auto pooled_value = pick(report.pooled_measures, scale);
        if (!pooled_value) continue;  // degenerate pooled scale: nothing to compare on
        report.deviations.push_back(scale_deviations(studies, scale, *pooled_value));
        for (const StudyRecord& s : studies) {
            report.switched.push_back(
                {s.id, scale, switched_proportion(s, *pooled_value, scale)});
        }
    }
    return report;
}

}  // namespace cost::meta
