#include "cost/params.hpp"

#include <cmath>
#include <stdexcept>

namespace cost {

namespace {

void require_mass(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument(std::string("response-type mass '") + name +
                                    "' outside [0,1]: " + std::to_string(v));
}

}  // namespace

void require_valid(const ResponseTypeDistribution& d, double tol) {
    require_mass(d.doomed, "doomed");
    require_mass(d.causal, "causal");
    require_mass(d.preventative, "preventative");
    require_mass(d.immune, "immune");
    if (std::fabs(d.sum() - 1.0) > tol)
        throw std::invalid_argument("response-type masses sum to " + std::to_string(d.sum()) +
                                    ", expected 1 within " + std::to_string(tol));
}

ResponseTypeDistribution normalized(const ResponseTypeDistribution& d) {
    if (!(d.doomed >= 0.0) || !(d.causal >= 0.0) || !(d.preventative >= 0.0) ||
        !(d.immune >= 0.0))
        throw std::invalid_argument("cannot normalize a distribution with negative mass");
    const double s = d.sum();
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("cannot normalize a distribution with non-positive total");
    return ResponseTypeDistribution{d.doomed / s, d.causal / s, d.preventative / s, d.immune / s};
}

RiskPair risks_from_distribution(const ResponseTypeDistribution& d) {
    require_valid(d);
    return RiskPair{d.doomed + d.preventative, d.doomed + d.causal};
}

CostIntroduce cost_introduce(const ResponseTypeDistribution& d) {
    require_valid(d);
    CostIntroduce out;
    const double baseline_cases = d.doomed + d.preventative;
    if (baseline_cases > 0.0) out.g = d.doomed / baseline_cases;
    const double baseline_noncases = d.immune + d.causal;
    if (baseline_noncases > 0.0) out.h = d.immune / baseline_noncases;
    return out;
}

CostRemove cost_remove(const ResponseTypeDistribution& d) {
    require_valid(d);
    CostRemove out;
    const double treated_cases = d.doomed + d.causal;
    if (treated_cases > 0.0) out.i = d.doomed / treated_cases;
    const double treated_noncases = d.immune + d.preventative;
    if (treated_noncases > 0.0) out.j = d.immune / treated_noncases;
    return out;
}

ResponseTypeDistribution recode_outcome(const ResponseTypeDistribution& d) {
    return ResponseTypeDistribution{d.immune, d.preventative, d.causal, d.doomed};
}

ResponseTypeDistribution recode_exposure(const ResponseTypeDistribution& d) {
    return ResponseTypeDistribution{d.doomed, d.preventative, d.causal, d.immune};
}

namespace {

// Weighted collapse of one parameter. `event_mass(dist)` is the probability of
// the parameter's conditioning event within a stratum; `value(dist)` the
// stratum-specific parameter. Weights are Pr(V = v | event).
template <typename EventFn, typename ValueFn>
CollapsedParameter collapse_one(const std::vector<CollapsibilityStratum>& strata,
                                const ResponseTypeDistribution& mixture, EventFn event_mass,
                                ValueFn value, const char* name,
                                std::vector<std::string>& uncollapsible) {
    CollapsedParameter out;
    out.weights.assign(strata.size(), 0.0);

    double total = 0.0;
    for (const auto& s : strata) total += s.prevalence * event_mass(s.dist);

    const double mixture_event = event_mass(mixture);
    if (mixture_event > 0.0) out.pooled = value(mixture);

    if (total > 0.0) {
        double avg = 0.0;
        for (std::size_t v = 0; v < strata.size(); ++v) {
            const double mass = strata[v].prevalence * event_mass(strata[v].dist);
            if (mass <= 0.0) continue;  // empty conditioning event: weight stays zero
            out.weights[v] = mass / total;
            avg += out.weights[v] * value(strata[v].dist);
        }
        out.weighted = avg;
    } else {
        uncollapsible.push_back(name);
    }

    if (out.pooled && out.weighted) {
        out.discrepancy = std::fabs(*out.pooled - *out.weighted);
        if (out.discrepancy > kCollapseTolerance)
            throw std::logic_error(std::string("collapse identity violated for ") + name +
                                   ": discrepancy " + std::to_string(out.discrepancy));
    }
    return out;
}

}  // namespace

CollapseReport collapse_cost(const std::vector<CollapsibilityStratum>& strata) {
    if (strata.empty()) throw std::invalid_argument("collapse_cost: no strata");

    double prevalence_sum = 0.0;
    for (const auto& s : strata) {
        require_valid(s.dist);
        if (!std::isfinite(s.prevalence) || s.prevalence < 0.0 || s.prevalence > 1.0)
            throw std::invalid_argument("stratum prevalence outside [0,1]: " +
                                        std::to_string(s.prevalence));
        prevalence_sum += s.prevalence;
    }
    if (std::fabs(prevalence_sum - 1.0) > kDistributionTolerance)
        throw std::invalid_argument("stratum prevalences sum to " + std::to_string(prevalence_sum) +
                                    ", expected 1");

    CollapseReport report;
    for (const auto& s : strata) {
        report.mixture.doomed += s.prevalence * s.dist.doomed;
        report.mixture.causal += s.prevalence * s.dist.causal;
        report.mixture.preventative += s.prevalence * s.dist.preventative;
        report.mixture.immune += s.prevalence * s.dist.immune;
    }

    const auto p0 = [](const ResponseTypeDistribution& d) { return d.doomed + d.preventative; };
    const auto q0 = [](const ResponseTypeDistribution& d) { return d.immune + d.causal; };
    const auto p1 = [](const ResponseTypeDistribution& d) { return d.doomed + d.causal; };
    const auto q1 = [](const ResponseTypeDistribution& d) { return d.immune + d.preventative; };

    report.g = collapse_one(
        strata, report.mixture, p0,
        [&](const ResponseTypeDistribution& d) { return d.doomed / (d.doomed + d.preventative); },
        "g", report.uncollapsible);
    report.h = collapse_one(
        strata, report.mixture, q0,
        [&](const ResponseTypeDistribution& d) { return d.immune / (d.immune + d.causal); }, "h",
        report.uncollapsible);
    report.i = collapse_one(
        strata, report.mixture, p1,
        [&](const ResponseTypeDistribution& d) { return d.doomed / (d.doomed + d.causal); }, "i",
        report.uncollapsible);
    report.j = collapse_one(
        strata, report.mixture, q1,
        [&](const ResponseTypeDistribution& d) { return d.immune / (d.immune + d.preventative); },
        "j", report.uncollapsible);
    return report;
}

}  // namespace cost
