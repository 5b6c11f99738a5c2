#include "cost/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cost {

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::none: return "none";
        case Monotonicity::non_increasing: return "non-increasing";
        case Monotonicity::non_decreasing: return "non-decreasing";
    }
    return "?";
}

const char* to_string(CostParameter p) {
    switch (p) {
        case CostParameter::g: return "g";
        case CostParameter::h: return "h";
        case CostParameter::i: return "i";
        case CostParameter::j: return "j";
    }
    return "?";
}

std::optional<Monotonicity> monotonicity_from_string(const std::string& s) {
    if (s == "none") return Monotonicity::none;
    if (s == "non-increasing" || s == "decrease") return Monotonicity::non_increasing;
    if (s == "non-decreasing" || s == "increase") return Monotonicity::non_decreasing;
    return std::nullopt;
}

namespace {

void require_prob(double v, const char* name) {
    if (!valid_probability(v))
        throw std::invalid_argument(std::string(name) + " outside [0,1]: " + std::to_string(v));
}

}  // namespace

double identify_g_under_decrease(const RiskPair& r) {
    require_valid(r);
    if (r.p0 <= 0.0)
        throw std::invalid_argument("g is not identified when the baseline risk is zero");
    if (r.p1 > r.p0)
        throw std::invalid_argument("risks contradict a non-increasing effect: p1 > p0");
    return r.p1 / r.p0;
}

double identify_h_under_increase(const RiskPair& r) {
    require_valid(r);
    if (r.p0 >= 1.0)
        throw std::invalid_argument("h is not identified when the baseline risk is one");
    if (r.p1 < r.p0)
        throw std::invalid_argument("risks contradict a non-decreasing effect: p1 < p0");
    return (1.0 - r.p1) / (1.0 - r.p0);
}

double identify_i_under_increase(const RiskPair& r) {
    require_valid(r);
    if (r.p1 <= 0.0)
        throw std::invalid_argument("i is not identified when the treated risk is zero");
    if (r.p1 < r.p0)
        throw std::invalid_argument("risks contradict a non-decreasing effect: p1 < p0");
    return r.p0 / r.p1;
}

double identify_j_under_decrease(const RiskPair& r) {
    require_valid(r);
    if (r.p1 >= 1.0)
        throw std::invalid_argument("j is not identified when the treated risk is one");
    if (r.p1 > r.p0)
        throw std::invalid_argument("risks contradict a non-increasing effect: p1 > p0");
    return (1.0 - r.p0) / (1.0 - r.p1);
}

TransportResult predict_introduce(const CostIntroduce& params, double t0) {
    if (!params.g) throw std::invalid_argument("predict_introduce: g is undefined");
    if (!params.h) throw std::invalid_argument("predict_introduce: h is undefined");
    require_prob(*params.g, "g");
    require_prob(*params.h, "h");
    require_prob(t0, "t0");
    TransportResult out;
    // Convex mixture of two probabilities, so the result needs no clamping.
    out.predicted_risk = t0 * *params.g + (1.0 - t0) * (1.0 - *params.h);
    out.parameter_used = CostParameter::g;
    out.assumption = Monotonicity::none;
    out.near_monotonicity_margin = *params.g * t0 - (1.0 - *params.h) * (1.0 - t0);
    return out;
}

TransportResult predict_remove(const CostRemove& params, double t1) {
    if (!params.i) throw std::invalid_argument("predict_remove: i is undefined");
    if (!params.j) throw std::invalid_argument("predict_remove: j is undefined");
    require_prob(*params.i, "i");
    require_prob(*params.j, "j");
    require_prob(t1, "t1");
    TransportResult out;
    out.predicted_risk = t1 * *params.i + (1.0 - t1) * (1.0 - *params.j);
    out.parameter_used = CostParameter::i;
    out.assumption = Monotonicity::none;
    out.near_monotonicity_margin = *params.i * t1 - (1.0 - *params.j) * (1.0 - t1);
    return out;
}

TransportResult transport_rr(const RiskPair& source, double t0, Monotonicity assumption) {
    require_prob(t0, "t0");
    TransportResult out;
    if (assumption == Monotonicity::non_increasing) {
        const double g = identify_g_under_decrease(source);
        out = predict_introduce(CostIntroduce{g, 1.0}, t0);
        out.parameter_used = CostParameter::g;
    } else if (assumption == Monotonicity::non_decreasing) {
        const double h = identify_h_under_increase(source);
        out = predict_introduce(CostIntroduce{1.0, h}, t0);
        out.parameter_used = CostParameter::h;
    } else {
        throw std::invalid_argument("transport_rr requires a monotonicity direction");
    }
    out.assumption = assumption;
    return out;
}

BiasReport bias_under_nonmonotonicity(double g, double h, double s0, double t0) {
    require_prob(g, "g");
    require_prob(h, "h");
    require_prob(t0, "t0");
    if (!std::isfinite(s0) || s0 <= 0.0 || s0 > 1.0)
        throw std::invalid_argument("s0 must lie in (0,1], got " + std::to_string(s0));

    BiasReport r;
    r.g = g;
    r.h = h;
    r.s0 = s0;
    r.t0 = t0;
    r.f = t0 / s0;
    const double s1 = s0 * g + (1.0 - s0) * (1.0 - h);
    r.rr_study = s1 / s0;
    const double t1 = t0 * g + (1.0 - t0) * (1.0 - h);
    r.true_risk = t1;
    if (t0 > 0.0) r.rr_target = t1 / t0;
    // f * s1 rather than t0 * rr_study: when t0 == s0 the factor f is exactly
    // one and the bias comes out identically zero, as it should.
    r.naive_prediction = r.f * s1;
    r.bias = r.naive_prediction - r.true_risk;
    return r;
}

std::vector<BiasReport> bias_surface(double g, const std::vector<double>& h_grid,
                                     const std::vector<double>& f_grid) {
    require_prob(g, "g");
    std::vector<BiasReport> out;
    out.reserve(h_grid.size() * f_grid.size());
    for (const double h : h_grid) {
        require_prob(h, "h");
        for (const double f : f_grid) {
            if (!std::isfinite(f) || f <= 0.0)
                throw std::invalid_argument("baseline ratio f must be positive, got " +
                                            std::to_string(f));
            out.push_back(bias_under_nonmonotonicity(g, h, 1.0 / (1.0 + f), f / (1.0 + f)));
        }
    }
    return out;
}

namespace {

ComparisonPrediction clamped_row(const char* measure, std::optional<double> raw) {
    ComparisonPrediction row;
    row.measure = measure;
    if (!raw) {
        row.degenerate = true;
        return row;
    }
    row.unclamped = *raw;
    row.predicted = std::clamp(*raw, 0.0, 1.0);
    row.clamped = (*row.predicted != *raw);
    return row;
}

}  // namespace

std::vector<ComparisonPrediction> naive_scale_predictions(const RiskPair& source, double t0) {
    require_prob(t0, "t0");
    const EffectSummary m = measures_from_risks(source);
    std::vector<ComparisonPrediction> rows;

    std::optional<double> via_rr_minus, via_rr_plus, via_or;
    if (m.rr_minus) via_rr_minus = t0 * *m.rr_minus;
    if (m.rr_plus) via_rr_plus = 1.0 - (1.0 - t0) * *m.rr_plus;
    if (m.odds_ratio && t0 > 0.0 && t0 < 1.0) {
        const double odds = *m.odds_ratio * t0 / (1.0 - t0);
        via_or = odds / (1.0 + odds);
    }
    rows.push_back(clamped_row("rr_minus", via_rr_minus));
    rows.push_back(clamped_row("rr_plus", via_rr_plus));
    rows.push_back(clamped_row("rd", t0 + m.rd));
    rows.push_back(clamped_row("odds_ratio", via_or));
    return rows;
}

std::vector<ComparisonPrediction> compare_predictions(const RiskPair& source, double t0,
                                                      Monotonicity assumption) {
    auto rows = naive_scale_predictions(source, t0);
    const TransportResult res = transport_rr(source, t0, assumption);
    ComparisonPrediction cost_row;
    cost_row.measure = "cost";
    cost_row.predicted = res.predicted_risk;
    cost_row.unclamped = res.predicted_risk;
    rows.push_back(cost_row);
    return rows;
}

}  // namespace cost
