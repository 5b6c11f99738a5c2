#pragma once

#include <optional>
#include <vector>

#include "cost/measures.hpp"
#include "cost/params.hpp"

namespace cost {

enum class Monotonicity {
    none,
    non_increasing,  // treatment never causes the outcome (no causal type, so h = 1)
    non_decreasing,  // treatment never prevents the outcome (no preventative type, so g = 1)
};

enum class CostParameter { g, h, i, j };

const char* to_string(Monotonicity m);
const char* to_string(CostParameter p);
std::optional<Monotonicity> monotonicity_from_string(const std::string& s);

// ---- identification from observed risks -----------------------------------
// Under non-increasing effects (no causal individuals), g is the ordinary
// risk ratio p1/p0 and j its reciprocal. Under non-decreasing effects (no
// preventative individuals), h is the survivor ratio (1-p1)/(1-p0) and i its
// reciprocal. Each identifier rejects risks that contradict its assumption.

double identify_g_under_decrease(const RiskPair& r);   // requires p1 <= p0, p0 > 0
double identify_h_under_increase(const RiskPair& r);   // requires p1 >= p0, p0 < 1
double identify_i_under_increase(const RiskPair& r);   // requires p1 >= p0, p1 > 0
double identify_j_under_decrease(const RiskPair& r);   // requires p1 <= p0, p1 < 1

// ---- prediction ------------------------------------------------------------

struct TransportResult {
    double predicted_risk = 0.0;
    CostParameter parameter_used = CostParameter::g;
    Monotonicity assumption = Monotonicity::none;
    // g*t0 - (1-h)*(1-t0): how far the introduce-direction decomposition is
    // from flipping sign. Small magnitudes mean the monotone identification is
    // fragile at this baseline.
    double near_monotonicity_margin = 0.0;
};

// Risk under treatment in a population with baseline risk t0, given both
// introduce parameters. Always lands in [0,1]: it is the mixture
// t0*g + (1-t0)*(1-h).
TransportResult predict_introduce(const CostIntroduce& params, double t0);

// Mirror: risk without treatment given both remove parameters and the
// treated risk t1: t1*i + (1-t1)*(1-j).
TransportResult predict_remove(const CostRemove& params, double t1);

// Identify the relevant parameter from source risks under a monotonicity
// assumption, then predict at the target baseline t0. `assumption` must name
// a direction.
TransportResult transport_rr(const RiskPair& source, double t0, Monotonicity assumption);

// ---- bias of naive risk-ratio transport under non-monotonicity -------------

struct BiasReport {
    double g = 0.0, h = 0.0, s0 = 0.0, t0 = 0.0;
    double f = 0.0;                    // t0 / s0
    double rr_study = 0.0;             // p1/p0 in the study population
    std::optional<double> rr_target;   // implied true ratio in the target (absent when t0 = 0)
    double naive_prediction = 0.0;  // t0 * rr_study, NOT clamped into [0,1]
    double true_risk = 0.0;         // t0*g + (1-t0)*(1-h)
    double bias = 0.0;              // naive_prediction - true_risk == (f-1)*(1-h)
};

// Requires g,h,t0 in [0,1] and s0 in (0,1]. The bias depends only on f and h,
// not on g or the individual baselines.
BiasReport bias_under_nonmonotonicity(double g, double h, double s0, double t0);

// Sweeps the bias identity over (h,f) cells. Each cell is evaluated at the
// canonical baseline pair s0 = 1/(1+f), t0 = f/(1+f), which realizes every
// ratio f > 0 with both baselines inside (0,1).
std::vector<BiasReport> bias_surface(double g, const std::vector<double>& h_grid,
                                     const std::vector<double>& f_grid);

// ---- side-by-side scale comparison ------------------------------------------

struct ComparisonPrediction {
    const char* measure = "";            // "rr_minus" | "rr_plus" | "rd" | "odds_ratio" | "cost"
    std::optional<double> predicted;     // clamped into [0,1] when necessary
    std::optional<double> unclamped;     // raw transported value
    bool clamped = false;
    bool degenerate = false;             // source measure undefined at these risks
};

// Naive transport of each standard measure to baseline t0. Values outside
// [0,1] are clamped with the flag set; a degenerate source measure yields a
// flagged row instead of a number.
std::vector<ComparisonPrediction> naive_scale_predictions(const RiskPair& source, double t0);

// The naive rows plus a "cost" row obtained from transport_rr under the given
// (directional) assumption.
std::vector<ComparisonPrediction> compare_predictions(const RiskPair& source, double t0,
                                                      Monotonicity assumption);

}  // namespace cost
