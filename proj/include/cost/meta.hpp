#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cost/measures.hpp"

// Deterministic heterogeneity metrics across study-level summaries: how far
// each study sits from a pooled value on a given scale, and how many
// individual outcomes would have to be switched to move a study onto the
// pooled value. No sampling variability enters anywhere in this module.
namespace cost::meta {

struct StudyRecord {
    std::string id;
    ArmCounts treated;
    ArmCounts control;

    RiskPair risks() const;  // validates both arms
};

enum class Scale { rd, rr_minus, rr_plus };

const char* to_string(Scale s);
std::optional<Scale> scale_from_string(const std::string& s);
std::vector<Scale> all_scales();

// Arm-wise summed counts across all studies (id "pooled").
StudyRecord pooled_counts(const std::vector<StudyRecord>& studies);

// The study's own effect estimate on one scale; absent when degenerate
// (rr(-) with zero control events, rr(+) with all-event control arm).
std::optional<double> study_estimate(const StudyRecord& study, Scale scale);

// Default pooling: the measure computed on summed counts. Callers with an
// externally supplied pooled value skip this and pass theirs downstream.
std::optional<double> pool_studies(const std::vector<StudyRecord>& studies, Scale scale);

// All rr(+) estimates within [1 - kCompressionEpsilon, 1]: the scale is
// compressed by outcome rarity and small deviations are uninformative.
inline constexpr double kCompressionEpsilon = 0.02;

struct StudyDeviation {
    std::string id;
    std::optional<double> estimate;
    std::optional<double> deviation;  // |estimate - pooled|; absent iff degenerate

    bool degenerate() const { return !estimate.has_value(); }
};

struct ScaleDeviations {
    Scale scale = Scale::rd;
    double pooled = 0.0;
    std::vector<StudyDeviation> studies;
    double max_abs_deviation = 0.0;   // over non-degenerate studies
    double mean_abs_deviation = 0.0;  // over non-degenerate studies
    bool compressed = false;          // rr_plus only; see kCompressionEpsilon
};

ScaleDeviations scale_deviations(const std::vector<StudyRecord>& studies, Scale scale,
                                 double pooled_value);
// convenience: default pooling; throws std::invalid_argument when the pooled
// measure is degenerate on this scale
ScaleDeviations scale_deviations(const std::vector<StudyRecord>& studies, Scale scale);

// Minimal number of individual outcome switches (event <-> non-event, any mix
// across both arms, respecting arm totals) after which the study's reachable
// measure set brackets the target: contains the target or values on both
// sides of it. Integer counts rarely hit a real target exactly, hence the
// bracket formalization.
struct SwitchResult {
    bool attainable = false;
    long long flips = 0;
    double proportion = 0.0;          // flips / (treated.total + control.total)
    long long treated_delta = 0;      // witness allocation closest to the target
    long long control_delta = 0;
    std::optional<double> achieved;   // measure at the witness allocation
};

SwitchResult switched_proportion(const StudyRecord& study, double target, Scale scale);

// Risk-difference discrepancy between two populations with equal survivor
// ratios. The gap factors exactly as p0_t*p1_s - p0_s*p1_t, which is why it
// shrinks quadratically with outcome rarity; 2*(max risk)^2 bounds it.
struct SubstitutionCheck {
    double rd_gap = 0.0;             // |RD_s - RD_t|
    double product_remainder = 0.0;  // p0_t*p1_s - p0_s*p1_t (signed)
    double bound = 0.0;              // 2 * (max risk)^2
    bool within_bound = false;
};

// pre: survivor ratios of s and t agree to 1e-12 (throws otherwise)
SubstitutionCheck rd_substitution_check(const RiskPair& s, const RiskPair& t);

struct StudySwitch {
    std::string id;
    Scale scale = Scale::rd;
    SwitchResult result;
};

struct HeterogeneityReport {
    StudyRecord pooled;
    EffectSummary pooled_measures;
    std::vector<ScaleDeviations> deviations;  // rd, rr_minus, rr_plus
    std::vector<StudySwitch> switched;        // per study, per defined scale
};

HeterogeneityReport heterogeneity_report(const std::vector<StudyRecord>& studies);

}  // namespace cost::meta
