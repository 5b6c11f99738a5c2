#pragma once

#include <optional>

namespace cost {

// Counterfactual risks for one population:
//   p0 = Pr(Y^{a=0} = 1), p1 = Pr(Y^{a=1} = 1).
struct RiskPair {
    double p0 = 0.0;
    double p1 = 0.0;
};

bool valid_probability(double p);
void require_valid(const RiskPair& r);

// The four standard effect measures. A ratio measure is absent exactly when
// its denominator is zero; absence is the explicit degenerate marker, never
// NaN or an infinity.
//   rr_minus   = p1 / p0                      (absent iff p0 == 0)
//   rr_plus    = (1 - p1) / (1 - p0)          (absent iff p0 == 1)
//   odds_ratio = odds(p1) / odds(p0)          (absent iff p0 or p1 in {0,1})
struct EffectSummary {
    double rd = 0.0;
    std::optional<double> rr_minus;
    std::optional<double> rr_plus;
    std::optional<double> odds_ratio;
};

EffectSummary measures_from_risks(const RiskPair& r);

// Event/total summary for one trial arm.
struct ArmCounts {
    long long events = 0;
    long long total = 0;
};

void require_valid(const ArmCounts& a);

// p1 from the treated arm, p0 from the control arm.
RiskPair risks_from_counts(const ArmCounts& treated, const ArmCounts& control);

}  // namespace cost
