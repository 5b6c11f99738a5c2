#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cost/measures.hpp"

namespace cost {

inline constexpr double kDistributionTolerance = 1e-12;
inline constexpr double kCollapseTolerance = 1e-12;

// Probabilities of the four deterministic response types under a binary
// treatment and binary outcome:
//   doomed        Y^{a=1} = 1, Y^{a=0} = 1
//   causal        Y^{a=1} = 1, Y^{a=0} = 0
//   preventative  Y^{a=1} = 0, Y^{a=0} = 1
//   immune        Y^{a=1} = 0, Y^{a=0} = 0
struct ResponseTypeDistribution {
    double doomed = 0.0;
    double causal = 0.0;
    double preventative = 0.0;
    double immune = 0.0;

    double sum() const { return doomed + causal + preventative + immune; }
};

void require_valid(const ResponseTypeDistribution& d, double tol = kDistributionTolerance);

// Rescales the four masses to sum to one. Intended for ingesting tables whose
// entries carry rounding error; rejects non-positive totals.
ResponseTypeDistribution normalized(const ResponseTypeDistribution& d);

// Outcome-transition parameters for introducing treatment:
//   g = Pr(Y^{a=1} = 1 | Y^{a=0} = 1)   (absent iff Pr(Y^{a=0} = 1) = 0)
//   h = Pr(Y^{a=1} = 0 | Y^{a=0} = 0)   (absent iff Pr(Y^{a=0} = 0) = 0)
struct CostIntroduce {
    std::optional<double> g;
    std::optional<double> h;
};

// The mirror parameters for removing treatment:
//   i = Pr(Y^{a=0} = 1 | Y^{a=1} = 1)   (absent iff Pr(Y^{a=1} = 1) = 0)
//   j = Pr(Y^{a=0} = 0 | Y^{a=1} = 0)   (absent iff Pr(Y^{a=1} = 0) = 0)
struct CostRemove {
    std::optional<double> i;
    std::optional<double> j;
};

// p0 = doomed + preventative, p1 = doomed + causal.
RiskPair risks_from_distribution(const ResponseTypeDistribution& d);

CostIntroduce cost_introduce(const ResponseTypeDistribution& d);
CostRemove cost_remove(const ResponseTypeDistribution& d);

// Relabels the outcome (Y -> 1-Y): swaps doomed<->immune and
// causal<->preventative. The recoded (g,h) is the original (h,g).
ResponseTypeDistribution recode_outcome(const ResponseTypeDistribution& d);

// Relabels the exposure (A -> 1-A): swaps causal<->preventative. The recoded
// (g,h) is the original (i,j) and vice versa.
ResponseTypeDistribution recode_exposure(const ResponseTypeDistribution& d);

// ---- collapsibility over a discrete covariate ----------------------------

struct CollapsibilityStratum {
    std::string label;
    ResponseTypeDistribution dist;
    double prevalence = 0.0;  // Pr(V = v); the set must sum to one
};

// One marginal parameter computed two ways: from the pooled mixture
// distribution, and as a weighted average of the stratum-specific values.
// The weights condition on the parameter's own conditioning event (for g:
// Pr(V = v | Y^{a=0} = 1), and analogously for h, i, j), so the two numbers
// agree to within kCollapseTolerance by construction.
struct CollapsedParameter {
    std::optional<double> pooled;
    std::optional<double> weighted;
    std::vector<double> weights;  // one per stratum; zero where the stratum's event is empty
    double discrepancy = 0.0;     // |pooled - weighted| when both are defined
};

struct CollapseReport {
    ResponseTypeDistribution mixture;
    CollapsedParameter g, h, i, j;
    // Parameter names ("g","h","i","j") whose conditioning event has zero
    // marginal probability; those stay undefined rather than being forced.
    std::vector<std::string> uncollapsible;
};

CollapseReport collapse_cost(const std::vector<CollapsibilityStratum>& strata);

}  // namespace cost
