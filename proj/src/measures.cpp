#include "cost/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cost {

bool valid_probability(double p) {
    return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

void require_valid(const RiskPair& r) {
    if (!valid_probability(r.p0) || !valid_probability(r.p1))
        throw std::invalid_argument("risk pair outside [0,1]: p0=" + std::to_string(r.p0) +
                                    " p1=" + std::to_string(r.p1));
}

EffectSummary measures_from_risks(const RiskPair& r) {
    require_valid(r);
    EffectSummary out;
    out.rd = r.p1 - r.p0;
    if (r.p0 > 0.0) out.rr_minus = r.p1 / r.p0;
    if (r.p0 < 1.0) out.rr_plus = (1.0 - r.p1) / (1.0 - r.p0);
    if (r.p0 > 0.0 && r.p0 < 1.0 && r.p1 > 0.0 && r.p1 < 1.0)
        out.odds_ratio = (r.p1 / (1.0 - r.p1)) / (r.p0 / (1.0 - r.p0));
    return out;
}

void require_valid(const ArmCounts& a) {
    if (a.total < 1)
        throw std::invalid_argument("arm total must be >= 1, got " + std::to_string(a.total));
    if (a.events < 0 || a.events > a.total)
        throw std::invalid_argument("arm events must lie in [0, total]: events=" +
                                    std::to_string(a.events) + " total=" + std::to_string(a.total));
}

RiskPair risks_from_counts(const ArmCounts& treated, const ArmCounts& control) {
    require_valid(treated);
    require_valid(control);
    return RiskPair{static_cast<double>(control.events) / static_cast<double>(control.total),
                    static_cast<double>(treated.events) / static_cast<double>(treated.total)};
}

}  // namespace cost
