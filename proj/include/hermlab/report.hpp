#pragma once

#include <string>
#include <utility>

namespace hermlab {

/// Outcome of a named numerical predicate.
///
/// The invariant maintained by every producer: `holds` is true exactly when
/// `residual <= tol_used`, where tol_used is the absolute tolerance that was
/// in effect.  `witness` carries a short human-readable note (the offending
/// index, a hypothesis that failed, or "vacuous" when the check had nothing
/// to bite on).
struct ConditionReport {
    std::string name;
    bool holds = false;
    double residual = 0.0;
    std::string witness;
};

[[nodiscard]] inline ConditionReport make_condition(std::string name, double residual,
                                                    double abs_tol, std::string witness = {}) {
    ConditionReport r;
    r.name = std::move(name);
    r.residual = residual;
    r.holds = residual <= abs_tol;
    r.witness = std::move(witness);
    return r;
}

} // namespace hermlab
