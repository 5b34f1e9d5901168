#pragma once

#include <string>
#include <vector>

namespace hermlab::verify {

/// One named check inside a criterion: `worst` is the worst residual (or the
/// extremal value) observed, `bound` the limit it was held to.  For
/// lower-bounded checks (`kind == ">="`) passing means worst >= bound.
struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;
    double bound = 0.0;
    std::string kind = "<=";  // "<=" residual bound, ">=" magnitude floor
    std::string detail;       // constants verified, gates fired, vacuity notes
};

struct CriterionResult {
    int index = 0;
    std::string title;
    bool passed = false;
    std::vector<CheckResult> checks;
};

/// 1. Diagonal Hopf family: Bismut torsion/curvature parallelism at random
///    points, curvature profile, and the Ricci-type trace constant.
[[nodiscard]] CriterionResult criterion_hopf_family();

/// 2. Ricci profiles of the almost-abelian and nilpotent counterexamples.
[[nodiscard]] CriterionResult criterion_ricci_profiles();

/// 3. Complex-parallelizable model and the t-family identity suite over the
///    whole collection.
[[nodiscard]] CriterionResult criterion_t_family();

/// 4. Symmetric holonomy systems: validation, Nomizu algebra, trace form,
///    Schur scalar, curvature reconstruction, flatness certificate.
[[nodiscard]] CriterionResult criterion_holonomy_suite();

/// 5. Parallel-torsion models: curvature pair symmetry, difference and
///    contraction identities, admissible-frame relations.
[[nodiscard]] CriterionResult criterion_parallel_torsion();

/// 6. Structural invariances: frame covariance, curvature type purity,
///    d^2 = 0, torsion-free round-trip, invariant-subspace blocks.
[[nodiscard]] CriterionResult criterion_invariances();

/// suite in {identities, holonomy, appendix, all}: identities runs {3,5},
/// holonomy {4}, appendix {1}, all {1..6}.  Throws Error("UnknownModel") on
/// any other name.
[[nodiscard]] std::vector<CriterionResult> run_suite(const std::string& suite);

/// "[PASS]/[FAIL] criterion k: title (N checks, worst residual R)" plus the
/// details that matter: notes on passing checks, names of failing ones.
[[nodiscard]] std::string format_line(const CriterionResult& r);

/// Per-check lines, one per check: status, name, worst value vs bound, note.
[[nodiscard]] std::vector<std::string> format_checks(const CriterionResult& r);

}  // namespace hermlab::verify
