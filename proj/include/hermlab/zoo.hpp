#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "hermlab/holsys.hpp"
#include "hermlab/liegeom.hpp"

namespace hermlab::zoo {

using numlin::Complex;
using numlin::ToleranceContext;

// ============================================================================
// Builders
// ============================================================================

/// Diagonal Hopf structure on C^n \ {0} in the unitary frame e_s = |z| d/dz_s,
/// evaluated at the base point z.  Structure functions carry exact first-order
/// jets; closed-form curvature jets are available for t in {0, 2}.
[[nodiscard]] liegeom::Model hopf(int n, const Eigen::VectorXcd& z);

/// Hopf structure at the distinguished point (1, 0, ..., 0).
[[nodiscard]] liegeom::Model hopf_base(int n);

/// Almost-abelian Lie model: a codimension-one abelian ideal spanned by
/// e_2..e_n (and their conjugates together with the real span of e_1), with
///   Gamma-data  D(0,0,0) = lambda,  D(0,i,0) = v_{i-1},  D(j,i,0) = A_{i-1,j-1},
///   C(j,0,i) = -conj(A_{j-1,i-1})           (i, j >= 1).
[[nodiscard]] liegeom::Model almost_abelian(Complex lambda, const Eigen::VectorXcd& v,
                                            const Eigen::MatrixXcd& A);

/// Nilpotent model with abelian complex structure, parameterized by the
/// (n-r) x r matrix Y:  D(a, r+alpha, a) = -conj(Y(alpha, a)) for a < r.
/// Rows of Y must sum to zero (throws Error("BadRowSum") otherwise), which
/// makes every instance balanced.
[[nodiscard]] liegeom::Model nilpotent(int n, int r, const Eigen::MatrixXcd& Y);

/// Complex simple group model; supported name: "sl2" (complex-parallelizable,
/// Chern- and skew-torsion-flat, |T|^2 = 3).
[[nodiscard]] liegeom::Model complex_simple(const std::string& name);

/// Abelian (flat Kaehler) model of complex dimension n.
[[nodiscard]] liegeom::Model abelian(int n);

/// Curvature model of a rank-one symmetric space as an abstract holonomy
/// system: family "sphere" (S^n, dim n), "cpn" (CP^n, dim 2n), or "flat"
/// (zero curvature, trivial holonomy, dim n).
[[nodiscard]] holsys::HolonomySystem symmetric_space_system(const std::string& family, int n);

// ============================================================================
// Curated entries with frozen expected values
// ============================================================================

struct ExpectedValue {
    std::string name;    // key understood by evaluate_expected
    double value = 0.0;  // frozen oracle
    double tol = 1e-9;   // comparison tolerance
};

struct ZooEntry {
    std::string name;
    std::variant<liegeom::Model, holsys::HolonomySystem> object;
    std::vector<ExpectedValue> expected;
};

/// Names of all curated entries, in deterministic order.
[[nodiscard]] std::vector<std::string> list();

/// Retrieve an entry by name; throws Error("UnknownModel") otherwise.
[[nodiscard]] ZooEntry entry(const std::string& name);

/// Compute the scalar identified by value_name for the entry's object.
/// Understood names (models): eta_norm, torsion_norm_sq, chern_curvature_max,
/// bismut_curvature_max, chern_ric1_max, chern_ric2_max, chern_ric3_max,
/// btp_residual, bas_residual, kahler_residual, vaisman_residual,
/// bismut_r2233_real.  Understood names (holonomy systems):
/// validate_max_residual, nomizu_jacobi, schur_lambda, ricci_uniform,
/// ricci_isotropy_dev, kostant_residual, curvature_max.
[[nodiscard]] double evaluate_expected(const ZooEntry& e, const std::string& value_name,
                                       const ToleranceContext& ctx);

}  // namespace hermlab::zoo
