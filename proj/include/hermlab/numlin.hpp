#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hermlab/tensor.hpp"

namespace hermlab::numlin {

// ============================================================================
// Tolerances
// ============================================================================
struct ToleranceContext {
    double abs_tol = 1e-9; ///< absolute floor for "is zero" decisions
    double rel_tol = 1e-9; ///< scale-relative slack
    double fd_tol = 1e-6;  ///< looser budget for finite-difference cross-checks

    /// Throws Error("InvalidTolerance") unless all three are strictly positive.
    void validate() const;
};

/// max-norm comparison against abs_tol + rel_tol * ref_scale.
[[nodiscard]] bool approx_zero(const ComplexTensor& t, const ToleranceContext& ctx,
                               double ref_scale = 1.0);
[[nodiscard]] bool approx_zero(const Eigen::MatrixXcd& m, const ToleranceContext& ctx,
                               double ref_scale = 1.0);
[[nodiscard]] bool approx_zero(double residual, const ToleranceContext& ctx,
                               double ref_scale = 1.0);

// ============================================================================
// Frame changes
// ============================================================================
struct FrameChange {
    Eigen::MatrixXcd matrix;          ///< new frame e'_i = sum_j matrix(i,j) e_j
    std::string kind = "general";     ///< "unitary" or "general"
};

/// Deterministic frame change P with P G P^* = I for Hermitian positive
/// definite G (lower-triangular, Cholesky-style, positive diagonal).
/// Throws Error("NotPositiveDefinite") when a pivot is <= ctx.abs_tol.
[[nodiscard]] FrameChange unitarize(const Eigen::MatrixXcd& gram, const ToleranceContext& ctx);

// ============================================================================
// Invariant subspaces
// ============================================================================

/// Splits C^n (columns of returned bases are orthonormal, bases pairwise
/// orthogonal, together spanning C^n) into minimal subspaces invariant under
/// every generator.  Deterministic: coordinate-aligned whenever the generators
/// allow it, blocks ordered by their leading coordinate.
[[nodiscard]] std::vector<Eigen::MatrixXcd>
invariant_subspaces(const std::vector<Eigen::MatrixXcd>& generators, int n,
                    const ToleranceContext& ctx);

/// Real-coefficient variant: generators are real n x n matrices acting on R^n,
/// and only real invariant subspaces count.  (A complex-irreducible family can
/// still be real-reducible and vice versa; the Schur argument for holonomy
/// scalars needs the real notion.)
[[nodiscard]] std::vector<Eigen::MatrixXd>
invariant_subspaces_real(const std::vector<Eigen::MatrixXd>& generators, int n,
                         const ToleranceContext& ctx);

} // namespace hermlab::numlin
