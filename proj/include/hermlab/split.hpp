#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hermlab/liegeom.hpp"
#include "hermlab/report.hpp"

namespace hermlab::split {

using numlin::ToleranceContext;

/// One holonomy-irreducible symplectic block of the torsion-orthogonal
/// subspace: an orthonormal (1,0)-frame basis (columns, full-space
/// coordinates), the symplectic scale b > 0, and the half-dimension n_j
/// (the block has complex dimension 2 n_j).
struct SymplecticBlock {
    Eigen::MatrixXcd basis;
    double b = 0.0;
    int n_j = 0;
};

/// A holomorphic 2-form tau(x, y) = <T(x, y), conj(Z)> built from a parallel
/// section Z of the torsion image, with its diagnostic residuals: parallelism
/// of tau under the connection, and closure (d of the dual 1-form has pure
/// (2,0) type equal to tau).
struct TauForm {
    Eigen::MatrixXcd form;
    double parallel_residual = 0.0;
    double closure_residual = 0.0;
};

/// Torsion-driven splitting of the (1,0) space.
///  - W: span of the image of the torsion;
///  - N: its orthogonal complement (vectors pairing to zero with the image);
///  - N0: the part of N annihilated by the torsion in the first slot;
///  - A_matrix: restriction of the chosen 2-form to N;
///  - blocks: eigen-decomposition of A conj(A) into symplectic blocks, with
///    ell2 counting the null directions of the chosen form inside N.
/// All bases are orthonormal. 2 * (sum of n_j) + ell1 + ell2 = n once the
/// blocks are computed.
struct DecompositionReport {
    int n = 0;
    Eigen::MatrixXcd W_basis;
    Eigen::MatrixXcd N_basis;
    Eigen::MatrixXcd N0_basis;
    std::vector<Eigen::MatrixXcd> tau_forms;
    Eigen::MatrixXcd A_matrix;
    std::vector<SymplecticBlock> blocks;
    int ell1 = 0;
    int ell2 = 0;
};

/// Split the (1,0) space by the torsion of the canonical Hermitian
/// connection: W (image span), N (complement), N0 (torsion-null part of N).
/// Fills only the subspace part of the report.
[[nodiscard]] DecompositionReport torsion_split(const liegeom::Model& model,
                                                const ToleranceContext& ctx);

/// Construct one holomorphic 2-form per parallel direction of W and store the
/// matrices in the report. Requires a full parallel frame of W; throws NotCAS
/// when none exists within tolerance. Returns an empty list when W = 0.
std::vector<TauForm> tau_forms(const liegeom::Model& model, DecompositionReport& report,
                               const ToleranceContext& ctx);

/// Pick the 2-form of maximum numerical rank on N from the span of the stored
/// forms: candidates are the forms themselves plus 256 seeded random unit
/// combinations; ties broken by the largest smallest-retained singular value.
/// Throws Degenerate when the report holds no forms.
[[nodiscard]] Eigen::MatrixXcd choose_tau(const DecompositionReport& report,
                                          const ToleranceContext& ctx);

/// Restrict the chosen form to N and decompose N by the eigenspaces of
/// A conj(A): eigenvalue -b_j^2 with multiplicity 2 n_j per block, b_j
/// strictly decreasing, plus the null space counted by ell2. Fills A_matrix,
/// blocks, ell2. Throws Degenerate when the restriction of the form to a
/// nonzero N vanishes (or an eigenvalue cluster is odd-dimensional).
std::vector<SymplecticBlock> symplectic_blocks(DecompositionReport& report,
                                               const Eigen::MatrixXcd& chosen_tau,
                                               const ToleranceContext& ctx);

/// Check that the curvature operators restrict trace-free to every block and
/// that the restricted Ricci form vanishes there. Vacuously holds when the
/// report has no blocks.
[[nodiscard]] ConditionReport trace_free_check(const liegeom::Model& model,
                                               const DecompositionReport& report,
                                               const ToleranceContext& ctx);

}  // namespace hermlab::split
