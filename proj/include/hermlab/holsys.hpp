#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hermlab/liegeom.hpp"
#include "hermlab/numlin.hpp"
#include "hermlab/report.hpp"
#include "hermlab/tensor.hpp"

namespace hermlab::holsys {

using numlin::ToleranceContext;
using RealTensor = numlin::TensorND<double>;

/// Abstract (generalized) holonomy system on a Euclidean space V.
///
/// Conventions: Rm(a,b,c,d) are the components of the curvature operator,
/// Rm_{e_a, e_b} e_c = sum_d Rm(a,b,c,d) e_d, antisymmetric in (a,b) and skew
/// as an endomorphism.  T(a,b,c) likewise: T(e_a,e_b) = sum_c T(a,b,c) e_c,
/// antisymmetric in (a,b); absent T means a classical (torsion-free) system.
/// g_basis spans the holonomy algebra as skew matrices acting on V.
/// J, when present, is an orthogonal almost complex structure used by the
/// Hermitian-splitting hypothesis of the flatness certificate.
struct HolonomySystem {
    int dim = 0;
    Eigen::MatrixXd H;  // inner product (SPD)
    RealTensor Rm{std::vector<std::size_t>{1, 1, 1, 1}};
    std::optional<RealTensor> T;
    std::vector<Eigen::MatrixXd> g_basis;
    std::optional<Eigen::MatrixXd> J;
    std::string label;
};

/// Per-condition residual reports: pairing SPD, curvature antisymmetry and
/// skewness, torsion antisymmetry, the span condition (curvature operators
/// inside span(g_basis)), first Bianchi with torsion, the curvature-torsion
/// cyclic condition, and invariance of Rm and T under every g_basis element
/// (the "symmetric" flag of the system).
[[nodiscard]] std::vector<ConditionReport> validate_system(const HolonomySystem& sys,
                                                           const ToleranceContext& ctx);

/// Smallest Lie algebra of matrices containing all curvature operators:
/// span of {Rm_{a,b}} closed under commutators, iterated to stabilization.
[[nodiscard]] std::vector<Eigen::MatrixXd>
holonomy_algebra_from_curvature(const HolonomySystem& sys, const ToleranceContext& ctx);

/// Lie algebra on g ⊕ V with [x,y] = −Rm_{x,y} ⊕ (−T(x,y)), [A,x] = Ax,
/// [A,A'] = AA' − A'A, together with its trace-form B' = tr(ad ∘ ad).
/// Basis order: g_basis elements first, then the frame of V.
struct NomizuAlgebra {
    int g_dim = 0;
    int total_dim = 0;
    RealTensor bracket{std::vector<std::size_t>{1, 1, 1}};  // [u_a,u_b] = sum_c bracket(a,b,c) u_c
    Eigen::MatrixXd killing;                                // B'(a,b)
    double jacobi_residual = 0.0;
};

/// Throws Error("JacobiViolation") when the assembled bracket fails the
/// Jacobi identity beyond ctx.abs_tol (the input was not a holonomy system).
[[nodiscard]] NomizuAlgebra nomizu(const HolonomySystem& sys, const ToleranceContext& ctx);

/// Identity checks on the trace form: B'|_g = K − 2<,> with K the Killing
/// form of g alone and <A,B> = tr(B^t A)/2; the mixed block B'(C,x) against
/// 2<T(x,.),C>; negativity of B'|_g; and ad-invariance of B'.
[[nodiscard]] std::vector<ConditionReport> killing_checks(const NomizuAlgebra& alg,
                                                          const HolonomySystem& sys,
                                                          const ToleranceContext& ctx);

struct SchurResult {
    double lambda = 0.0;     // B'|_V = lambda * H
    double deviation = 0.0;  // max |B'(x,y) − lambda H(x,y)| over the frame
};

/// Requires V irreducible under g_basis (decided by invariant-subspace
/// search); throws Error("Reducible") otherwise.
[[nodiscard]] SchurResult schur_lambda(const NomizuAlgebra& alg, const HolonomySystem& sys,
                                       const ToleranceContext& ctx);

/// Ricci-flat ⇒ flat certificate.  Computes the Ricci tensor by direct
/// contraction and — when the Schur scalar is nonzero — by the trace-form
/// identity Ric(x,y) = (1/lambda) sum_i B'(Rm_{x,e_i}, Rm_{y,e_i}); both must
/// agree.  The contradiction flag (Ricci flat but curvature nonzero) must
/// never fire on valid input.  For systems with torsion the hypotheses are
/// checked first: curvature vanishes on the image of the torsion, and either
/// T(x,.) is skew (totally antisymmetric torsion) or the Hermitian splitting
/// holds for the provided J; throws Error("HypothesisUnmet") otherwise.
struct AKCertificate {
    Eigen::MatrixXd ricci;
    bool ricci_flat = false;
    bool flat = false;
    bool contradiction = false;
    double ricci_agreement = 0.0;  // max |direct − trace-form| (0 on the flat branch)
    std::string torsion_case;      // "torsion-free" | "skew" | "hermitian-split" | "flat"
    ConditionReport certificate;
};
[[nodiscard]] AKCertificate ak_certificate(const HolonomySystem& sys,
                                           const ToleranceContext& ctx);

/// Curvature reconstruction Rm_{z,w} = −lambda * S⁻¹(P(z∧w)) with P the
/// orthogonal projection of the 2-form onto g and S the operator defined by
/// B'(A,A') = <S(A), A'>.  Residual compares against the stored Rm.  Skipped
/// (vacuous) when lambda = 0; throws Error("SingularT") if S is singular.
struct KostantResult {
    RealTensor Rm{std::vector<std::size_t>{1, 1, 1, 1}};
    double residual = 0.0;
    double condition_number = 0.0;
    bool vacuous = false;
};
[[nodiscard]] KostantResult kostant_reconstruction(const NomizuAlgebra& alg,
                                                   const HolonomySystem& sys,
                                                   const ToleranceContext& ctx);

/// Realify the point data of an Ambrose-Singer connection on a model into a
/// holonomy system: V is the realification of the (1,0) space (or of the
/// given complex subbundle) via sqrt2 eps_i = e_i + conj(e_i),
/// sqrt2 eps_{n+i} = i(e_i − conj(e_i)); Rm from the connection curvature;
/// the torsion is attached for connection_tag "bismut" and omitted for
/// "chern"; g_basis is generated from the curvature operators.  Throws
/// Error("NotParallel") when the connection's curvature (or, for the Bismut
/// tag, torsion) is not parallel.
[[nodiscard]] HolonomySystem from_model(const liegeom::Model& model,
                                        const std::string& connection_tag,
                                        const ToleranceContext& ctx,
                                        const std::optional<Eigen::MatrixXcd>& subbundle =
                                            std::nullopt);

}  // namespace hermlab::holsys
