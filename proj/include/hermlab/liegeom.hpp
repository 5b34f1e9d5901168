#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hermlab/numlin.hpp"
#include "hermlab/report.hpp"
#include "hermlab/tensor.hpp"

namespace hermlab::liegeom {

using numlin::Complex;
using numlin::ComplexTensor;
using numlin::FrameChange;
using numlin::Jet;
using numlin::JetTensor;
using numlin::ToleranceContext;

// ============================================================================
// Models
// ============================================================================

/// Left-invariant Hermitian structure on a complex unimodular-or-not Lie
/// algebra, described in a fixed unitary (1,0)-frame e_1..e_n with pairing
/// <e_i, conj(e_j)> = delta_ij.  The brackets are
///   [e_i, e_j]       = sum_k C^k_{ij} e_k
///   [e_i, conj(e_j)] = sum_k ( conj(D^i_{kj}) e_k − D^j_{ki} conj(e_k) )
/// Storage order is (upper, lower1, lower2): C(k,i,j) = C^k_{ij},
/// D(j,k,i) = D^j_{ki}.
struct LieHermitianModel {
    int n = 0;
    ComplexTensor C; // (n,n,n)
    ComplexTensor D; // (n,n,n)
    std::string label;
};

/// Frame data for a homogeneous-but-not-left-invariant structure, given by
/// closed-form evaluators at a base point z in C^n \ {0}.  Every evaluator
/// returns jets: the component value together with its directional
/// derivatives along e_s and conj(e_s), so covariant derivatives never need
/// numerical differentiation (finite differences remain available as a
/// cross-check through frame_fn).
struct PointwiseFrameModel {
    int n = 0;
    Eigen::VectorXcd z; // base point
    std::string label;

    /// Structure functions (C, D) of the moving frame at z, with derivatives.
    std::function<std::pair<JetTensor, JetTensor>(const Eigen::VectorXcd&)> structure_fn;

    /// Chern torsion T^j_{ik} at z, with derivatives (closed-form oracle).
    std::function<JetTensor(const Eigen::VectorXcd&)> torsion_fn;

    /// Holomorphic-direction connection coefficients of the t-family at z,
    /// with derivatives (closed-form oracle).
    std::function<JetTensor(const Eigen::VectorXcd&, double)> connection_fn;

    /// (1,1)-block curvature R^{(t)}_{i \bar j k \bar ell} at z with
    /// derivatives, for the t values that admit closed forms (else nullopt).
    std::function<std::optional<JetTensor>(const Eigen::VectorXcd&, double)> curvature_fn;

    /// Frame in coordinates: e_s = sum_a frame_fn(z)(s,a) d/dz_a.  Drives the
    /// central-difference cross-checks of every closed-form derivative.
    std::function<Eigen::MatrixXcd(const Eigen::VectorXcd&)> frame_fn;
};

using Model = std::variant<LieHermitianModel, PointwiseFrameModel>;

/// Structure data evaluated at a point: the common input of every geometric
/// computation.  Lie models produce constant jets; pointwise models evaluate
/// their closed forms at model.z.
struct ModelEval {
    int n = 0;
    bool pointwise = false;
    JetTensor C; // (n,n,n) with derivatives
    JetTensor D; // (n,n,n) with derivatives
    const PointwiseFrameModel* source = nullptr; // set on the pointwise path
};

[[nodiscard]] ModelEval evaluate(const LieHermitianModel& model);
[[nodiscard]] ModelEval evaluate(const PointwiseFrameModel& model);
[[nodiscard]] ModelEval evaluate(const Model& model);

/// Throws Error("InvalidModel") on shape problems, bracket-antisymmetry
/// violation, or Jacobi failure of the reconstructed real bracket.
void validate(const LieHermitianModel& model, const ToleranceContext& ctx);

/// Complexified bracket coefficients: [x_A, x_B] = sum_M F(M,A,B) x_M over
/// the 2n-frame {e_1..e_n, conj(e_1)..conj(e_n)}, as jets.
[[nodiscard]] JetTensor bracket_tensor(const ModelEval& eval);

/// Apply a unitary frame change U (new e'_i = sum_a U_{ia} e_a) to a Lie
/// model; structure constants transform tensorially.
[[nodiscard]] LieHermitianModel change_frame(const LieHermitianModel& model,
                                             const Eigen::MatrixXcd& U);

// ============================================================================
// Forms and the invariant exterior differential
// ============================================================================

/// k-form on the complexified frame: fully antisymmetric component array of
/// shape (2n)^k, entries as jets.  Index A < n means e_A, A >= n means
/// conj(e_{A-n}).
struct KForm {
    int degree = 0;
    int n = 0;
    JetTensor comp;
};

[[nodiscard]] KForm metric_form(const ModelEval& eval);              // omega
[[nodiscard]] KForm constant_form(int degree, int n, const ComplexTensor& values);

/// Exterior differential dalpha(x_0..x_k) = sum_a (−1)^a x_a(alpha(..)) +
/// sum_{a<b} (−1)^{a+b} alpha([x_a,x_b], ..).  The derivative terms come from
/// the input jets; output jets are only valid when the input has constant
/// coefficients (flagged by jets_valid).
struct DifferentialResult {
    KForm form;
    bool jets_valid = false;
};
[[nodiscard]] DifferentialResult ce_differential(const ModelEval& eval, const KForm& form,
                                                 bool input_jets_exact = true);

/// Type projection: keep only components with exactly p unbarred and q barred
/// indices (p + q = degree).
[[nodiscard]] KForm type_part(const KForm& form, int p, int q);

// ============================================================================
// Connections
// ============================================================================

struct TParam {
    std::string kind; // chern | bismut | gauduchon | levi_civita
    double t = 0.0;   // 0 for chern, 2 for bismut, free for gauduchon
};

/// Connection coefficients in the unitary frame.  gamma_hol(j,i,k) is the
/// coefficient Gamma^j_{ik} of e_j in nabla_{e_k} e_i; gamma_antihol(j,i,k)
/// is Gamma^j_{i bar k}, the same in direction conj(e_k).  The Hermitian
/// family has theta skew-Hermitian and no type-mixing terms; the
/// torsion-free reference connection carries its type-mixing block in
/// gamma_mixed(j,i,A) = coefficient of conj(e_j) in nabla_{x_A} e_i.
struct HermitianConnection {
    JetTensor gamma_hol;     // (n,n,n)
    JetTensor gamma_antihol; // (n,n,n)
    TParam t_param;
    std::optional<JetTensor> gamma_mixed; // (n,n,2n), torsion-free tag only
};

/// T(e_i, e_k) = sum_j T(j,i,k) e_j, antisymmetric in (i,k).
struct TorsionTensor {
    JetTensor T; // (n,n,n), storage (j,i,k)
};

/// 4-index curvature slice R(x_A, x_B, e_k, conj(e_l)), shape (2n,2n,n,n).
/// Entries with barred third slot follow from conjugation:
/// R(x_A,x_B, conj(e_k), e_l) = conj(R(x_{A±n}, x_{B±n}, e_k, conj(e_l))),
/// and same-type last pairs vanish for Hermitian connections.
struct CurvatureTensor {
    ComplexTensor R;                 // (2n,2n,n,n) values
    std::optional<JetTensor> jets;   // same shape, when derivatives are known
    [[nodiscard]] Complex at(int A, int B, int k, int l) const { return R(A, B, k, l); }
    /// General last-pair access: zc, wc in 0..2n−1 (barred when >= n).
    [[nodiscard]] Complex slot(int A, int B, int zc, int wc, int n) const;
};

struct RicciSet {
    Eigen::MatrixXcd ric1, ric2, ric3; // n x n, unitary frame
    double s1 = 0.0, s3 = 0.0;         // scalar traces (real parts)
};

struct TorsionDerived {
    Eigen::VectorXcd eta;        // eta_i = sum_k T^k_{ki}
    Eigen::MatrixXcd B;          // B(i,j) = sum_{r,s} T^j_{rs} conj(T^i_{rs})
    Eigen::MatrixXcd phi;        // phi(i,j) = sum_r T^j_{ir} conj(eta_r)
    double torsion_norm_sq = 0.; // |T|^2 = sum over all (j,i,k)
};

// ============================================================================
// Operations
// ============================================================================

/// Chern connection: unique Hermitian connection with (2,0) torsion.  Solved
/// as an explicit real linear system in the unknowns Gamma^j_{ik} and
/// Gamma^j_{i bar k}; throws Error("SingularSystem") on rank deficiency.
[[nodiscard]] std::pair<HermitianConnection, TorsionTensor>
chern_connection(const ModelEval& eval, const ToleranceContext& ctx);

/// t-family: Gamma^{(t)} = Gamma + (t/2) T in holomorphic directions and the
/// conjugate-coupled correction in anti-holomorphic ones.  t=0 reproduces the
/// Chern connection exactly; t=2 is tagged bismut.
[[nodiscard]] HermitianConnection gauduchon_connection(const ModelEval& eval, double t,
                                                       const ToleranceContext& ctx);

/// Torsion-free metric connection from the Koszul formula on the complexified
/// frame (frame pairing constant, so only bracket terms survive).
[[nodiscard]] HermitianConnection levi_civita(const ModelEval& eval,
                                              const ToleranceContext& ctx);

/// Curvature R(x_A,x_B) = [nabla_A, nabla_B] − nabla_{[x_A,x_B]} evaluated on
/// the frame, stored as the (·,·,e,conj e) slice.  Derivative jets are
/// attached when the model supplies them (closed forms) — otherwise and on
/// request, by central differences through the pointwise evaluators.
[[nodiscard]] CurvatureTensor curvature(const ModelEval& eval, const HermitianConnection& conn);

/// Full 4-index curvature of the torsion-free connection over the
/// complexified frame, shape (2n,2n,2n,2n): R(A,B,C,W) = <R(A,B)x_C, x_W>.
[[nodiscard]] ComplexTensor lc_curvature_full(const ModelEval& eval,
                                              const HermitianConnection& lc);

/// Covariant derivative with one extra final slot of size 2n (direction x_A).
[[nodiscard]] ComplexTensor covariant_derivative(const ModelEval& eval,
                                                 const HermitianConnection& conn,
                                                 const TorsionTensor& T);
[[nodiscard]] ComplexTensor covariant_derivative(const ModelEval& eval,
                                                 const HermitianConnection& conn,
                                                 const CurvatureTensor& R);

/// Fill curvature derivative jets by central differences (pointwise models).
void attach_fd_jets(const PointwiseFrameModel& model, const HermitianConnection& conn,
                    CurvatureTensor& curv, double step = 1e-5);

[[nodiscard]] RicciSet ricci(const ModelEval& eval, const CurvatureTensor& curv);

[[nodiscard]] TorsionDerived torsion_derived(const TorsionTensor& T);

// ============================================================================
// Predicates and identity checks
// ============================================================================

struct PredicateOptions {
    std::vector<double> as_t_values = {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0};
};

/// All condition predicates, each as a ConditionReport whose residual honors
/// `holds == (residual <= ctx.abs_tol)`.
[[nodiscard]] std::vector<ConditionReport> predicates(const Model& model,
                                                      const ToleranceContext& ctx,
                                                      const PredicateOptions& opts = {});

/// The unconditional curvature/torsion identities of the t-family plus the
/// hypothesis-gated consequences (difference identities, scalar relations,
/// torsion-B contractions).  Gated entries report their hypothesis status in
/// the witness; a gate that never fires yields witness "vacuous".
[[nodiscard]] std::vector<ConditionReport> check_identities(const Model& model, double t,
                                                            const ToleranceContext& ctx);

/// Data of an admissible frame for a non-balanced model with parallel Bismut
/// torsion: eta aligned to (0,..,0,lambda), the matrix M_{ij} = T^j_{in}
/// diagonalized to diag(a_1..a_{n-1},0).
struct AdmissibleFrame {
    FrameChange change;     // unitary
    double lambda = 0.0;    // |eta|
    Eigen::VectorXcd a;     // a_1..a_n (a_n = 0)
    Eigen::VectorXd b;      // diagonal of B in the new frame
    Eigen::VectorXd delta;  // delta_i per the defining relation b_i = 2|a_i|^2 + 2 delta_i
};

/// Throws Error("Balanced") when |eta| vanishes and Error("NotDiagonalizable")
/// when M fails to be normal within tolerance.
[[nodiscard]] AdmissibleFrame admissible_frame(const Model& model, const ToleranceContext& ctx);

// ============================================================================
// Small helpers shared by tests and the verification drivers
// ============================================================================

/// Gauduchon torsion 1-form eta of a model (Chern torsion contraction).
[[nodiscard]] Eigen::VectorXcd torsion_one_form(const Model& model, const ToleranceContext& ctx);

/// Convenience: evaluate + chern + gauduchon(t) + curvature in one call.
struct GeometryBundle {
    ModelEval eval;
    HermitianConnection chern;
    TorsionTensor torsion;
    HermitianConnection conn_t;
    CurvatureTensor curv_chern;
    CurvatureTensor curv_t;
};
[[nodiscard]] GeometryBundle geometry(const Model& model, double t, const ToleranceContext& ctx);

} // namespace hermlab::liegeom
