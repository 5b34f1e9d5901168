#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hermlab/errors.hpp"
#include "hermlab/liegeom.hpp"

namespace hermlab::liegeom {

namespace {

using numlin::values;

std::size_t uz(int a) { return static_cast<std::size_t>(a); }

int bar(int A, int n) { return (A + n) % (2 * n); }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace

// ============================================================================
// Ricci contractions
// ============================================================================

RicciSet ricci(const ModelEval& eval, const CurvatureTensor& curv) {
    const int n = eval.n;
    RicciSet rs;
    rs.ric1 = Eigen::MatrixXcd::Zero(n, n);
    rs.ric2 = Eigen::MatrixXcd::Zero(n, n);
    rs.ric3 = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int i = 0; i < n; ++i) {
                rs.ric1(a, b) += curv.R(uz(a), uz(n + b), uz(i), uz(i));
                rs.ric2(a, b) += curv.R(uz(i), uz(n + i), uz(a), uz(b));
                rs.ric3(a, b) += curv.R(uz(i), uz(n + b), uz(a), uz(i));
            }
    rs.s1 = rs.ric1.trace().real();
    rs.s3 = rs.ric3.trace().real();
    return rs;
}

TorsionDerived torsion_derived(const TorsionTensor& T) {
    const int n = static_cast<int>(T.T.shape()[0]);
    TorsionDerived td;
    td.eta = Eigen::VectorXcd::Zero(n);
    td.B = Eigen::MatrixXcd::Zero(n, n);
    td.phi = Eigen::MatrixXcd::Zero(n, n);
    td.torsion_norm_sq = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) td.eta(i) += T.T(uz(k), uz(k), uz(i)).v;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s)
                    td.B(i, j) += T.T(uz(j), uz(r), uz(s)).v * std::conj(T.T(uz(i), uz(r), uz(s)).v);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                td.phi(i, j) += T.T(uz(j), uz(i), uz(r)).v * std::conj(td.eta(r));
    for (std::size_t p = 0; p < T.T.size(); ++p)
        td.torsion_norm_sq += std::norm(T.T.data()[p].v);
    return td;
}

Eigen::VectorXcd torsion_one_form(const Model& model, const ToleranceContext& ctx) {
    ModelEval ev = evaluate(model);
    auto [conn, T] = chern_connection(ev, ctx);
    return torsion_derived(T).eta;
}

// ============================================================================
// geometry bundle
// ============================================================================

GeometryBundle geometry(const Model& model, double t, const ToleranceContext& ctx) {
    GeometryBundle g;
    g.eval = evaluate(model);
    auto [chern, T] = chern_connection(g.eval, ctx);
    g.chern = std::move(chern);
    g.torsion = std::move(T);
    g.conn_t = gauduchon_connection(g.eval, t, ctx);
    g.curv_chern = curvature(g.eval, g.chern);
    g.curv_t = (t == 0.0) ? g.curv_chern : curvature(g.eval, g.conn_t);
    if (g.eval.pointwise) {
        const auto* src = g.eval.source;
        if (!g.curv_chern.jets) attach_fd_jets(*src, g.chern, g.curv_chern);
        if (t != 0.0 && !g.curv_t.jets) attach_fd_jets(*src, g.conn_t, g.curv_t);
    }
    return g;
}

// ============================================================================
// predicates
// ============================================================================

namespace {

/// Realification matrix S with epsilon_a = sum_A S(A,a) x_A for the real
/// orthonormal frame sqrt2 eps_i = e_i + conj(e_i),
/// sqrt2 eps_{n+i} = i (e_i − conj(e_i)).
Eigen::MatrixXcd realify_matrix(int n) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = s;
        S(n + i, i) = s;
        S(i, n + i) = Complex(0, s);
        S(n + i, n + i) = Complex(0, -s);
    }
    return S;
}

/// Bismut torsion 3-form on the complexified frame:
/// H(e_i, e_k, conj(e_j)) = −T^j_{ik}, no same-type triples.
JetTensor bismut_three_form(const TorsionTensor& T, int n) {
    const auto N = uz(2 * n);
    JetTensor H({N, N, N});
    for (std::size_t p = 0; p < H.size(); ++p) H.data()[p] = Jet(Complex(0, 0), n);
    auto setA = [&](int A, int B, int C, const Jet& v) {
        H(uz(A), uz(B), uz(C)) = v;
        H(uz(B), uz(C), uz(A)) = v;
        H(uz(C), uz(A), uz(B)) = v;
        H(uz(B), uz(A), uz(C)) = -v;
        H(uz(A), uz(C), uz(B)) = -v;
        H(uz(C), uz(B), uz(A)) = -v;
    };
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                if (i == k) continue;
                const Jet v = -T.T(uz(j), uz(i), uz(k));
                setA(i, k, n + j, v);
            }
    // conjugate part: H(conj e_i, conj e_k, e_j) = conj(H(e_i,e_k,conj e_j))
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                if (i == k) continue;
                const Jet v = conj(-T.T(uz(j), uz(i), uz(k)));
                setA(n + i, n + k, j, v);
            }
    return H;
}

struct LeeForm {
    std::vector<Jet> psi; // psi(x_A), with derivative jets
    double solve_residual = 0.0;
};

/// Least-squares Lee form from d(omega) = psi ^ omega.  The system matrix
/// depends only on omega (constant coefficients), so the derivative slots of
/// d(omega) propagate through the same solve.
LeeForm lee_form(const ModelEval& eval, const KForm& domega) {
    const int n = eval.n;
    const int N = 2 * n;
    const KForm omega = metric_form(eval);

    std::vector<std::array<int, 3>> rows;
    for (int A = 0; A < N; ++A)
        for (int B = A + 1; B < N; ++B)
            for (int C = B + 1; C < N; ++C) rows.push_back({A, B, C});

    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd Asys = Eigen::MatrixXcd::Zero(m, N);
    for (Eigen::Index r = 0; r < m; ++r) {
        auto [A, B, C] = rows[static_cast<std::size_t>(r)];
        Asys(r, A) += omega.comp(uz(B), uz(C)).v;
        Asys(r, B) -= omega.comp(uz(A), uz(C)).v;
        Asys(r, C) += omega.comp(uz(A), uz(B)).v;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Asys);

    auto solveSlot = [&](auto pick) -> Eigen::VectorXcd {
        Eigen::VectorXcd rhs(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            auto [A, B, C] = rows[static_cast<std::size_t>(r)];
            rhs(r) = pick(domega.comp(uz(A), uz(B), uz(C)));
        }
        return qr.solve(rhs);
    };

    const Eigen::VectorXcd v = solveSlot([](const Jet& j) { return j.v; });
    LeeForm lf;
    lf.psi.resize(uz(N));
    std::vector<Eigen::VectorXcd> dh(uz(n)), da(uz(n));
    for (int s = 0; s < n; ++s) {
        dh[uz(s)] = solveSlot([s](const Jet& j) { return j.n() ? j.dh(s) : Complex(0, 0); });
        da[uz(s)] = solveSlot([s](const Jet& j) { return j.n() ? j.da(s) : Complex(0, 0); });
    }
    for (int A = 0; A < N; ++A) {
        Jet j(n);
        j.v = v(A);
        for (int s = 0; s < n; ++s) {
            j.dh(s) = dh[uz(s)](A);
            j.da(s) = da[uz(s)](A);
        }
        lf.psi[uz(A)] = j;
    }
    // residual of the defining equation
    double res = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
        auto [A, B, C] = rows[static_cast<std::size_t>(r)];
        Complex lhs = v(A) * omega.comp(uz(B), uz(C)).v - v(B) * omega.comp(uz(A), uz(C)).v +
                      v(C) * omega.comp(uz(A), uz(B)).v;
        res = std::max(res, std::abs(lhs - domega.comp(uz(A), uz(B), uz(C)).v));
    }
    lf.solve_residual = res;
    return lf;
}

double max_abs(const numlin::ComplexTensor& t) { return numlin::max_norm(t); }

} // namespace

std::vector<ConditionReport> predicates(const Model& model, const ToleranceContext& ctx,
                                        const PredicateOptions& opts) {
    ctx.validate();
    GeometryBundle g = geometry(model, 2.0, ctx); // Chern + Bismut in one pass
    const int n = g.eval.n;
    const int N = 2 * n;
    std::vector<ConditionReport> out;

    const ComplexTensor Tval = values(g.torsion.T);
    const TorsionDerived td = torsion_derived(g.torsion);

    out.push_back(make_condition("kahler", max_abs(Tval), ctx.abs_tol));
    out.push_back(make_condition("balanced", td.eta.size() ? td.eta.cwiseAbs().maxCoeff() : 0.0,
                                 ctx.abs_tol));

    // pluriclosed: the (2,2) part of d applied to the (1,2) part of d(omega)
    {
        const KForm omega = metric_form(g.eval);
        DifferentialResult dw = ce_differential(g.eval, omega);
        KForm dbar = type_part(dw.form, 1, 2);
        DifferentialResult ddbar = ce_differential(g.eval, dbar, dw.jets_valid);
        KForm part = type_part(ddbar.form, 2, 2);
        out.push_back(make_condition("pluriclosed", max_abs(values(part.comp)), ctx.abs_tol));
    }

    // Kaehler-like curvature symmetry, for the Chern and Bismut connections
    auto kahlerLike = [&](const CurvatureTensor& curv, const std::string& name) {
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        res = std::max(res, std::abs(curv.R(uz(i), uz(j), uz(k), uz(l))));
                        res = std::max(res,
                                       std::abs(curv.R(uz(i), uz(n + j), uz(k), uz(l)) -
                                                curv.R(uz(k), uz(n + j), uz(i), uz(l))));
                    }
        out.push_back(make_condition(name, res, ctx.abs_tol));
    };
    kahlerLike(g.curv_chern, "kahler_like_chern");
    kahlerLike(g.curv_t, "kahler_like_bismut");

    // parallel Bismut torsion
    const ComplexTensor nablaT_b = covariant_derivative(g.eval, g.conn_t, g.torsion);
    out.push_back(make_condition("btp", max_abs(nablaT_b), ctx.abs_tol));

    // Bismut curvature pair symmetry R^b_{i bar j k bar l} = R^b_{k bar l i bar j}
    {
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        res = std::max(res, std::abs(g.curv_t.R(uz(i), uz(n + j), uz(k), uz(l)) -
                                                     g.curv_t.R(uz(k), uz(n + l), uz(i), uz(j))));
        out.push_back(make_condition("btp_symmetry", res, ctx.abs_tol));
    }

    // Ambrose-Singer along the requested t-grid
    for (double t : opts.as_t_values) {
        GeometryBundle gt = (t == 2.0) ? g : geometry(model, t, ctx);
        const HermitianConnection& conn = gt.conn_t;
        const ComplexTensor nT = covariant_derivative(gt.eval, conn, gt.torsion);
        double res = max_abs(nT);
        if (res <= ctx.abs_tol) { // short-circuit: parallel torsion first
            const ComplexTensor nR = covariant_derivative(gt.eval, conn, gt.curv_t);
            res = std::max(res, max_abs(nR));
        }
        out.push_back(make_condition("as(t=" + fmt(t) + ")", res, ctx.abs_tol));
    }

    // Vaisman: d(omega) = psi ^ omega with psi parallel for the torsion-free
    // connection.  Degenerate (Kaehler) input reports an undefined Lee form.
    {
        const KForm omega = metric_form(g.eval);
        DifferentialResult dw = ce_differential(g.eval, omega);
        const double dwNorm = max_abs(values(dw.form.comp));
        if (dwNorm <= ctx.abs_tol) {
            ConditionReport r;
            r.name = "vaisman";
            r.holds = false;
            r.residual = std::numeric_limits<double>::infinity();
            r.witness = "VaismanUndefined: d(omega) = 0, Lee form degenerate";
            out.push_back(r);
        } else {
            LeeForm lf = lee_form(g.eval, dw.form);
            if (lf.solve_residual > ctx.abs_tol) {
                ConditionReport r;
                r.name = "vaisman";
                r.holds = false;
                r.residual = std::numeric_limits<double>::infinity();
                r.witness = "VaismanUndefined: no Lee form solves d(omega) = psi ^ omega "
                            "(best residual " +
                            fmt(lf.solve_residual) + ")";
                out.push_back(r);
            } else {
                const HermitianConnection lc = levi_civita(g.eval, ctx);
                double res = lf.solve_residual;
                for (int A = 0; A < N; ++A)
                    for (int B = 0; B < N; ++B) {
                        const Jet& pj = lf.psi[uz(B)];
                        Complex v = (A < n) ? pj.dh(A) : pj.da(A - n);
                        for (int M = 0; M < N; ++M) {
                            // coefficient of x_M in nabla_{x_A} x_B
                            Jet gm = [&]() -> Jet {
                                if (B < n) {
                                    if (M < n)
                                        return (A < n) ? lc.gamma_hol(uz(M), uz(B), uz(A))
                                                       : lc.gamma_antihol(uz(M), uz(B), uz(A - n));
                                    return (*lc.gamma_mixed)(uz(M - n), uz(B), uz(A));
                                }
                                const int Ab = bar(A, n);
                                if (M >= n) {
                                    return conj((Ab < n)
                                                    ? lc.gamma_hol(uz(M - n), uz(B - n), uz(Ab))
                                                    : lc.gamma_antihol(uz(M - n), uz(B - n),
                                                                       uz(Ab - n)));
                                }
                                return conj((*lc.gamma_mixed)(uz(M), uz(B - n), uz(Ab)));
                            }();
                            v -= gm.v * lf.psi[uz(M)].v;
                        }
                        res = std::max(res, std::abs(v));
                    }
                out.push_back(make_condition("vaisman", res, ctx.abs_tol,
                                             "|psi| = " + fmt([&] {
                                                 double s = 0;
                                                 for (int i = 0; i < n; ++i)
                                                     s += 2 * std::norm(lf.psi[uz(i)].v);
                                                 return std::sqrt(s);
                                             }())));
            }
        }
    }

    // Compatibility pair: Bismut torsion 3-form closed, and the torsion-free
    // Ricci fully determined by it
    {
        const JetTensor H = bismut_three_form(g.torsion, n);
        KForm Hform;
        Hform.degree = 3;
        Hform.n = n;
        Hform.comp = H;
        DifferentialResult dH = ce_differential(g.eval, Hform);
        double res = max_abs(values(dH.form.comp));

        const HermitianConnection lc = levi_civita(g.eval, ctx);
        const ComplexTensor Rfull = lc_curvature_full(g.eval, lc);
        const Eigen::MatrixXcd S = realify_matrix(n);

        // realified torsion form and curvature contraction
        std::vector<double> HR(uz(N * N * N), 0.0);
        auto hr = [&](int a, int b, int c) -> double& { return HR[uz((a * N + b) * N + c)]; };
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                for (int c = 0; c < N; ++c) {
                    Complex acc(0, 0);
                    for (int A = 0; A < N; ++A)
                        for (int B = 0; B < N; ++B)
                            for (int C = 0; C < N; ++C)
                                acc += S(A, a) * S(B, b) * S(C, c) * H(uz(A), uz(B), uz(C)).v;
                    hr(a, b, c) = acc.real();
                }
        Eigen::MatrixXd ricg = Eigen::MatrixXd::Zero(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                Complex acc(0, 0);
                for (int m = 0; m < N; ++m)
                    for (int A = 0; A < N; ++A)
                        for (int B = 0; B < N; ++B)
                            for (int C = 0; C < N; ++C)
                                for (int W = 0; W < N; ++W)
                                    acc += S(A, m) * S(B, a) * S(C, b) * S(W, m) *
                                           Rfull(uz(A), uz(B), uz(C), uz(W));
                ricg(a, b) = acc.real();
            }
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                double pair = 0.0;
                for (int c = 0; c < N; ++c)
                    for (int d = 0; d < N; ++d) pair += hr(a, c, d) * hr(b, c, d);
                res = std::max(res, std::abs(ricg(a, b) - 0.25 * pair));
            }
        out.push_back(make_condition("brf_pair", res, ctx.abs_tol));
    }

    return out;
}

// ============================================================================
// identity checks
// ============================================================================

std::vector<ConditionReport> check_identities(const Model& model, double t,
                                              const ToleranceContext& ctx) {
    ctx.validate();
    GeometryBundle g = geometry(model, t, ctx);
    const int n = g.eval.n;
    std::vector<ConditionReport> out;

    const ComplexTensor T = values(g.torsion.T);
    const ComplexTensor nablaT = covariant_derivative(g.eval, g.conn_t, g.torsion);
    const ComplexTensor& Rc = g.curv_chern.R;  // Chern curvature
    const ComplexTensor& Rt = g.curv_t.R;      // t-family curvature
    auto Tc = [&](int j, int i, int k) { return T(uz(j), uz(i), uz(k)); };
    // comma-derivative with respect to the t-connection, anti-holomorphic slot
    auto Tder = [&](int l, int i, int k, int jbar) {
        return nablaT(uz(l), uz(i), uz(k), uz(n + jbar));
    };

    // torsion first Bianchi: derivative of torsion against the Chern
    // curvature asymmetry plus quadratic torsion terms
    {
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Complex acc = Tder(l, i, k, j) + Rc(uz(i), uz(n + j), uz(k), uz(l)) -
                                      Rc(uz(k), uz(n + j), uz(i), uz(l));
                        for (int r = 0; r < n; ++r)
                            acc += (t / 2.0) *
                                   (Tc(l, i, r) * std::conj(Tc(k, j, r)) -
                                    Tc(l, k, r) * std::conj(Tc(i, j, r)) -
                                    Tc(r, i, k) * std::conj(Tc(r, j, l)));
                        res = std::max(res, std::abs(acc));
                    }
        out.push_back(make_condition("first_bianchi_torsion", res, ctx.abs_tol));
    }

    // curvature expansion of the t-family against the Chern curvature
    {
        double res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Complex acc = Rt(uz(i), uz(n + j), uz(k), uz(l)) -
                                      Rc(uz(i), uz(n + j), uz(k), uz(l)) -
                                      (t / 2.0) * (Tder(l, i, k, j) + std::conj(Tder(k, j, l, i)));
                        for (int r = 0; r < n; ++r)
                            acc += (t * t / 4.0) *
                                   (Tc(j, i, r) * std::conj(Tc(k, l, r)) +
                                    Tc(l, k, r) * std::conj(Tc(i, j, r)) +
                                    Tc(r, i, k) * std::conj(Tc(r, j, l)) -
                                    Tc(l, i, r) * std::conj(Tc(k, j, r)));
                        res = std::max(res, std::abs(acc));
                    }
        out.push_back(make_condition("t_curvature_expansion", res, ctx.abs_tol));
    }

    // Bismut-vs-Chern difference under parallel Bismut torsion
    {
        GeometryBundle gb = (t == 2.0) ? g : geometry(model, 2.0, ctx);
        const ComplexTensor nTb = covariant_derivative(gb.eval, gb.conn_t, gb.torsion);
        const bool btp = max_abs(nTb) <= ctx.abs_tol;
        if (!btp) {
            ConditionReport r;
            r.name = "btp_curvature_difference";
            r.holds = true;
            r.residual = 0.0;
            r.witness = "vacuous: torsion not parallel for the skew-torsion connection";
            out.push_back(r);
        } else {
            const ComplexTensor& Rb = gb.curv_t.R;
            const ComplexTensor& Rch = gb.curv_chern.R;
            double res = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            Complex acc = Rch(uz(i), uz(n + j), uz(k), uz(l)) -
                                          Rb(uz(k), uz(n + j), uz(i), uz(l));
                            for (int r = 0; r < n; ++r)
                                acc -= Tc(j, k, r) * std::conj(Tc(i, l, r));
                            res = std::max(res, std::abs(acc));
                        }
            out.push_back(make_condition("btp_curvature_difference", res, ctx.abs_tol));

            // trace consequence: ric1(chern) − ric3(bismut) = B
            const RicciSet rc = ricci(gb.eval, gb.curv_chern);
            const RicciSet rb = ricci(gb.eval, gb.curv_t);
            const TorsionDerived td = torsion_derived(gb.torsion);
            const double tres = numlin::max_norm(
                Eigen::MatrixXcd(rc.ric1 - rb.ric3 - td.B));
            out.push_back(make_condition("btp_ricci_difference", tres, ctx.abs_tol));

            // torsion/B contraction under vanishing third Ricci of the
            // skew-torsion connection
            if (numlin::max_norm(rb.ric3) <= ctx.abs_tol) {
                double lres = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            Complex acc(0, 0);
                            for (int r = 0; r < n; ++r)
                                acc += Tc(j, r, k) * td.B(i, r) + Tc(j, i, r) * td.B(k, r) -
                                       Tc(r, i, k) * td.B(r, j);
                            lres = std::max(lres, std::abs(acc));
                        }
                out.push_back(
                    make_condition("btp_ricci_flat_torsion_relation", lres, ctx.abs_tol));
            } else {
                ConditionReport r;
                r.name = "btp_ricci_flat_torsion_relation";
                r.holds = true;
                r.residual = 0.0;
                r.witness = "vacuous: third Ricci of the skew-torsion connection nonzero";
                out.push_back(r);
            }
        }
    }

    // Ricci comparison on torsion-parallel models of the t-family (t != 2)
    {
        const ComplexTensor nTt = covariant_derivative(g.eval, g.conn_t, g.torsion);
        double nRt = 0.0;
        if (max_abs(nTt) <= ctx.abs_tol)
            nRt = max_abs(covariant_derivative(g.eval, g.conn_t, g.curv_t));
        const bool as = max_abs(nTt) <= ctx.abs_tol && nRt <= ctx.abs_tol;
        if (!as || t == 2.0) {
            ConditionReport r;
            r.name = "as_ricci_comparison";
            r.holds = true;
            r.residual = 0.0;
            r.witness = (t == 2.0) ? "vacuous: comparison excludes the skew-torsion value t = 2"
                                   : "vacuous: connection not Ambrose-Singer at this t";
            out.push_back(r);
        } else {
            const RicciSet rt = ricci(g.eval, g.curv_t);
            const RicciSet rc = ricci(g.eval, g.curv_chern);
            const TorsionDerived td = torsion_derived(g.torsion);
            double res = 0.0;
            res = std::max(res, numlin::max_norm(Eigen::MatrixXcd(rt.ric1 - rc.ric1)));
            res = std::max(res, numlin::max_norm(Eigen::MatrixXcd(rc.ric1 - rc.ric3)));
            res = std::max(res, numlin::max_norm(Eigen::MatrixXcd(
                                    rt.ric3 - rc.ric3 + (t * t / 4.0) * td.B)));
            res = std::max(res, std::abs(rt.s3 - rc.s3 + (t * t / 4.0) * td.torsion_norm_sq));
            out.push_back(make_condition("as_ricci_comparison", res, ctx.abs_tol,
                                         "hypothesis: torsion and curvature parallel, t != 2"));
        }

        // balanced + first-Ricci formula + torsion/B contraction under
        // vanishing third Ricci of an Ambrose-Singer t-connection, t not 0 or 2
        const bool gate = as && t != 0.0 && t != 2.0 &&
                          numlin::max_norm(ricci(g.eval, g.curv_t).ric3) <= ctx.abs_tol;
        if (!gate) {
            ConditionReport r;
            r.name = "as_ricci_flat_balanced_relation";
            r.holds = true;
            r.residual = 0.0;
            r.witness = "vacuous: needs Ambrose-Singer, t outside {0,2}, and vanishing third "
                        "Ricci of the t-connection";
            out.push_back(r);
        } else {
            const TorsionDerived td = torsion_derived(g.torsion);
            const RicciSet rc = ricci(g.eval, g.curv_chern);
            double res = td.eta.size() ? td.eta.cwiseAbs().maxCoeff() : 0.0; // balanced
            res = std::max(res, numlin::max_norm(Eigen::MatrixXcd(
                                    rc.ric1 - (t * t / 4.0) * td.B)));
            double lres = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        Complex acc(0, 0);
                        for (int r = 0; r < n; ++r)
                            acc += t * Tc(j, r, k) * td.B(i, r) + t * Tc(j, i, r) * td.B(k, r) -
                                   2.0 * (t - 1.0) * Tc(r, i, k) * td.B(r, j);
                        lres = std::max(lres, std::abs(acc));
                    }
            res = std::max(res, lres);
            out.push_back(make_condition("as_ricci_flat_balanced_relation", res, ctx.abs_tol,
                                         "hypothesis met (non-vacuous)"));
        }
    }

    return out;
}

// ============================================================================
// admissible frame
// ============================================================================

AdmissibleFrame admissible_frame(const Model& model, const ToleranceContext& ctx) {
    ctx.validate();
    GeometryBundle g = geometry(model, 2.0, ctx);
    const int n = g.eval.n;
    const ComplexTensor T = values(g.torsion.T);
    const TorsionDerived td0 = torsion_derived(g.torsion);

    const double lambda = td0.eta.norm();
    if (lambda <= ctx.abs_tol) throw Error("Balanced", "torsion 1-form vanishes");

    // unitary rotation sending eta to lambda * e_n (Householder + phase fix)
    Eigen::VectorXcd v = td0.eta / lambda;
    Eigen::MatrixXcd P;
    {
        Eigen::VectorXcd en = Eigen::VectorXcd::Zero(n);
        en(n - 1) = 1.0;
        const Complex vn = v(n - 1);
        const Complex alpha = (std::abs(vn) > 1e-14) ? -vn / std::abs(vn) : Complex(-1, 0);
        Eigen::VectorXcd w = v - alpha * en;
        const double wn2 = w.squaredNorm();
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(n, n);
        if (wn2 > 1e-28) H -= (2.0 / wn2) * (w * w.adjoint());
        // H maps v to alpha e_n; rescale the last row to make it exactly +1
        P = H;
        P.row(n - 1) *= std::conj(alpha);
    }

    auto transform = [&](const Eigen::MatrixXcd& U) {
        ComplexTensor Tt({uz(n), uz(n), uz(n)});
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Complex acc(0, 0);
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            for (int c = 0; c < n; ++c)
                                acc += U(i, a) * U(j, b) * std::conj(U(m, c)) * T(uz(c), uz(a), uz(b));
                    Tt(uz(m), uz(i), uz(j)) = acc;
                }
        return Tt;
    };

    ComplexTensor T1 = transform(P);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = T1(uz(j), uz(i), uz(n - 1));

    const double mScale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M * M.adjoint() - M.adjoint() * M).cwiseAbs().maxCoeff() > 1e-8 * mScale * mScale)
        throw Error("NotDiagonalizable", "torsion endomorphism along eta is not normal");

    // normal with zero row n  =>  zero column n; diagonalize the leading block
    Eigen::MatrixXcd M0 = M.topLeftCorner(n - 1, n - 1);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(n, n);
    if (n > 1) {
        Eigen::ComplexSchur<Eigen::MatrixXcd> schur(M0);
        Eigen::MatrixXcd U = schur.matrixT();
        Eigen::MatrixXcd Q = schur.matrixU();
        double offdiag = 0.0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j)
                if (i != j) offdiag = std::max(offdiag, std::abs(U(i, j)));
        if (offdiag > 1e-8 * mScale)
            throw Error("NotDiagonalizable", "Schur form of the torsion endomorphism "
                                             "is not diagonal");
        // deterministic eigenvalue order: descending by real part, then imag
        std::vector<int> perm(static_cast<std::size_t>(n - 1));
        for (int i = 0; i < n - 1; ++i) perm[uz(i)] = i;
        std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
            const Complex x = U(a, a), y = U(b, b);
            if (std::abs(x.real() - y.real()) > 1e-12) return x.real() > y.real();
            return x.imag() > y.imag();
        });
        Eigen::MatrixXcd Qh = Q.adjoint();
        W.setZero();
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j) W(i, j) = Qh(perm[uz(i)], j);
        W(n - 1, n - 1) = 1.0;
    }

    Eigen::MatrixXcd Ptotal = W * P;
    // fix free phases (rows 1..n−1) for a canonical output
    for (int i = 0; i < n - 1; ++i) {
        int best = 0;
        double bestAbs = -1.0;
        for (int j = 0; j < n; ++j)
            if (std::abs(Ptotal(i, j)) > bestAbs + 1e-14) {
                bestAbs = std::abs(Ptotal(i, j));
                best = j;
            }
        if (bestAbs > 0)
            Ptotal.row(i) *= std::conj(Ptotal(i, best)) / std::abs(Ptotal(i, best));
    }

    ComplexTensor T2 = transform(Ptotal);
    AdmissibleFrame af;
    af.change.matrix = Ptotal;
    af.change.kind = "unitary";
    af.lambda = lambda;
    af.a = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n - 1; ++i) af.a(i) = T2(uz(i), uz(i), uz(n - 1));
    // residual checks of the construction
    double diagRes = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) diagRes = std::max(diagRes, std::abs(T2(uz(j), uz(i), uz(n - 1))));
    Complex suma(0, 0);
    for (int i = 0; i < n - 1; ++i) suma += af.a(i);
    if (diagRes > 1e-7 * mScale || std::abs(suma - Complex(lambda, 0)) > 1e-7 * std::max(1.0, lambda))
        throw Error("NotDiagonalizable", "admissible frame residuals too large");

    TorsionTensor T2t;
    T2t.T = numlin::as_constant_jets(T2, n);
    const TorsionDerived td2 = torsion_derived(T2t);
    af.b = Eigen::VectorXd::Zero(n);
    af.delta = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        af.b(i) = td2.B(i, i).real();
        double d = 0.0;
        for (int j = 0; j < n - 1; ++j)
            for (int k = j + 1; k < n - 1; ++k) d += std::norm(T2(uz(i), uz(j), uz(k)));
        af.delta(i) = d;
    }
    return af;
}

} // namespace hermlab::liegeom
