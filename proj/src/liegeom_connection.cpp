#include <Eigen/Dense>
#include <cmath>

#include "hermlab/errors.hpp"
#include "hermlab/liegeom.hpp"

namespace hermlab::liegeom {

namespace {

using numlin::values;

std::size_t uz(int a) { return static_cast<std::size_t>(a); }

Jet jet_zero(int n) { return Jet(Complex(0, 0), n); }

int bar(int A, int n) { return (A + n) % (2 * n); }

/// Coefficient of x_M in nabla_{x_A} x_B, with derivative jets.  Covers both
/// the Hermitian family (block diagonal in types) and the torsion-free
/// connection (type-mixing block present).
Jet gamma_full(const HermitianConnection& conn, int n, int M, int B, int A) {
    const bool mBar = M >= n, bBar = B >= n;
    if (!mBar && !bBar) {
        return (A < n) ? conn.gamma_hol(uz(M), uz(B), uz(A))
                       : conn.gamma_antihol(uz(M), uz(B), uz(A - n));
    }
    if (mBar && bBar) {
        const int Ab = bar(A, n);
        const Jet g = (Ab < n) ? conn.gamma_hol(uz(M - n), uz(B - n), uz(Ab))
                               : conn.gamma_antihol(uz(M - n), uz(B - n), uz(Ab - n));
        return conj(g);
    }
    if (!conn.gamma_mixed) return jet_zero(n);
    if (mBar && !bBar) return (*conn.gamma_mixed)(uz(M - n), uz(B), uz(A));
    // coefficient of e_M in nabla_{x_A} conj(e_{B-n})
    return conj((*conn.gamma_mixed)(uz(M), uz(B - n), uz(bar(A, n))));
}

} // namespace

Complex CurvatureTensor::slot(int A, int B, int zc, int wc, int n) const {
    const bool zBar = zc >= n, wBar = wc >= n;
    if (zBar == wBar) return Complex(0, 0); // same-type last pair (Hermitian family)
    if (!zBar) return R(uz(A), uz(B), uz(zc), uz(wc - n));
    // R(x_A, x_B, conj(e_z), e_w) = conj(R over the conjugate frame slots)
    return std::conj(R(uz(bar(A, n)), uz(bar(B, n)), uz(zc - n), uz(wc)));
}

// ============================================================================
// Chern connection
// ============================================================================

std::pair<HermitianConnection, TorsionTensor> chern_connection(const ModelEval& eval,
                                                               const ToleranceContext& ctx) {
    ctx.validate();
    const int n = eval.n;
    const int n3 = n * n * n;

    // Unknown layout: x = [Re/Im Gamma^j_{ik} | Re/Im Gamma^j_{i bar k}].
    auto idxHol = [&](int j, int i, int k) { return (j * n + i) * n + k; };
    auto idxAnti = [&](int j, int i, int k) { return n3 + (j * n + i) * n + k; };

    Eigen::MatrixXd Asys = Eigen::MatrixXd::Zero(4 * n3, 4 * n3);
    Eigen::VectorXd bsys = Eigen::VectorXd::Zero(4 * n3);
    int row = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                // metric compatibility: Gamma^j_{ik} + conj(Gamma^i_{j bar k}) = 0
                Asys(row, 2 * idxHol(j, i, k)) = 1.0;
                Asys(row, 2 * idxAnti(i, j, k)) = 1.0;
                ++row;
                Asys(row, 2 * idxHol(j, i, k) + 1) = 1.0;
                Asys(row, 2 * idxAnti(i, j, k) + 1) = -1.0;
                ++row;
                // (1,1) torsion part: Gamma^j_{i bar k} + conj(D^i_{jk}) = 0
                const Complex d = eval.D(uz(i), uz(j), uz(k)).v;
                Asys(row, 2 * idxAnti(j, i, k)) = 1.0;
                bsys(row) = -d.real();
                ++row;
                Asys(row, 2 * idxAnti(j, i, k) + 1) = 1.0;
                bsys(row) = d.imag();
                ++row;
            }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Asys);
    if (qr.rank() < 4 * n3)
        throw Error("SingularSystem", "connection system rank " + std::to_string(qr.rank()) +
                                          " of " + std::to_string(4 * n3));
    const Eigen::VectorXd x = qr.solve(bsys);
    if ((Asys * x - bsys).cwiseAbs().maxCoeff() > 1e-9)
        throw Error("SingularSystem", "connection system inconsistent");

    HermitianConnection conn;
    conn.t_param = {"chern", 0.0};
    conn.gamma_hol = JetTensor({uz(n), uz(n), uz(n)});
    conn.gamma_antihol = JetTensor({uz(n), uz(n), uz(n)});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                // solved values; derivative slots ride along from the
                // structure functions (Gamma = D, Gamma-bar = −conj(D) swapped)
                Jet gh = eval.D(uz(j), uz(i), uz(k));
                gh.v = Complex(x(2 * idxHol(j, i, k)), x(2 * idxHol(j, i, k) + 1));
                Jet ga = -conj(eval.D(uz(i), uz(j), uz(k)));
                ga.v = Complex(x(2 * idxAnti(j, i, k)), x(2 * idxAnti(j, i, k) + 1));
                conn.gamma_hol(uz(j), uz(i), uz(k)) = gh;
                conn.gamma_antihol(uz(j), uz(i), uz(k)) = ga;
            }

    TorsionTensor T;
    T.T = JetTensor({uz(n), uz(n), uz(n)});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                T.T(uz(j), uz(i), uz(k)) = conn.gamma_hol(uz(j), uz(k), uz(i)) -
                                           conn.gamma_hol(uz(j), uz(i), uz(k)) -
                                           eval.C(uz(j), uz(i), uz(k));
    return {std::move(conn), std::move(T)};
}

// ============================================================================
// t-family
// ============================================================================

HermitianConnection gauduchon_connection(const ModelEval& eval, double t,
                                         const ToleranceContext& ctx) {
    auto [chern, T] = chern_connection(eval, ctx);
    if (t == 0.0) return chern;

    const int n = eval.n;
    HermitianConnection conn = chern;
    conn.t_param = (t == 2.0) ? TParam{"bismut", 2.0} : TParam{"gauduchon", t};
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                conn.gamma_hol(uz(j), uz(i), uz(k)) += (t / 2.0) * T.T(uz(j), uz(i), uz(k));
                conn.gamma_antihol(uz(j), uz(i), uz(k)) -=
                    (t / 2.0) * conj(T.T(uz(i), uz(j), uz(k)));
            }
    return conn;
}

// ============================================================================
// torsion-free connection (Koszul on the complexified frame)
// ============================================================================

HermitianConnection levi_civita(const ModelEval& eval, const ToleranceContext& ctx) {
    ctx.validate();
    const int n = eval.n;
    const int N = 2 * n;
    const JetTensor F = bracket_tensor(eval);

    // 2<nabla_{x_A} x_B, x_P> = <[x_A,x_B],x_P> − <[x_B,x_P],x_A> + <[x_P,x_A],x_B>
    // with <x_P, x_Q> = delta_{P, bar Q}; so the x_M-coefficient is half of
    // the right side at P = bar M.
    auto coeff = [&](int M, int B, int A) -> Jet {
        const int P = bar(M, n);
        Jet r = F(uz(bar(P, n)), uz(A), uz(B)) - F(uz(bar(A, n)), uz(B), uz(P)) +
                F(uz(bar(B, n)), uz(P), uz(A));
        return 0.5 * r;
    };

    HermitianConnection conn;
    conn.t_param = {"levi_civita", 0.0};
    conn.gamma_hol = JetTensor({uz(n), uz(n), uz(n)});
    conn.gamma_antihol = JetTensor({uz(n), uz(n), uz(n)});
    conn.gamma_mixed = JetTensor({uz(n), uz(n), uz(N)});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                conn.gamma_hol(uz(j), uz(i), uz(k)) = coeff(j, i, k);
                conn.gamma_antihol(uz(j), uz(i), uz(k)) = coeff(j, i, n + k);
            }
            for (int A = 0; A < N; ++A)
                (*conn.gamma_mixed)(uz(j), uz(i), uz(A)) = coeff(n + j, i, A);
        }
    return conn;
}

// ============================================================================
// curvature
// ============================================================================

namespace {

/// Full frame matrices of the connection with jets: M(P,Q,A) = coefficient of
/// x_P in nabla_{x_A} x_Q.
JetTensor full_matrices(const HermitianConnection& conn, int n) {
    const int N = 2 * n;
    JetTensor M({uz(N), uz(N), uz(N)});
    for (int P = 0; P < N; ++P)
        for (int Q = 0; Q < N; ++Q)
            for (int A = 0; A < N; ++A) M(uz(P), uz(Q), uz(A)) = gamma_full(conn, n, P, Q, A);
    return M;
}

} // namespace

CurvatureTensor curvature(const ModelEval& eval, const HermitianConnection& conn) {
    const int n = eval.n;
    const int N = 2 * n;
    const JetTensor M = full_matrices(conn, n);
    const JetTensor F = bracket_tensor(eval);

    CurvatureTensor curv;
    curv.R = ComplexTensor({uz(N), uz(N), uz(n), uz(n)});
    for (int A = 0; A < N; ++A)
        for (int B = A + 1; B < N; ++B) {
            Eigen::MatrixXcd RAB = Eigen::MatrixXcd::Zero(N, N);
            for (int P = 0; P < N; ++P)
                for (int Q = 0; Q < N; ++Q) {
                    const Jet& mb = M(uz(P), uz(Q), uz(B));
                    const Jet& ma = M(uz(P), uz(Q), uz(A));
                    Complex v(0, 0);
                    if (mb.n() != 0) v += (A < n) ? mb.dh(A) : mb.da(A - n);
                    if (ma.n() != 0) v -= (B < n) ? ma.dh(B) : ma.da(B - n);
                    for (int S = 0; S < N; ++S)
                        v += M(uz(P), uz(S), uz(A)).v * M(uz(S), uz(Q), uz(B)).v -
                             M(uz(P), uz(S), uz(B)).v * M(uz(S), uz(Q), uz(A)).v;
                    for (int W = 0; W < N; ++W)
                        v -= F(uz(W), uz(A), uz(B)).v * M(uz(P), uz(Q), uz(W)).v;
                    RAB(P, Q) = v;
                }
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    curv.R(uz(A), uz(B), uz(k), uz(l)) = RAB(l, k);
                    curv.R(uz(B), uz(A), uz(k), uz(l)) = -RAB(l, k);
                }
        }

    // Attach derivative jets where they are known exactly.
    if (!eval.pointwise) {
        curv.jets = numlin::as_constant_jets(curv.R, n);
        return curv;
    }
    const PointwiseFrameModel* src = eval.source;
    const std::string& kind = conn.t_param.kind;
    if (src && src->curvature_fn &&
        (kind == "chern" || kind == "bismut" || kind == "gauduchon")) {
        auto block = src->curvature_fn(src->z, conn.t_param.t);
        if (block) {
            // The closed form covers the (1,1) first-slot block.  The same-type
            // first-slot blocks must then vanish identically (checked here on
            // their values); their derivative jets are zero.
            double offType = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            offType = std::max(offType,
                                               std::abs(curv.R(uz(a), uz(b), uz(k), uz(l))));
                            offType = std::max(
                                offType, std::abs(curv.R(uz(n + a), uz(n + b), uz(k), uz(l))));
                        }
            if (offType < 1e-8) {
                JetTensor jets({uz(N), uz(N), uz(n), uz(n)});
                for (std::size_t i = 0; i < jets.size(); ++i) jets.data()[i] = jet_zero(n);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int k = 0; k < n; ++k)
                            for (int l = 0; l < n; ++l) {
                                const Jet& jv = (*block)(uz(a), uz(b), uz(k), uz(l));
                                jets(uz(a), uz(n + b), uz(k), uz(l)) = jv;
                                jets(uz(n + b), uz(a), uz(k), uz(l)) = -jv;
                            }
                // keep engine values authoritative; jets carry the derivatives
                for (std::size_t i = 0; i < jets.size(); ++i)
                    jets.data()[i].v = curv.R.data()[i];
                curv.jets = std::move(jets);
            }
        }
    }
    return curv;
}

ComplexTensor lc_curvature_full(const ModelEval& eval, const HermitianConnection& lc) {
    const int n = eval.n;
    const int N = 2 * n;
    const JetTensor M = full_matrices(lc, n);
    const JetTensor F = bracket_tensor(eval);

    ComplexTensor R({uz(N), uz(N), uz(N), uz(N)});
    for (int A = 0; A < N; ++A)
        for (int B = A + 1; B < N; ++B) {
            Eigen::MatrixXcd RAB = Eigen::MatrixXcd::Zero(N, N);
            for (int P = 0; P < N; ++P)
                for (int Q = 0; Q < N; ++Q) {
                    const Jet& mb = M(uz(P), uz(Q), uz(B));
                    const Jet& ma = M(uz(P), uz(Q), uz(A));
                    Complex v(0, 0);
                    if (mb.n() != 0) v += (A < n) ? mb.dh(A) : mb.da(A - n);
                    if (ma.n() != 0) v -= (B < n) ? ma.dh(B) : ma.da(B - n);
                    for (int S = 0; S < N; ++S)
                        v += M(uz(P), uz(S), uz(A)).v * M(uz(S), uz(Q), uz(B)).v -
                             M(uz(P), uz(S), uz(B)).v * M(uz(S), uz(Q), uz(A)).v;
                    for (int W = 0; W < N; ++W)
                        v -= F(uz(W), uz(A), uz(B)).v * M(uz(P), uz(Q), uz(W)).v;
                    RAB(P, Q) = v;
                }
            // R(A,B,C,W) = <R(A,B) x_C, x_W> = (RAB)_{bar W, C}
            for (int C = 0; C < N; ++C)
                for (int W = 0; W < N; ++W) {
                    R(uz(A), uz(B), uz(C), uz(W)) = RAB(bar(W, n), C);
                    R(uz(B), uz(A), uz(C), uz(W)) = -RAB(bar(W, n), C);
                }
        }
    return R;
}

// ============================================================================
// covariant derivatives
// ============================================================================

ComplexTensor covariant_derivative(const ModelEval& eval, const HermitianConnection& conn,
                                   const TorsionTensor& T) {
    const int n = eval.n;
    const int N = 2 * n;
    ComplexTensor out({uz(n), uz(n), uz(n), uz(N)});
    auto gam = [&](int j, int i, int A) -> Complex {
        return (A < n) ? conn.gamma_hol(uz(j), uz(i), uz(A)).v
                       : conn.gamma_antihol(uz(j), uz(i), uz(A - n)).v;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int A = 0; A < N; ++A) {
                    const Jet& tj = T.T(uz(j), uz(i), uz(k));
                    Complex v(0, 0);
                    if (tj.n() != 0) v += (A < n) ? tj.dh(A) : tj.da(A - n);
                    for (int r = 0; r < n; ++r) {
                        v += gam(j, r, A) * T.T(uz(r), uz(i), uz(k)).v;
                        v -= gam(r, i, A) * T.T(uz(j), uz(r), uz(k)).v;
                        v -= gam(r, k, A) * T.T(uz(j), uz(i), uz(r)).v;
                    }
                    out(uz(j), uz(i), uz(k), uz(A)) = v;
                }
    return out;
}

ComplexTensor covariant_derivative(const ModelEval& eval, const HermitianConnection& conn,
                                   const CurvatureTensor& curv) {
    const int n = eval.n;
    const int N = 2 * n;
    if (eval.pointwise && !curv.jets)
        throw Error("InvalidModel",
                    "curvature derivatives unavailable; attach closed-form or "
                    "finite-difference jets first");

    auto gamVal = [&](int M, int B, int A) { return gamma_full(conn, n, M, B, A).v; };
    ComplexTensor out({uz(N), uz(N), uz(n), uz(n), uz(N)});
    for (int B = 0; B < N; ++B)
        for (int C = 0; C < N; ++C)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int A = 0; A < N; ++A) {
                        Complex v(0, 0);
                        if (curv.jets) {
                            const Jet& rj = (*curv.jets)(uz(B), uz(C), uz(k), uz(l));
                            if (rj.n() != 0) v += (A < n) ? rj.dh(A) : rj.da(A - n);
                        }
                        for (int M = 0; M < N; ++M) {
                            v -= gamVal(M, B, A) * curv.R(uz(M), uz(C), uz(k), uz(l));
                            v -= gamVal(M, C, A) * curv.R(uz(B), uz(M), uz(k), uz(l));
                        }
                        for (int r = 0; r < n; ++r) {
                            v -= gamVal(r, k, A) * curv.R(uz(B), uz(C), uz(r), uz(l));
                            // fourth slot is conj(e_l): conjugate coefficients
                            v -= std::conj(gamVal(r, l, bar(A, n))) *
                                 curv.R(uz(B), uz(C), uz(k), uz(r));
                        }
                        out(uz(B), uz(C), uz(k), uz(l), uz(A)) = v;
                    }
    return out;
}

// ============================================================================
// finite-difference jets for pointwise curvature
// ============================================================================

void attach_fd_jets(const PointwiseFrameModel& model, const HermitianConnection& conn,
                    CurvatureTensor& curv, double step) {
    const int n = model.n;
    const int N = 2 * n;
    const double t = conn.t_param.t;
    const bool isLc = conn.t_param.kind == "levi_civita";
    ToleranceContext ctx; // defaults; the solve tolerances are not used here

    auto evalCurv = [&](const Eigen::VectorXcd& z) -> ComplexTensor {
        PointwiseFrameModel shifted = model;
        shifted.z = z;
        ModelEval ev = evaluate(shifted);
        HermitianConnection c =
            isLc ? levi_civita(ev, ctx) : gauduchon_connection(ev, t, ctx);
        CurvatureTensor cv = curvature(ev, c);
        return cv.R;
    };

    const double h = step * std::max(1.0, model.z.norm());
    const Eigen::MatrixXcd E = model.frame_fn(model.z);

    // coordinate-direction central differences
    std::vector<ComplexTensor> dz(static_cast<std::size_t>(n)), dzb(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        Eigen::VectorXcd zp = model.z, zm = model.z, zpi = model.z, zmi = model.z;
        zp(a) += h;
        zm(a) -= h;
        zpi(a) += Complex(0, h);
        zmi(a) -= Complex(0, h);
        const ComplexTensor fp = evalCurv(zp), fm = evalCurv(zm);
        const ComplexTensor fpi = evalCurv(zpi), fmi = evalCurv(zmi);
        ComplexTensor re = fp - fm;       // 2h * (d/dx)
        ComplexTensor im = fpi - fmi;     // 2h * (d/dy)
        ComplexTensor d({re.shape()}), db({re.shape()});
        for (std::size_t idx = 0; idx < re.size(); ++idx) {
            const Complex fx = re.data()[idx] / (2 * h);
            const Complex fy = im.data()[idx] / (2 * h);
            d.data()[idx] = 0.5 * (fx - Complex(0, 1) * fy);
            db.data()[idx] = 0.5 * (fx + Complex(0, 1) * fy);
        }
        dz[uz(a)] = std::move(d);
        dzb[uz(a)] = std::move(db);
    }

    JetTensor jets(curv.R.shape());
    for (std::size_t idx = 0; idx < jets.size(); ++idx) {
        Jet j(n);
        j.v = curv.R.data()[idx];
        for (int s = 0; s < n; ++s) {
            Complex eh(0, 0), ea(0, 0);
            for (int a = 0; a < n; ++a) {
                eh += E(s, a) * dz[uz(a)].data()[idx];
                ea += std::conj(E(s, a)) * dzb[uz(a)].data()[idx];
            }
            j.dh(s) = eh;
            j.da(s) = ea;
        }
        jets.data()[idx] = j;
    }
    (void)N;
    curv.jets = std::move(jets);
}

} // namespace hermlab::liegeom
