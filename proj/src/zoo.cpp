#include <cmath>
#include <optional>
#include <utility>

#include "hermlab/errors.hpp"
#include "hermlab/zoo.hpp"

namespace hermlab::zoo {

namespace {

using numlin::Jet;
using numlin::JetTensor;

std::size_t uz(int a) { return static_cast<std::size_t>(a); }

void fill_zero_jets(JetTensor& t, int n) {
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = Jet(n);
}

/// u_i = conj(z_i)/|z| together with its exact frame derivatives
///   e_s(u_i) = -u_i u_s / 2,   conj(e_s)(u_i) = delta_is - u_i conj(u_s) / 2.
std::vector<Jet> hopf_u(int n, const Eigen::VectorXcd& z) {
    if (z.size() != n) throw Error("InvalidModel", "hopf base point has wrong dimension");
    const double r = z.norm();
    if (!(r > 0.0)) throw Error("InvalidModel", "hopf base point must be nonzero");
    std::vector<Jet> u;
    u.reserve(uz(n));
    Eigen::VectorXcd uv = z.conjugate() / r;
    for (int i = 0; i < n; ++i) {
        Jet j(n);
        j.v = uv(i);
        for (int s = 0; s < n; ++s) {
            j.dh(s) = -0.5 * uv(i) * uv(s);
            j.da(s) = (i == s ? Complex(1, 0) : Complex(0, 0)) - 0.5 * uv(i) * std::conj(uv(s));
        }
        u.push_back(std::move(j));
    }
    return u;
}

}  // namespace

// ============================================================================
// Builders
// ============================================================================

liegeom::Model hopf(int n, const Eigen::VectorXcd& z) {
    if (n < 2) throw Error("InvalidModel", "hopf needs complex dimension >= 2");
    (void)hopf_u(n, z);  // validate the base point eagerly
    liegeom::PointwiseFrameModel m;
    m.n = n;
    m.z = z;
    m.label = "hopf(" + std::to_string(n) + ")";

    m.structure_fn = [n](const Eigen::VectorXcd& zz) {
        const std::vector<Jet> u = hopf_u(n, zz);
        JetTensor C({uz(n), uz(n), uz(n)});
        JetTensor D({uz(n), uz(n), uz(n)});
        fill_zero_jets(C, n);
        fill_zero_jets(D, n);
        // [e_i, e_j] = (u_i/2) e_j - (u_j/2) e_i
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Jet v(n);
                    if (k == j) v += 0.5 * u[uz(i)];
                    if (k == i) v -= 0.5 * u[uz(j)];
                    C(uz(k), uz(i), uz(j)) = v;
                }
        // [e_i, conj(e_j)] = (u_i/2) conj(e_j) - (conj(u_j)/2) e_i
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) D(uz(a), uz(a), uz(c)) = -0.5 * u[uz(c)];
        return std::make_pair(std::move(C), std::move(D));
    };

    m.curvature_fn = [n](const Eigen::VectorXcd& zz, double t) -> std::optional<JetTensor> {
        const bool chern = std::abs(t) < 1e-14;
        const bool skew = std::abs(t - 2.0) < 1e-14;
        if (!chern && !skew) return std::nullopt;
        const std::vector<Jet> u = hopf_u(n, zz);
        auto ub = [&](int i) { return conj(u[uz(i)]); };
        const Jet one = Jet::constant(Complex(1, 0), n);
        JetTensor B({uz(n), uz(n), uz(n), uz(n)});
        fill_zero_jets(B, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Jet v(n);
                        if (chern) {
                            if (k == l) {
                                if (a == b) v += one;
                                v -= u[uz(a)] * ub(b);
                            }
                        } else {
                            if (a == l && k == b) v += one;
                            if (a == b && k == l) v -= one;
                            if (k == l) v += u[uz(a)] * ub(b);
                            if (a == b) v += u[uz(k)] * ub(l);
                            if (k == b) v -= u[uz(a)] * ub(l);
                            if (a == l) v -= u[uz(k)] * ub(b);
                        }
                        B(uz(a), uz(b), uz(k), uz(l)) = v;
                    }
        return B;
    };

    m.frame_fn = [n](const Eigen::VectorXcd& zz) {
        return Eigen::MatrixXcd(zz.norm() * Eigen::MatrixXcd::Identity(n, n));
    };
    return m;
}

liegeom::Model hopf_base(int n) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    z(0) = Complex(1, 0);
    return hopf(n, z);
}

liegeom::Model almost_abelian(Complex lambda, const Eigen::VectorXcd& v,
                              const Eigen::MatrixXcd& A) {
    const int m = static_cast<int>(A.rows());
    if (A.cols() != m || v.size() != m)
        throw Error("InvalidModel", "almost_abelian shape mismatch");
    const int n = m + 1;
    liegeom::LieHermitianModel model;
    model.n = n;
    model.C = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.D = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.label = "almost-abelian(" + std::to_string(n) + ")";
    model.D(0, 0, 0) = lambda;
    for (int i = 1; i < n; ++i) {
        model.D(0, uz(i), 0) = v(i - 1);
        for (int j = 1; j < n; ++j) model.D(uz(j), uz(i), 0) = A(i - 1, j - 1);
    }
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const Complex c = -std::conj(A(j - 1, i - 1));
            model.C(uz(j), 0, uz(i)) = c;
            model.C(uz(j), uz(i), 0) = -c;
        }
    return model;
}

liegeom::Model nilpotent(int n, int r, const Eigen::MatrixXcd& Y) {
    if (r < 1 || r >= n || Y.rows() != n - r || Y.cols() != r)
        throw Error("InvalidModel", "nilpotent shape mismatch");
    for (int al = 0; al < n - r; ++al)
        if (std::abs(Y.row(al).sum()) > 1e-12)
            throw Error("BadRowSum", "row " + std::to_string(al) +
                                         " of the nilpotent parameter matrix must sum to zero");
    liegeom::LieHermitianModel model;
    model.n = n;
    model.C = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.D = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.label = "nilpotent(" + std::to_string(n) + "," + std::to_string(r) + ")";
    for (int al = 0; al < n - r; ++al)
        for (int a = 0; a < r; ++a) model.D(uz(a), uz(r + al), uz(a)) = -std::conj(Y(al, a));
    return model;
}

liegeom::Model complex_simple(const std::string& name) {
    if (name != "sl2") throw Error("UnknownModel", "unsupported complex simple model '" + name + "'");
    liegeom::LieHermitianModel model;
    model.n = 3;
    model.C = numlin::ComplexTensor({3, 3, 3});
    model.D = numlin::ComplexTensor({3, 3, 3});
    model.label = "sl2c";
    const double c = 1.0 / std::sqrt(2.0);
    const int cyc[3][3] = {{2, 0, 1}, {0, 1, 2}, {1, 2, 0}};
    for (const auto& t : cyc) {
        model.C(uz(t[0]), uz(t[1]), uz(t[2])) = c;
        model.C(uz(t[0]), uz(t[2]), uz(t[1])) = -c;
    }
    return model;
}

liegeom::Model abelian(int n) {
    liegeom::LieHermitianModel model;
    model.n = n;
    model.C = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.D = numlin::ComplexTensor({uz(n), uz(n), uz(n)});
    model.label = "abelian(" + std::to_string(n) + ")";
    return model;
}

holsys::HolonomySystem symmetric_space_system(const std::string& family, int n) {
    if (n < 1) throw Error("InvalidModel", "symmetric space dimension must be positive");
    holsys::HolonomySystem sys;
    if (family == "sphere") {
        const int d = n;
        sys.dim = d;
        sys.H = Eigen::MatrixXd::Identity(d, d);
        sys.label = "sphere(" + std::to_string(n) + ")";
        sys.Rm = holsys::RealTensor({uz(d), uz(d), uz(d), uz(d)});
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e)
                        sys.Rm(uz(a), uz(b), uz(c), uz(e)) =
                            (b == c && a == e ? 1.0 : 0.0) - (a == c && b == e ? 1.0 : 0.0);
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
                M(a, b) = 1.0;
                M(b, a) = -1.0;
                sys.g_basis.push_back(M);
            }
        return sys;
    }
    if (family == "cpn") {
        const int d = 2 * n;
        sys.dim = d;
        sys.H = Eigen::MatrixXd::Identity(d, d);
        sys.label = "cpn(" + std::to_string(n) + ")";
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            J(n + i, i) = 1.0;
            J(i, n + i) = -1.0;
        }
        sys.J = J;
        sys.Rm = holsys::RealTensor({uz(d), uz(d), uz(d), uz(d)});
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e)
                        sys.Rm(uz(a), uz(b), uz(c), uz(e)) =
                            (b == c && a == e ? 1.0 : 0.0) - (a == c && b == e ? 1.0 : 0.0) +
                            J(c, b) * J(e, a) - J(c, a) * J(e, b) - 2.0 * J(b, a) * J(e, c);
        // realified u(n): X + iY acting on C^n maps to [[X, -Y], [Y, X]]
        auto push_complex = [&](const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
            M.topLeftCorner(n, n) = X;
            M.bottomRightCorner(n, n) = X;
            M.topRightCorner(n, n) = -Y;
            M.bottomLeftCorner(n, n) = Y;
            sys.g_basis.push_back(M);
        };
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
                X(k, l) = 1.0;
                X(l, k) = -1.0;
                push_complex(X, Eigen::MatrixXd::Zero(n, n));
                Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
                Y(k, l) = 1.0;
                Y(l, k) = 1.0;
                push_complex(Eigen::MatrixXd::Zero(n, n), Y);
            }
        for (int k = 0; k < n; ++k) {
            Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
            Y(k, k) = 1.0;
            push_complex(Eigen::MatrixXd::Zero(n, n), Y);
        }
        return sys;
    }
    if (family == "flat") {
        sys.dim = n;
        sys.H = Eigen::MatrixXd::Identity(n, n);
        sys.label = "flat(" + std::to_string(n) + ")";
        sys.Rm = holsys::RealTensor({uz(n), uz(n), uz(n), uz(n)});
        return sys;
    }
    throw Error("UnknownModel", "unknown symmetric space family '" + family + "'");
}

// ============================================================================
// Curated entries
// ============================================================================

namespace {

ExpectedValue ev(std::string name, double value, double tol = 1e-9) {
    return ExpectedValue{std::move(name), value, tol};
}

ZooEntry build_entry(const std::string& name) {
    if (name == "hopf2@p")
        return {name,
                hopf_base(2),
                {ev("chern_curvature_max", 1.0), ev("bismut_curvature_max", 0.0),
                 ev("eta_norm", 1.0), ev("torsion_norm_sq", 2.0), ev("btp_residual", 0.0),
                 ev("bas_residual", 0.0), ev("vaisman_residual", 0.0)}};
    if (name == "hopf3@p")
        return {name,
                hopf_base(3),
                {ev("chern_curvature_max", 1.0), ev("bismut_curvature_max", 1.0),
                 ev("bismut_r2233_real", -1.0), ev("eta_norm", 2.0), ev("torsion_norm_sq", 4.0),
                 ev("btp_residual", 0.0), ev("bas_residual", 0.0), ev("vaisman_residual", 0.0)}};
    if (name == "hopf4@p")
        return {name,
                hopf_base(4),
                {ev("chern_curvature_max", 1.0), ev("bismut_curvature_max", 1.0),
                 ev("bismut_r2233_real", -1.0), ev("eta_norm", 3.0), ev("torsion_norm_sq", 6.0),
                 ev("btp_residual", 0.0), ev("bas_residual", 0.0), ev("vaisman_residual", 0.0)}};
    if (name == "hopf3_generic") {
        Eigen::VectorXcd z(3);
        z << Complex(0.7, 0.2), Complex(-0.4, 0.1), Complex(0.3, -0.5);
        return {name,
                hopf(3, z),
                {ev("eta_norm", 2.0), ev("torsion_norm_sq", 4.0),
                 ev("bismut_r2233_real", -53.0 / 104.0), ev("btp_residual", 0.0),
                 ev("bas_residual", 0.0), ev("vaisman_residual", 0.0)}};
    }
    if (name == "sl2c")
        return {name,
                complex_simple("sl2"),
                {ev("chern_curvature_max", 0.0), ev("bismut_curvature_max", 0.5),
                 ev("eta_norm", 0.0), ev("torsion_norm_sq", 3.0), ev("chern_ric1_max", 0.0),
                 ev("chern_ric2_max", 0.0), ev("chern_ric3_max", 0.0), ev("btp_residual", 0.0),
                 ev("bas_residual", 0.0), ev("kahler_residual", 1.0 / std::sqrt(2.0))}};
    if (name == "almost_abelian_unimodular") {
        Eigen::MatrixXcd A(2, 2);
        A << Complex(0, 1), Complex(1, 0), Complex(0, 0), Complex(0, -1);
        return {name,
                almost_abelian(Complex(0, 0), Eigen::VectorXcd::Zero(2), A),
                {ev("chern_curvature_max", 2.0), ev("chern_ric1_max", 0.0),
                 ev("chern_ric2_max", 2.0), ev("chern_ric3_max", 0.0), ev("eta_norm", 0.0),
                 ev("torsion_norm_sq", 4.0)}};
    }
    if (name == "almost_abelian_split") {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
        A(0, 0) = Complex(1, 0);
        A(1, 1) = Complex(-1, 0);
        return {name,
                almost_abelian(Complex(0, 0), Eigen::VectorXcd::Zero(2), A),
                {ev("chern_curvature_max", 0.0), ev("chern_ric1_max", 0.0),
                 ev("chern_ric2_max", 0.0), ev("chern_ric3_max", 0.0), ev("eta_norm", 0.0),
                 ev("torsion_norm_sq", 16.0)}};
    }
    if (name == "nilpotent32") {
        Eigen::MatrixXcd Y(1, 2);
        Y << Complex(1, 0), Complex(-1, 0);
        return {name,
                nilpotent(3, 2, Y),
                {ev("chern_curvature_max", 1.0), ev("chern_ric1_max", 0.0),
                 ev("chern_ric2_max", 2.0), ev("chern_ric3_max", 0.0), ev("eta_norm", 0.0),
                 ev("torsion_norm_sq", 4.0), ev("kahler_residual", 1.0)}};
    }
    if (name == "nilpotent42") {
        Eigen::MatrixXcd Y(2, 2);
        Y << Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1);
        return {name,
                nilpotent(4, 2, Y),
                {ev("chern_ric1_max", 0.0), ev("chern_ric3_max", 0.0), ev("eta_norm", 0.0),
                 ev("torsion_norm_sq", 8.0)}};
    }
    if (name == "abelian3")
        return {name,
                abelian(3),
                {ev("chern_curvature_max", 0.0), ev("torsion_norm_sq", 0.0), ev("eta_norm", 0.0),
                 ev("kahler_residual", 0.0), ev("btp_residual", 0.0), ev("bas_residual", 0.0)}};
    if (name == "cpn2")
        return {name,
                symmetric_space_system("cpn", 2),
                {ev("validate_max_residual", 0.0), ev("nomizu_jacobi", 0.0, 1e-10),
                 ev("schur_lambda", -12.0), ev("ricci_uniform", 6.0),
                 ev("ricci_isotropy_dev", 0.0), ev("kostant_residual", 0.0, 1e-8),
                 ev("curvature_max", 4.0)}};
    if (name == "sphere2")
        return {name,
                symmetric_space_system("sphere", 2),
                {ev("validate_max_residual", 0.0), ev("nomizu_jacobi", 0.0, 1e-10),
                 ev("schur_lambda", -2.0), ev("ricci_uniform", 1.0), ev("ricci_isotropy_dev", 0.0),
                 ev("kostant_residual", 0.0, 1e-8), ev("curvature_max", 1.0)}};
    if (name == "sphere3")
        return {name,
                symmetric_space_system("sphere", 3),
                {ev("validate_max_residual", 0.0), ev("nomizu_jacobi", 0.0, 1e-10),
                 ev("schur_lambda", -4.0), ev("ricci_uniform", 2.0), ev("ricci_isotropy_dev", 0.0),
                 ev("kostant_residual", 0.0, 1e-8), ev("curvature_max", 1.0)}};
    if (name == "flat4")
        return {name,
                symmetric_space_system("flat", 4),
                {ev("validate_max_residual", 0.0), ev("nomizu_jacobi", 0.0, 1e-10),
                 ev("curvature_max", 0.0)}};
    throw Error("UnknownModel", "no zoo entry named '" + name + "'");
}

}  // namespace

std::vector<std::string> list() {
    return {"hopf2@p",
            "hopf3@p",
            "hopf4@p",
            "hopf3_generic",
            "sl2c",
            "almost_abelian_unimodular",
            "almost_abelian_split",
            "nilpotent32",
            "nilpotent42",
            "abelian3",
            "cpn2",
            "sphere2",
            "sphere3",
            "flat4"};
}

ZooEntry entry(const std::string& name) {
    // short aliases for the base-point diagonal models
    if (name == "hopf2" || name == "hopf3" || name == "hopf4")
        return build_entry(name + "@p");
    return build_entry(name);
}

double evaluate_expected(const ZooEntry& e, const std::string& which,
                         const ToleranceContext& ctx) {
    ctx.validate();
    if (std::holds_alternative<liegeom::Model>(e.object)) {
        const auto& m = std::get<liegeom::Model>(e.object);
        if (which == "eta_norm" || which == "torsion_norm_sq" || which == "kahler_residual" ||
            which == "chern_curvature_max" || which == "chern_ric1_max" ||
            which == "chern_ric2_max" || which == "chern_ric3_max") {
            liegeom::GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
            if (which == "chern_curvature_max") return numlin::max_norm(g.curv_chern.R);
            if (which == "kahler_residual") return numlin::max_norm(numlin::values(g.torsion.T));
            if (which == "eta_norm" || which == "torsion_norm_sq") {
                const liegeom::TorsionDerived td = liegeom::torsion_derived(g.torsion);
                return which == "eta_norm" ? (td.eta.size() ? td.eta.norm() : 0.0)
                                           : td.torsion_norm_sq;
            }
            const liegeom::RicciSet r = liegeom::ricci(g.eval, g.curv_chern);
            if (which == "chern_ric1_max") return numlin::max_norm(r.ric1);
            if (which == "chern_ric2_max") return numlin::max_norm(r.ric2);
            return numlin::max_norm(r.ric3);
        }
        if (which == "bismut_curvature_max" || which == "bismut_r2233_real" ||
            which == "btp_residual" || which == "bas_residual") {
            liegeom::GeometryBundle g = liegeom::geometry(m, 2.0, ctx);
            if (which == "bismut_curvature_max") return numlin::max_norm(g.curv_t.R);
            if (which == "bismut_r2233_real")
                return g.curv_t.R(1, uz(g.eval.n + 1), 2, 2).real();
            const double nT =
                numlin::max_norm(liegeom::covariant_derivative(g.eval, g.conn_t, g.torsion));
            if (which == "btp_residual") return nT;
            const double nR =
                numlin::max_norm(liegeom::covariant_derivative(g.eval, g.conn_t, g.curv_t));
            return std::max(nT, nR);
        }
        if (which == "vaisman_residual") {
            for (const auto& r : liegeom::predicates(m, ctx, liegeom::PredicateOptions{}))
                if (r.name == "vaisman") return r.residual;
            throw Error("UnknownModel", "vaisman predicate missing from report");
        }
    } else {
        const auto& sys = std::get<holsys::HolonomySystem>(e.object);
        if (which == "curvature_max") {
            double m = 0.0;
            for (std::size_t i = 0; i < sys.Rm.size(); ++i)
                m = std::max(m, std::abs(sys.Rm.data()[i]));
            return m;
        }
        if (which == "validate_max_residual") {
            double m = 0.0;
            for (const auto& r : holsys::validate_system(sys, ctx))
                m = std::max(m, r.residual);
            return m;
        }
        if (which == "nomizu_jacobi") return holsys::nomizu(sys, ctx).jacobi_residual;
        if (which == "schur_lambda")
            return holsys::schur_lambda(holsys::nomizu(sys, ctx), sys, ctx).lambda;
        if (which == "kostant_residual")
            return holsys::kostant_reconstruction(holsys::nomizu(sys, ctx), sys, ctx).residual;
        if (which == "ricci_uniform" || which == "ricci_isotropy_dev") {
            const holsys::AKCertificate cert = holsys::ak_certificate(sys, ctx);
            if (which == "ricci_uniform") return cert.ricci(0, 0);
            const double c = cert.ricci(0, 0);
            Eigen::MatrixXd dev = cert.ricci;
            dev.diagonal().array() -= c;
            return dev.cwiseAbs().maxCoeff();
        }
    }
    throw Error("UnknownModel", "no expected-value rule named '" + which + "'");
}

}  // namespace hermlab::zoo
