#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hermlab/errors.hpp"
#include "hermlab/liegeom.hpp"
#include "hermlab/zoo.hpp"

using namespace hermlab;
using namespace hermlab::liegeom;
using Cx = std::complex<double>;

namespace {

const ToleranceContext kCtx{};

double cdist(Cx a, Cx b) { return std::abs(a - b); }

/// su(2) + R with the bi-invariant metric: orthonormal real frame X_1..X_3
/// with [X_a, X_b] = sqrt2 eps_abc X_c and a central X_0, complexified as
/// e_1 = (X_1 - i X_2)/sqrt2, e_2 = (X_3 - i X_0)/sqrt2.
LieHermitianModel bi_invariant_model() {
    LieHermitianModel m;
    m.n = 2;
    m.C = numlin::ComplexTensor({2, 2, 2});
    m.D = numlin::ComplexTensor({2, 2, 2});
    m.label = "su2xR";
    m.C(0, 0, 1) = Cx(0, -1);
    m.C(0, 1, 0) = Cx(0, 1);
    m.D(0, 1, 0) = Cx(0, -1);
    m.D(0, 0, 1) = Cx(0, 1);
    return m;
}

}  // namespace

// ============================================================================
// structure data and connections
// ============================================================================

TEST_CASE("abelian model: flat, torsion-free, trivial connections") {
    auto m = zoo::abelian(3);
    auto eval = evaluate(m);
    auto [conn, T] = chern_connection(eval, kCtx);
    CHECK(numlin::max_norm(numlin::values(conn.gamma_hol)) == doctest::Approx(0.0));
    CHECK(numlin::max_norm(numlin::values(T.T)) == doctest::Approx(0.0));
    auto curv = curvature(eval, conn);
    CHECK(numlin::max_norm(curv.R) == doctest::Approx(0.0));
    auto lc = levi_civita(eval, kCtx);
    CHECK(numlin::max_norm(numlin::values(lc.gamma_hol)) == doctest::Approx(0.0));
    REQUIRE(lc.gamma_mixed.has_value());
    CHECK(numlin::max_norm(numlin::values(*lc.gamma_mixed)) == doctest::Approx(0.0));
}

TEST_CASE("almost-abelian model: structure constants, torsion, curvature block") {
    Eigen::MatrixXcd A(2, 2);
    A << Cx(0, 1), Cx(1, 0), Cx(0, 0), Cx(0, -1);
    auto model = zoo::almost_abelian(Cx(0, 0), Eigen::VectorXcd::Zero(2), A);
    const auto& lie = std::get<LieHermitianModel>(model);
    CHECK(cdist(lie.D(1, 1, 0), A(0, 0)) < 1e-15);
    CHECK(cdist(lie.D(1, 2, 0), A(1, 0)) < 1e-15);
    CHECK(cdist(lie.C(1, 0, 1), -std::conj(A(0, 0))) < 1e-15);

    auto eval = evaluate(model);
    auto [conn, T] = chern_connection(eval, kCtx);
    // T^j_{0k} = conj(A_{j-1,k-1}) + A_{k-1,j-1}
    CHECK(cdist(T.T(1, 0, 2).v, Cx(1, 0)) < 1e-12);
    CHECK(cdist(T.T(2, 0, 1).v, Cx(1, 0)) < 1e-12);
    CHECK(cdist(T.T(1, 0, 1).v, Cx(0, 0)) < 1e-12);
    CHECK(cdist(T.T(1, 2, 0).v, Cx(-1, 0)) < 1e-12);

    auto curv = curvature(eval, conn);
    // R(e_0, conj e_0) acts on span(e_1, e_2) as [[1, -2i], [2i, -1]]
    CHECK(cdist(curv.at(0, 3, 1, 1), Cx(1, 0)) < 1e-12);
    CHECK(cdist(curv.at(0, 3, 2, 2), Cx(-1, 0)) < 1e-12);
    CHECK(cdist(curv.at(0, 3, 1, 2), Cx(0, 2)) < 1e-12);
    CHECK(cdist(curv.at(0, 3, 2, 1), Cx(0, -2)) < 1e-12);
    CHECK(cdist(curv.at(0, 3, 0, 0), Cx(0, 0)) < 1e-12);
    // all other direction pairs are flat
    double off = 0.0;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            if ((a == 0 && b == 3) || (a == 3 && b == 0)) continue;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) off = std::max(off, std::abs(curv.at(a, b, k, l)));
        }
    CHECK(off < 1e-12);

    auto ric = ricci(eval, curv);
    CHECK(ric.ric1.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ric.ric3.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cdist(ric.ric2(1, 1), Cx(1, 0)) < 1e-12);
    CHECK(cdist(ric.ric2(2, 2), Cx(-1, 0)) < 1e-12);
    CHECK(cdist(ric.ric2(1, 2), Cx(0, 2)) < 1e-12);
}

TEST_CASE("complex parallelizable model is Chern-flat with constant torsion") {
    auto m = zoo::complex_simple("sl2");
    auto g = geometry(m, 0.0, kCtx);
    CHECK(numlin::max_norm(g.curv_chern.R) < 1e-13);
    const double c = 1.0 / std::sqrt(2.0);
    CHECK(cdist(g.torsion.T(2, 0, 1).v, Cx(-c, 0)) < 1e-13);
    auto td = torsion_derived(g.torsion);
    CHECK(td.eta.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(td.torsion_norm_sq == doctest::Approx(3.0));
    // B = identity for this normalization
    CHECK((td.B - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("gauduchon family is affine in t") {
    Eigen::MatrixXcd A(2, 2);
    A << Cx(0, 1), Cx(1, 0), Cx(0, 0), Cx(0, -1);
    auto model = zoo::almost_abelian(Cx(0, 0), Eigen::VectorXcd::Zero(2), A);
    auto eval = evaluate(model);
    auto c0 = gauduchon_connection(eval, 0.0, kCtx);
    auto c1 = gauduchon_connection(eval, 1.0, kCtx);
    auto c2 = gauduchon_connection(eval, 2.0, kCtx);
    CHECK(c0.t_param.kind == "chern");
    CHECK(c2.t_param.kind == "bismut");
    for (std::size_t idx = 0; idx < c1.gamma_hol.size(); ++idx) {
        const Cx mid = 0.5 * (c0.gamma_hol.data()[idx].v + c2.gamma_hol.data()[idx].v);
        CHECK(cdist(c1.gamma_hol.data()[idx].v, mid) < 1e-13);
        const Cx mida = 0.5 * (c0.gamma_antihol.data()[idx].v + c2.gamma_antihol.data()[idx].v);
        CHECK(cdist(c1.gamma_antihol.data()[idx].v, mida) < 1e-13);
    }
}

TEST_CASE("torsion-free connection on a bi-invariant model is half the bracket") {
    auto m = bi_invariant_model();
    auto eval = evaluate(m);
    auto lc = levi_civita(eval, kCtx);
    REQUIRE(lc.gamma_mixed.has_value());
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                CHECK(cdist(lc.gamma_hol(j, i, k).v, -0.5 * m.C(j, i, k)) < 1e-12);
                CHECK(cdist(lc.gamma_antihol(j, i, k).v, -0.5 * std::conj(m.D(i, j, k))) < 1e-12);
                CHECK(cdist((*lc.gamma_mixed)(j, i, k).v, Cx(0, 0)) < 1e-12);
                CHECK(cdist((*lc.gamma_mixed)(j, i, 2 + k).v, 0.5 * m.D(k, j, i)) < 1e-12);
            }
}

// ============================================================================
// Hopf family (pointwise closed forms)
// ============================================================================

TEST_CASE("hopf at the base point: connection, curvature, parallelism") {
    auto m = zoo::hopf_base(3);
    auto g = geometry(m, 2.0, kCtx);
    const int n = 3;

    // Gamma^j_{ik} = -(u_k / 2) delta_ij with u = (1, 0, 0)
    CHECK(cdist(g.chern.gamma_hol(0, 0, 0).v, Cx(-0.5, 0)) < 1e-13);
    CHECK(cdist(g.chern.gamma_hol(1, 1, 0).v, Cx(-0.5, 0)) < 1e-13);
    CHECK(cdist(g.chern.gamma_hol(0, 0, 1).v, Cx(0, 0)) < 1e-13);
    CHECK(cdist(g.chern.gamma_hol(1, 0, 1).v, Cx(0, 0)) < 1e-13);

    // torsion T^j_{ik} = u_k delta_ji - u_i delta_jk
    CHECK(cdist(g.torsion.T(1, 1, 0).v, Cx(1, 0)) < 1e-13);
    CHECK(cdist(g.torsion.T(1, 0, 1).v, Cx(-1, 0)) < 1e-13);
    CHECK(cdist(g.torsion.T(0, 0, 1).v, Cx(0, 0)) < 1e-13);

    // skew-torsion curvature at p: R(i, bar i, k, bar k) = -1 + d_{i0} + d_{k0}
    // for i != k, and 0 on the full diagonal i = k
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Cx want = i == k ? Cx(0, 0)
                                   : Cx(-1.0 + (i == 0 ? 1.0 : 0.0) + (k == 0 ? 1.0 : 0.0), 0.0);
            CHECK(cdist(g.curv_t.at(i, n + i, k, k), want) < 1e-12);
        }
    CHECK(cdist(g.curv_t.at(1, n + 1, 2, 2), Cx(-1, 0)) < 1e-12);

    // parallel torsion and curvature for the skew-torsion connection
    CHECK(numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.torsion)) < 1e-12);
    CHECK(numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.curv_t)) < 1e-12);

    // Chern Ricci at p: ric1 = n (I - u u*), ric3 = I - u u*
    auto g0 = geometry(m, 0.0, kCtx);
    auto ric = ricci(g0.eval, g0.curv_chern);
    CHECK(cdist(ric.ric1(1, 1), Cx(3, 0)) < 1e-12);
    CHECK(cdist(ric.ric1(0, 0), Cx(0, 0)) < 1e-12);
    CHECK(cdist(ric.ric3(2, 2), Cx(1, 0)) < 1e-12);
    CHECK(ric.s1 == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(ric.s3 == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("hopf at a generic point: closed forms match finite differences") {
    Eigen::VectorXcd z(3);
    z << Cx(0.7, 0.2), Cx(-0.4, 0.1), Cx(0.3, -0.5);
    auto m = zoo::hopf(3, z);
    auto g = geometry(m, 2.0, kCtx);

    CHECK(numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.torsion)) < 1e-12);
    CHECK(numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.curv_t)) < 1e-12);

    // cross-check the closed-form curvature jets by central differences
    CurvatureTensor fd = g.curv_t;
    fd.jets.reset();
    attach_fd_jets(std::get<PointwiseFrameModel>(m), g.conn_t, fd);
    const auto dExact = covariant_derivative(g.eval, g.conn_t, g.curv_t);
    const auto dFd = covariant_derivative(g.eval, g.conn_t, fd);
    double dev = 0.0;
    for (std::size_t i = 0; i < dExact.size(); ++i)
        dev = std::max(dev, std::abs(dExact.data()[i] - dFd.data()[i]));
    CHECK(dev < 1e-5);

    // eta = (n-1) u
    auto eta = torsion_one_form(m, kCtx);
    const Eigen::VectorXcd u = z.conjugate() / z.norm();
    CHECK((eta - 2.0 * u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hopf predicate profile") {
    auto reports = predicates(zoo::hopf_base(3), kCtx);
    auto find = [&](const std::string& name) -> const ConditionReport& {
        for (const auto& r : reports)
            if (r.name == name) return r;
        REQUIRE(false);
        return reports.front();
    };
    CHECK_FALSE(find("kahler").holds);
    CHECK_FALSE(find("balanced").holds);
    CHECK(find("btp").holds);
    CHECK(find("as(t=2)").holds);
    CHECK_FALSE(find("as(t=0)").holds);
    CHECK(find("vaisman").holds);
    CHECK_FALSE(find("kahler_like_chern").holds);
}

// ============================================================================
// identities and admissible frames
// ============================================================================

TEST_CASE("identity checks pass on curated models") {
    for (const char* name : {"hopf3@p", "sl2c", "almost_abelian_unimodular", "nilpotent32"}) {
        auto e = zoo::entry(name);
        REQUIRE(std::holds_alternative<Model>(e.object));
        for (double t : {-1.0, 1.0, 2.0, 3.0}) {
            auto reports = check_identities(std::get<Model>(e.object), t, kCtx);
            for (const auto& r : reports) {
                CAPTURE(name);
                CAPTURE(t);
                CAPTURE(r.name);
                CAPTURE(r.witness);
                CHECK(r.holds);
            }
        }
    }
}

TEST_CASE("admissible frame on hopf surfaces") {
    SUBCASE("n=2: full chain b = lambda (a + conj a) = 2|a|^2") {
        Eigen::VectorXcd z(2);
        z << Cx(0.8, -0.3), Cx(0.2, 0.6);
        auto af = admissible_frame(zoo::hopf(2, z), kCtx);
        CHECK(af.lambda == doctest::Approx(1.0).epsilon(1e-9));
        REQUIRE(af.a.size() == 2);
        CHECK(cdist(af.a(0), Cx(1, 0)) < 1e-9);
        CHECK(std::abs(af.a(1)) < 1e-9);
        CHECK(af.b(0) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(af.delta(0) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::abs(af.b(0) - af.lambda * 2.0 * af.a(0).real()) < 1e-8);
        CHECK(std::abs(af.b(0) - 2.0 * std::norm(af.a(0)) - 2.0 * af.delta(0)) < 1e-8);
    }
    SUBCASE("n=3: b_i = 2|a_i|^2 + 2 delta_i holds; frame is unitary") {
        auto af = admissible_frame(zoo::hopf_base(3), kCtx);
        CHECK(af.lambda == doctest::Approx(2.0).epsilon(1e-9));
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(af.b(i) - 2.0 * std::norm(af.a(i)) - 2.0 * af.delta(i)) < 1e-8);
        const Eigen::MatrixXcd U = af.change.matrix;
        CHECK((U * U.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("balanced model is rejected") {
        const Model balanced = std::get<Model>(zoo::entry("nilpotent32").object);
        CHECK_THROWS_WITH_AS(admissible_frame(balanced, kCtx), doctest::Contains("Balanced"),
                             Error);
    }
}

// ============================================================================
// exterior differential
// ============================================================================

TEST_CASE("structure equation of the nilpotent family") {
    Eigen::MatrixXcd Y(1, 2);
    Y << Cx(1, 0), Cx(-1, 0);
    auto m = zoo::nilpotent(3, 2, Y);
    auto eval = evaluate(m);
    const int N = 6;
    // dual frame 1-form phi_2
    numlin::ComplexTensor vals({static_cast<std::size_t>(N)});
    vals(2) = Cx(1, 0);
    KForm phi2 = constant_form(1, 3, vals);
    auto d = ce_differential(eval, phi2);
    // d phi_2 (e_a, conj e_a) = Y(0, a); all other components vanish
    CHECK(cdist(d.form.comp(0, 3).v, Y(0, 0)) < 1e-13);
    CHECK(cdist(d.form.comp(1, 4).v, Y(0, 1)) < 1e-13);
    CHECK(cdist(d.form.comp(0, 4).v, Cx(0, 0)) < 1e-13);
    CHECK(cdist(d.form.comp(0, 1).v, Cx(0, 0)) < 1e-13);
    // d^2 = 0
    auto d2 = ce_differential(eval, d.form, d.jets_valid);
    CHECK(numlin::max_norm(numlin::values(d2.form.comp)) < 1e-13);
}
