#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hermlab/errors.hpp"
#include "hermlab/split.hpp"
#include "hermlab/zoo.hpp"

using namespace hermlab;
using liegeom::LieHermitianModel;
using liegeom::Model;
using split::DecompositionReport;
using Cx = std::complex<double>;

namespace {

const numlin::ToleranceContext kCtx{};

/// Central extension of C^2 by one holomorphic direction: [e_1, e_2] = c e_3.
/// Flat Chern connection, parallel torsion with one-dimensional image.
Model heisenberg() {
    LieHermitianModel m;
    m.n = 3;
    m.C = numlin::ComplexTensor({3, 3, 3});
    m.D = numlin::ComplexTensor({3, 3, 3});
    m.label = "heisenberg(3)";
    const Cx c(1.0, 0.5);
    m.C(2, 0, 1) = c;
    m.C(2, 1, 0) = -c;
    return m;
}

/// sl2c with a one-dimensional abelian factor appended.
Model sl2c_times_abelian() {
    const auto base = std::get<Model>(zoo::entry("sl2c").object);
    const auto& lie = std::get<LieHermitianModel>(base);
    LieHermitianModel m;
    m.n = 4;
    m.C = numlin::ComplexTensor({4, 4, 4});
    m.D = numlin::ComplexTensor({4, 4, 4});
    m.label = "sl2c x abelian(1)";
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                m.C(a, b, c) = lie.C(a, b, c);
                m.D(a, b, c) = lie.D(a, b, c);
            }
    return m;
}

double unitary_defect(const Eigen::MatrixXcd& W, const Eigen::MatrixXcd& N) {
    const int n = static_cast<int>(W.rows());
    Eigen::MatrixXcd U(n, W.cols() + N.cols());
    U << W, N;
    return (U * U.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace

// ============================================================================
// torsion image decomposition
// ============================================================================

TEST_CASE("heisenberg: one-dimensional torsion image with a symplectic block") {
    const Model m = heisenberg();
    auto rep = split::torsion_split(m, kCtx);

    CHECK(rep.n == 3);
    CHECK(rep.ell1 == 1);
    REQUIRE(rep.W_basis.cols() == 1);
    REQUIRE(rep.N_basis.cols() == 2);
    CHECK(rep.N0_basis.cols() == 0);

    // W = span{e_3}; phase fixing makes the coefficient exactly 1
    CHECK(std::abs(rep.W_basis(2, 0) - Cx(1, 0)) <= 1e-12);
    CHECK(std::abs(rep.W_basis(0, 0)) <= 1e-12);
    CHECK(std::abs(rep.W_basis(1, 0)) <= 1e-12);
    // N avoids the image direction and completes the frame
    CHECK(rep.N_basis.row(2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(unitary_defect(rep.W_basis, rep.N_basis) <= 1e-10);

    auto taus = split::tau_forms(m, rep, kCtx);
    REQUIRE(taus.size() == 1);
    CHECK(taus[0].parallel_residual <= 1e-12);
    CHECK(taus[0].closure_residual <= 1e-12);
    // tau = <T(.,.), conj(e_3)>: entries -c and c in the (1,2) slot pair
    const Cx c(1.0, 0.5);
    CHECK(std::abs(taus[0].form(0, 1) - (-c)) <= 1e-12);
    CHECK(std::abs(taus[0].form(1, 0) - c) <= 1e-12);
    CHECK(std::abs(taus[0].form(2, 2)) <= 1e-12);

    const auto tau = split::choose_tau(rep, kCtx);
    auto blocks = split::symplectic_blocks(rep, tau, kCtx);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].b == doctest::Approx(std::sqrt(1.25)).epsilon(1e-10));
    CHECK(blocks[0].n_j == 1);
    CHECK(rep.ell2 == 0);
    // dimension count: 2k + ell1 + ell2 = n
    int k = 0;
    for (const auto& blk : blocks) k += blk.n_j;
    CHECK(2 * k + rep.ell1 + rep.ell2 == rep.n);

    // restricted form is antisymmetric with A conj(A) = -|c|^2 I
    const Eigen::MatrixXcd& A = rep.A_matrix;
    REQUIRE(A.rows() == 2);
    CHECK((A + A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXcd AAbar = A * A.conjugate();
    CHECK((AAbar + 1.25 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);

    // flat Chern connection: block curvature traces vanish identically
    const auto report = split::trace_free_check(m, rep, kCtx);
    CHECK(report.name == "block_trace_free");
    CHECK(report.holds);
    CHECK(report.residual <= 1e-12);

    // the holonomy algebra (here trivial) preserves each block
    const auto g = liegeom::geometry(m, 0.0, kCtx);
    const Eigen::MatrixXcd K = blocks[0].basis;
    const Eigen::MatrixXcd P = K * K.adjoint();
    const Eigen::MatrixXcd I3 = Eigen::MatrixXcd::Identity(3, 3);
    double inv = 0.0;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            Eigen::MatrixXcd op(3, 3);
            for (int l = 0; l < 3; ++l)
                for (int kk = 0; kk < 3; ++kk) op(l, kk) = g.curv_chern.at(a, b, kk, l);
            inv = std::max(inv, (P * op * (I3 - P)).cwiseAbs().maxCoeff());
        }
    CHECK(inv <= 1e-8);
}

TEST_CASE("sl2c: surjective torsion leaves no orthogonal complement") {
    const auto m = std::get<Model>(zoo::entry("sl2c").object);
    auto rep = split::torsion_split(m, kCtx);
    CHECK(rep.ell1 == 3);
    CHECK(rep.N_basis.cols() == 0);
    CHECK(rep.N0_basis.cols() == 0);
    CHECK(unitary_defect(rep.W_basis, rep.N_basis) <= 1e-10);

    auto taus = split::tau_forms(m, rep, kCtx);
    REQUIRE(taus.size() == 3);
    for (const auto& tf : taus) {
        CHECK(tf.parallel_residual <= 1e-12);
        CHECK(tf.closure_residual <= 1e-12);
    }
    // with N = 0 the chosen form is still returned, and there are no blocks
    const auto tau = split::choose_tau(rep, kCtx);
    CHECK(tau.rows() == 3);
    auto blocks = split::symplectic_blocks(rep, tau, kCtx);
    CHECK(blocks.empty());
    CHECK(rep.ell2 == 0);
    const auto report = split::trace_free_check(m, rep, kCtx);
    CHECK(report.holds);
    CHECK(report.witness.find("vacuous") != std::string::npos);
}

TEST_CASE("torsion-free and non-parallel models") {
    SUBCASE("abelian: empty image, no 2-forms to choose from") {
        const auto m = std::get<Model>(zoo::entry("abelian3").object);
        auto rep = split::torsion_split(m, kCtx);
        CHECK(rep.ell1 == 0);
        CHECK(rep.W_basis.cols() == 0);
        CHECK(rep.N_basis.cols() == 3);
        CHECK(rep.N0_basis.cols() == 3);
        CHECK(split::tau_forms(m, rep, kCtx).empty());
        CHECK_THROWS_WITH_AS((void)split::choose_tau(rep, kCtx),
                             doctest::Contains("Degenerate"), Error);
    }
    SUBCASE("product with an abelian factor: chosen form degenerates on N") {
        const Model m = sl2c_times_abelian();
        auto rep = split::torsion_split(m, kCtx);
        CHECK(rep.ell1 == 3);
        REQUIRE(rep.N_basis.cols() == 1);
        // N = the abelian direction, which the torsion annihilates
        CHECK(std::abs(std::abs(rep.N_basis(3, 0)) - 1.0) <= 1e-12);
        CHECK(rep.N0_basis.cols() == 1);
        auto taus = split::tau_forms(m, rep, kCtx);
        REQUIRE(taus.size() == 3);
        for (const auto& tf : taus) {
            CHECK(tf.parallel_residual <= 1e-12);
            // forms live on the group factor only
            CHECK(tf.form.row(3).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(tf.form.col(3).cwiseAbs().maxCoeff() <= 1e-12);
        }
        const auto tau = split::choose_tau(rep, kCtx);
        CHECK_THROWS_WITH_AS(split::symplectic_blocks(rep, tau, kCtx),
                             doctest::Contains("Degenerate"), Error);
    }
    SUBCASE("almost-abelian: torsion image admits no parallel frame") {
        const auto m = std::get<Model>(zoo::entry("almost_abelian_unimodular").object);
        auto rep = split::torsion_split(m, kCtx);
        CHECK(rep.ell1 == 2);
        CHECK_THROWS_WITH_AS(split::tau_forms(m, rep, kCtx), doctest::Contains("NotCAS"),
                             Error);
    }
    SUBCASE("diagonal-type pointwise model: image not parallel either") {
        const auto m = std::get<Model>(zoo::entry("hopf3@p").object);
        auto rep = split::torsion_split(m, kCtx);
        CHECK(rep.ell1 == 2);
        CHECK(rep.N_basis.cols() == 1);
        CHECK_THROWS_WITH_AS(split::tau_forms(m, rep, kCtx), doctest::Contains("NotCAS"),
                             Error);
    }
}

// ============================================================================
// canonical form of the restricted 2-form
// ============================================================================

TEST_CASE("synthetic restricted forms reduce to their block invariants") {
    SUBCASE("two blocks with distinct moduli") {
        DecompositionReport rep;
        rep.n = 4;
        rep.ell1 = 0;
        rep.W_basis = Eigen::MatrixXcd(4, 0);
        rep.N_basis = Eigen::MatrixXcd::Identity(4, 4);
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(4, 4);
        tau(0, 1) = 2.0;
        tau(1, 0) = -2.0;
        tau(2, 3) = 1.0;
        tau(3, 2) = -1.0;
        auto blocks = split::symplectic_blocks(rep, tau, kCtx);
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[0].b == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(blocks[1].b == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(blocks[0].n_j == 1);
        CHECK(blocks[1].n_j == 1);
        CHECK(blocks[0].b > blocks[1].b);
        CHECK(rep.ell2 == 0);
        // block bases are orthonormal and orthogonal to each other
        Eigen::MatrixXcd all(4, 4);
        all << blocks[0].basis, blocks[1].basis;
        CHECK((all.adjoint() * all - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <=
              1e-10);
    }
    SUBCASE("complex coefficient: modulus is the invariant") {
        DecompositionReport rep;
        rep.n = 2;
        rep.W_basis = Eigen::MatrixXcd(2, 0);
        rep.N_basis = Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(2, 2);
        tau(0, 1) = Cx(3.0, 4.0);
        tau(1, 0) = Cx(-3.0, -4.0);
        auto blocks = split::symplectic_blocks(rep, tau, kCtx);
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].b == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("kernel directions are counted, not blocked") {
        DecompositionReport rep;
        rep.n = 3;
        rep.W_basis = Eigen::MatrixXcd(3, 0);
        rep.N_basis = Eigen::MatrixXcd::Identity(3, 3);
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(3, 3);
        tau(0, 1) = 1.0;
        tau(1, 0) = -1.0;
        auto blocks = split::symplectic_blocks(rep, tau, kCtx);
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].b == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.ell2 == 1);
    }
    SUBCASE("non-antisymmetric input is rejected") {
        DecompositionReport rep;
        rep.n = 2;
        rep.N_basis = Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(2, 2);
        tau(0, 1) = 1.0;
        tau(1, 0) = 1.0;
        CHECK_THROWS_WITH_AS(split::symplectic_blocks(rep, tau, kCtx),
                             doctest::Contains("InvalidModel"), Error);
    }
}

TEST_CASE("restricted form is invariant under the symmetry algebra to second order") {
    const Model m = heisenberg();
    auto rep = split::torsion_split(m, kCtx);
    (void)split::tau_forms(m, rep, kCtx);
    const auto tau = split::choose_tau(rep, kCtx);
    (void)split::symplectic_blocks(rep, tau, kCtx);
    const Eigen::MatrixXcd& A = rep.A_matrix;
    const double anorm = A.cwiseAbs().maxCoeff();
    REQUIRE(anorm > 0.1);

    // g = i diag(1,-1) satisfies g^tr A + A g = 0, so h = 1 + eps g preserves
    // A up to the quadratic term: here h^tr A h - A = eps^2 A exactly
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 0) = Cx(0, 1);
    g(1, 1) = Cx(0, -1);
    CHECK((g.transpose() * A + A * g).cwiseAbs().maxCoeff() <= 1e-12);
    for (double eps : {1e-2, 1e-3}) {
        const Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(2, 2) + eps * g;
        const double res = (h.transpose() * A * h - A).cwiseAbs().maxCoeff();
        CHECK(res >= 0.5 * eps * eps * anorm);
        CHECK(res <= 2.0 * eps * eps * anorm);
    }
}
