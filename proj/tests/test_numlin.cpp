#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "hermlab/errors.hpp"
#include "hermlab/numlin.hpp"
#include "hermlab/tensor.hpp"

using namespace hermlab;
using namespace hermlab::numlin;
using Cx = std::complex<double>;

namespace {

Eigen::MatrixXcd random_unitary(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = Cx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    return Q;
}

} // namespace

// ============================================================================
// tolerances / approx_zero
// ============================================================================

TEST_CASE("tolerance context validates strict positivity") {
    ToleranceContext ctx;
    CHECK_NOTHROW(ctx.validate());
    ctx.abs_tol = 0.0;
    CHECK_THROWS_WITH_AS(ctx.validate(), doctest::Contains("InvalidTolerance"), Error);
    ctx.abs_tol = 1e-9;
    ctx.fd_tol = -1.0;
    CHECK_THROWS_AS(ctx.validate(), Error);
}

TEST_CASE("approx_zero uses max norm against abs + rel * scale") {
    ToleranceContext ctx; // abs 1e-9, rel 1e-9
    ComplexTensor t({2, 2});
    t(0, 0) = Cx(1e-10, -1e-10);
    t(1, 1) = Cx(0, 1.5e-10);
    CHECK(approx_zero(t, ctx));
    t(1, 0) = Cx(1e-8, 0);
    CHECK_FALSE(approx_zero(t, ctx));
    CHECK(approx_zero(t, ctx, /*ref_scale=*/1e2)); // 1e-9 + 1e-9*1e2 > 1e-8
}

// ============================================================================
// tensor machinery
// ============================================================================

TEST_CASE("permute follows transpose semantics and composes") {
    ComplexTensor t({2, 3, 4});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k)
                t(i, j, k) = Cx(static_cast<double>(100 * i + 10 * j + k), 0);

    auto p = t.permute({2, 0, 1}); // new axes: (old2, old0, old1)
    REQUIRE(p.shape() == std::vector<std::size_t>({4, 2, 3}));
    CHECK(p(3, 1, 2) == t(1, 2, 3));

    // permute(q) after permute(p) equals permute(r) with r[k] = p[q[k]]
    auto a = t.permute({2, 0, 1}).permute({1, 2, 0});
    auto b = t.permute({0, 1, 2});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) CHECK(a(i, j, k) == b(i, j, k));
}

TEST_CASE("contract matches hand-computed matrix product and is linear") {
    ComplexTensor A({2, 3}), B({3, 2});
    A(0, 0) = 1;       A(0, 1) = Cx(0, 1); A(0, 2) = 2;
    A(1, 0) = Cx(1, 1); A(1, 1) = 0;       A(1, 2) = -1;
    B(0, 0) = 2; B(0, 1) = 1;
    B(1, 0) = Cx(0, -1); B(1, 1) = 3;
    B(2, 0) = 1; B(2, 1) = Cx(1, 2);
    auto C = contract(A, {1}, B, {0});
    REQUIRE(C.shape() == std::vector<std::size_t>({2, 2}));
    CHECK(std::abs(C(0, 0) - (1.0 * 2.0 + Cx(0, 1) * Cx(0, -1) + 2.0)) < 1e-14);
    CHECK(std::abs(C(1, 1) - (Cx(1, 1) * 1.0 + 0.0 + (-1.0) * Cx(1, 2))) < 1e-14);

    // linearity to 1e-12 relative
    ComplexTensor A2 = A;
    A2.scale(Cx(0.5, -2.0));
    auto C2 = contract(A2, {1}, B, {0});
    ComplexTensor lhs = C2;
    ComplexTensor rhs = C;
    rhs.scale(Cx(0.5, -2.0));
    CHECK(max_norm(lhs - rhs) < 1e-12 * std::max(1.0, max_norm(rhs)));
}

TEST_CASE("conjugate and trace_axes") {
    ComplexTensor t({2, 2});
    t(0, 1) = Cx(1, 2);
    auto c = t.conjugate();
    CHECK(c(0, 1) == Cx(1, -2));

    ComplexTensor m({3, 3});
    for (std::size_t i = 0; i < 3; ++i) m(i, i) = Cx(static_cast<double>(i), 1);
    auto tr = trace_axes(m, 0, 1);
    REQUIRE(tr.rank() == 0);
    CHECK(std::abs(tr.data()[0] - Cx(3, 3)) < 1e-14);
}

TEST_CASE("jets obey Leibniz and conjugation swaps derivative slots") {
    Jet f(2), g(2);
    f.v = Cx(2, 1);
    f.dh << Cx(1, 0), Cx(0, 1);
    f.da << Cx(3, 0), Cx(0, 0);
    g.v = Cx(0, -1);
    g.dh << Cx(0, 2), Cx(1, 1);
    g.da << Cx(0, 0), Cx(2, 0);

    Jet p = f * g;
    CHECK(std::abs(p.v - f.v * g.v) < 1e-15);
    CHECK(std::abs(p.dh(0) - (f.v * g.dh(0) + g.v * f.dh(0))) < 1e-15);
    CHECK(std::abs(p.da(1) - (f.v * g.da(1) + g.v * f.da(1))) < 1e-15);

    Jet cf = conj(f);
    CHECK(cf.v == std::conj(f.v));
    CHECK(cf.dh(0) == std::conj(f.da(0)));
    CHECK(cf.da(1) == std::conj(f.dh(1)));
}

// ============================================================================
// unitarize
// ============================================================================

TEST_CASE("unitarize: identity gram gives identity change") {
    ToleranceContext ctx;
    auto fc = unitarize(Eigen::MatrixXcd::Identity(3, 3), ctx);
    CHECK((fc.matrix - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(fc.kind == "unitary");
}

TEST_CASE("unitarize: diagonal gram diag(4,1)") {
    ToleranceContext ctx;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2, 2);
    G(0, 0) = 4.0;
    G(1, 1) = 1.0;
    auto fc = unitarize(G, ctx);
    CHECK(std::abs(fc.matrix(0, 0) - Cx(0.5, 0)) < 1e-14);
    CHECK(std::abs(fc.matrix(1, 1) - Cx(1.0, 0)) < 1e-14);
    CHECK(std::abs(fc.matrix(0, 1)) < 1e-14);
    CHECK(std::abs(fc.matrix(1, 0)) < 1e-14);
    CHECK(fc.kind == "general");
}

TEST_CASE("unitarize: P G P^* = I for random positive definite gram") {
    ToleranceContext ctx;
    std::mt19937 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4;
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = Cx(g(rng), g(rng));
        Eigen::MatrixXcd G = A * A.adjoint() + Eigen::MatrixXcd::Identity(n, n);
        auto fc = unitarize(G, ctx);
        Eigen::MatrixXcd res = fc.matrix * G * fc.matrix.adjoint() - Eigen::MatrixXcd::Identity(n, n);
        CHECK(res.cwiseAbs().maxCoeff() < 1e-12);
        // lower-triangular with positive diagonal: the deterministic normal form
        for (int i = 0; i < n; ++i) {
            CHECK(fc.matrix(i, i).imag() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(fc.matrix(i, i).real() > 0.0);
            for (int j = i + 1; j < n; ++j) CHECK(std::abs(fc.matrix(i, j)) < 1e-13);
        }
        // applying the change and unitarizing again is the identity change
        auto fc2 = unitarize(fc.matrix * G * fc.matrix.adjoint(), ctx);
        CHECK((fc2.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("unitarize rejects non positive definite input") {
    ToleranceContext ctx;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(2, 2);
    G(1, 1) = -1.0;
    CHECK_THROWS_WITH_AS(unitarize(G, ctx), doctest::Contains("NotPositiveDefinite"), Error);
    G(1, 1) = 0.0;
    CHECK_THROWS_AS(unitarize(G, ctx), Error);
}

// ============================================================================
// invariant subspaces
// ============================================================================

TEST_CASE("invariant_subspaces: no generators on C^2 gives the coordinate lines") {
    ToleranceContext ctx;
    auto blocks = invariant_subspaces({}, 2, ctx);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].cols() == 1);
    CHECK(blocks[1].cols() == 1);
    CHECK(std::abs(blocks[0](0, 0) - Cx(1, 0)) < 1e-12);
    CHECK(std::abs(blocks[0](1, 0)) < 1e-12);
    CHECK(std::abs(blocks[1](1, 0) - Cx(1, 0)) < 1e-12);
}

TEST_CASE("invariant_subspaces: u(2) basis is irreducible") {
    ToleranceContext ctx;
    std::vector<Eigen::MatrixXcd> gens;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = Cx(0, 1);
    gens.push_back(m);
    m.setZero();
    m(1, 1) = Cx(0, 1);
    gens.push_back(m);
    m.setZero();
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    gens.push_back(m);
    m.setZero();
    m(0, 1) = Cx(0, 1);
    m(1, 0) = Cx(0, 1);
    gens.push_back(m);
    auto blocks = invariant_subspaces(gens, 2, ctx);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].cols() == 2);
}

TEST_CASE("invariant_subspaces: diag(i,-i) splits into the coordinate lines") {
    ToleranceContext ctx;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = Cx(0, 1);
    m(1, 1) = Cx(0, -1);
    auto blocks = invariant_subspaces({m}, 2, ctx);
    REQUIRE(blocks.size() == 2);
    CHECK(std::abs(blocks[0](0, 0) - Cx(1, 0)) < 1e-10);
    CHECK(std::abs(blocks[1](1, 0) - Cx(1, 0)) < 1e-10);
}

TEST_CASE("invariant_subspaces: blocks are invariant, orthonormal and complete") {
    ToleranceContext ctx;
    // conjugated diagonal family with a repeated eigenvalue: expect a 2+1 split
    Eigen::MatrixXcd U = random_unitary(3, 123);
    Eigen::MatrixXcd d1 = Eigen::MatrixXcd::Zero(3, 3);
    d1(0, 0) = Cx(0, 1);
    d1(1, 1) = Cx(0, 1);
    d1(2, 2) = Cx(0, -2);
    // an su(2)-type pair acting irreducibly on the repeated eigenvalue plane
    Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(3, 3);
    d2(0, 1) = 1;
    d2(1, 0) = -1;
    Eigen::MatrixXcd d3 = Eigen::MatrixXcd::Zero(3, 3);
    d3(0, 1) = Cx(0, 1);
    d3(1, 0) = Cx(0, 1);
    std::vector<Eigen::MatrixXcd> gens = {U * d1 * U.adjoint(), U * d2 * U.adjoint(),
                                          U * d3 * U.adjoint()};

    auto blocks = invariant_subspaces(gens, 3, ctx);
    REQUIRE(blocks.size() == 2);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto& B : blocks) {
        CHECK((B.adjoint() * B - Eigen::MatrixXcd::Identity(B.cols(), B.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        sum += B * B.adjoint();
        for (const auto& g : gens) {
            Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(3, 3) - B * B.adjoint();
            CHECK((proj * g * B).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    CHECK((sum - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

    std::vector<int> dims;
    for (const auto& B : blocks) dims.push_back(static_cast<int>(B.cols()));
    std::sort(dims.begin(), dims.end());
    CHECK(dims == std::vector<int>({1, 2}));
}

TEST_CASE("invariant_subspaces_real: rotation generator is real-irreducible") {
    ToleranceContext ctx;
    Eigen::MatrixXd J(2, 2);
    J << 0, -1, 1, 0;
    auto blocks = invariant_subspaces_real({J}, 2, ctx);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].cols() == 2);
}

TEST_CASE("invariant_subspaces_real: distinct rotation speeds split 2+2") {
    ToleranceContext ctx;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 1) = -1;
    A(1, 0) = 1;
    A(2, 3) = -2;
    A(3, 2) = 2;
    auto blocks = invariant_subspaces_real({A}, 4, ctx);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].cols() == 2);
    CHECK(blocks[1].cols() == 2);
    // first block is the first coordinate plane
    CHECK(blocks[0].bottomRows(2).cwiseAbs().maxCoeff() < 1e-9);
}
