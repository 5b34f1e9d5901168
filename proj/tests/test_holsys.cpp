#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hermlab/errors.hpp"
#include "hermlab/holsys.hpp"
#include "hermlab/zoo.hpp"

using namespace hermlab;
using namespace hermlab::holsys;

namespace {

const ToleranceContext kCtx{};

HolonomySystem get_system(const char* name) {
    auto e = zoo::entry(name);
    REQUIRE(std::holds_alternative<HolonomySystem>(e.object));
    return std::get<HolonomySystem>(e.object);
}

void check_all_hold(const std::vector<ConditionReport>& reports) {
    for (const auto& r : reports) {
        CAPTURE(r.name);
        CAPTURE(r.witness);
        CHECK(r.holds);
    }
}

}  // namespace

TEST_CASE("round sphere: validation, algebra, certificates") {
    auto sys = get_system("sphere3");
    check_all_hold(validate_system(sys, kCtx));
    CHECK(holonomy_algebra_from_curvature(sys, kCtx).size() == 3);  // so(3)

    auto alg = nomizu(sys, kCtx);
    CHECK(alg.g_dim == 3);
    CHECK(alg.total_dim == 6);
    CHECK(alg.jacobi_residual < 1e-10);
    check_all_hold(killing_checks(alg, sys, kCtx));

    auto schur = schur_lambda(alg, sys, kCtx);
    CHECK(schur.lambda == doctest::Approx(-4.0).epsilon(1e-9));
    CHECK(schur.deviation < 1e-9);

    auto kos = kostant_reconstruction(alg, sys, kCtx);
    CHECK_FALSE(kos.vacuous);
    CHECK(kos.residual < 1e-8);
    CHECK(kos.condition_number < 1e6);

    auto ak = ak_certificate(sys, kCtx);
    CHECK(ak.torsion_case == "torsion-free");
    CHECK_FALSE(ak.ricci_flat);
    CHECK_FALSE(ak.flat);
    CHECK_FALSE(ak.contradiction);
    CHECK(ak.certificate.holds);
    CHECK(ak.ricci_agreement < 1e-8);
    CHECK((ak.ricci - 2.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("complex projective plane: u(2) holonomy") {
    auto sys = get_system("cpn2");
    check_all_hold(validate_system(sys, kCtx));
    CHECK(holonomy_algebra_from_curvature(sys, kCtx).size() == 4);  // u(2)

    auto alg = nomizu(sys, kCtx);
    CHECK(alg.g_dim == 4);
    CHECK(alg.jacobi_residual < 1e-10);
    check_all_hold(killing_checks(alg, sys, kCtx));

    auto schur = schur_lambda(alg, sys, kCtx);
    CHECK(schur.lambda == doctest::Approx(-12.0).epsilon(1e-9));
    CHECK(schur.deviation < 1e-9);

    auto kos = kostant_reconstruction(alg, sys, kCtx);
    CHECK(kos.residual < 1e-8);

    auto ak = ak_certificate(sys, kCtx);
    CHECK(ak.torsion_case == "torsion-free");
    CHECK_FALSE(ak.contradiction);
    CHECK(ak.certificate.holds);
    CHECK((ak.ricci - 6.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rescaled metric is handled through orthonormalization") {
    auto sys = get_system("sphere3");
    sys.H = 4.0 * Eigen::MatrixXd::Identity(3, 3);
    check_all_hold(validate_system(sys, kCtx));
    auto alg = nomizu(sys, kCtx);
    CHECK(alg.jacobi_residual < 1e-10);
    // components kept, metric scaled by c^2 = 4: curvature in the unit frame
    // scales by 1/c^2, and so does the Schur scalar
    auto schur = schur_lambda(alg, sys, kCtx);
    CHECK(schur.lambda == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(schur.deviation < 1e-9);
}

TEST_CASE("flat system: reducible holonomy is rejected, certificate is trivial") {
    auto sys = get_system("flat4");
    check_all_hold(validate_system(sys, kCtx));
    CHECK(holonomy_algebra_from_curvature(sys, kCtx).empty());
    auto alg = nomizu(sys, kCtx);
    CHECK(alg.g_dim == 0);
    CHECK(alg.jacobi_residual == doctest::Approx(0.0));
    CHECK_THROWS_WITH_AS(schur_lambda(alg, sys, kCtx), doctest::Contains("Reducible"), Error);
    CHECK_THROWS_AS(kostant_reconstruction(alg, sys, kCtx), Error);

    auto ak = ak_certificate(sys, kCtx);
    CHECK(ak.torsion_case == "flat");
    CHECK(ak.ricci_flat);
    CHECK(ak.flat);
    CHECK_FALSE(ak.contradiction);
    CHECK(ak.certificate.holds);
}

TEST_CASE("one-dimensional system: vacuous reconstruction") {
    HolonomySystem sys;
    sys.dim = 1;
    sys.H = Eigen::MatrixXd::Identity(1, 1);
    sys.Rm = RealTensor({1, 1, 1, 1});
    sys.label = "point";
    check_all_hold(validate_system(sys, kCtx));
    auto alg = nomizu(sys, kCtx);
    auto schur = schur_lambda(alg, sys, kCtx);
    CHECK(schur.lambda == doctest::Approx(0.0));
    auto kos = kostant_reconstruction(alg, sys, kCtx);
    CHECK(kos.vacuous);
    CHECK(kos.residual == doctest::Approx(0.0));
}

TEST_CASE("invalid inputs are diagnosed") {
    SUBCASE("broken invariance violates the Jacobi identity") {
        auto sys = get_system("sphere3");
        sys.Rm(0, 1, 1, 2) += 0.5;
        sys.Rm(1, 0, 1, 2) -= 0.5;
        sys.Rm(0, 1, 2, 1) -= 0.5;
        sys.Rm(1, 0, 2, 1) += 0.5;
        bool invariance_failed = false;
        for (const auto& r : validate_system(sys, kCtx))
            if (r.name == "invariance" && !r.holds) invariance_failed = true;
        CHECK(invariance_failed);
        CHECK_THROWS_WITH_AS(nomizu(sys, kCtx), doctest::Contains("JacobiViolation"), Error);
    }
    SUBCASE("torsion incompatible with the curvature hypotheses") {
        auto sys = get_system("sphere3");
        sys.T = RealTensor({3, 3, 3});
        (*sys.T)(0, 1, 2) = 1.0;
        (*sys.T)(1, 0, 2) = -1.0;
        CHECK_THROWS_WITH_AS(ak_certificate(sys, kCtx), doctest::Contains("HypothesisUnmet"),
                             Error);
    }
    SUBCASE("non-positive pairing is reported, not propagated") {
        auto sys = get_system("sphere3");
        sys.H(0, 0) = -1.0;
        auto reports = validate_system(sys, kCtx);
        REQUIRE_FALSE(reports.empty());
        CHECK(reports.front().name == "pairing_spd");
        CHECK_FALSE(reports.front().holds);
    }
}

TEST_CASE("holonomy systems extracted from curvature models") {
    SUBCASE("skew-torsion connection on the hopf model") {
        auto e = zoo::entry("hopf3@p");
        const auto& model = std::get<liegeom::Model>(e.object);
        auto sys = from_model(model, "bismut", kCtx);
        CHECK(sys.dim == 6);
        REQUIRE(sys.T.has_value());
        REQUIRE(sys.J.has_value());
        CHECK(sys.label == "hopf(3) [bismut]");
        check_all_hold(validate_system(sys, kCtx));

        // torsion is totally skew
        double skew = 0.0;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int c = 0; c < 6; ++c)
                    skew = std::max(skew, std::abs((*sys.T)(static_cast<std::size_t>(a),
                                                            static_cast<std::size_t>(b),
                                                            static_cast<std::size_t>(c)) +
                                                   (*sys.T)(static_cast<std::size_t>(a),
                                                            static_cast<std::size_t>(c),
                                                            static_cast<std::size_t>(b))));
        CHECK(skew < 1e-12);

        // a valid system, but the flatness theorem's hypotheses do not apply:
        // its curvature does not annihilate the torsion image
        CHECK_THROWS_WITH_AS(ak_certificate(sys, kCtx), doctest::Contains("HypothesisUnmet"),
                             Error);
    }
    SUBCASE("vanishing torsion slot routes through the skew case") {
        auto sys = get_system("sphere3");
        sys.T = RealTensor({3, 3, 3});  // explicitly attached, identically zero
        check_all_hold(validate_system(sys, kCtx));
        auto ak = ak_certificate(sys, kCtx);
        CHECK(ak.torsion_case == "skew");
        CHECK_FALSE(ak.contradiction);
        CHECK(ak.certificate.holds);
        CHECK((ak.ricci - 2.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("chern connection of a parallelizable model is flat") {
        auto e = zoo::entry("sl2c");
        const auto& model = std::get<liegeom::Model>(e.object);
        auto sys = from_model(model, "chern", kCtx);
        CHECK(sys.dim == 6);
        check_all_hold(validate_system(sys, kCtx));
        auto ak = ak_certificate(sys, kCtx);
        CHECK(ak.torsion_case == "flat");
        CHECK(ak.flat);
    }
    SUBCASE("subbundle restriction") {
        auto e = zoo::entry("sl2c");
        const auto& model = std::get<liegeom::Model>(e.object);
        Eigen::MatrixXcd K(3, 1);
        K << 1.0, 0.0, 0.0;
        auto sys = from_model(model, "chern", kCtx, K);
        CHECK(sys.dim == 2);
        check_all_hold(validate_system(sys, kCtx));

        Eigen::MatrixXcd bad(3, 1);
        bad << 1.0, 1.0, 0.0;
        CHECK_THROWS_WITH_AS(from_model(model, "chern", kCtx, bad),
                             doctest::Contains("InvalidModel"), Error);
    }
    SUBCASE("connections with non-parallel data are rejected") {
        auto hopf = std::get<liegeom::Model>(zoo::entry("hopf3@p").object);
        CHECK_THROWS_WITH_AS(from_model(hopf, "chern", kCtx), doctest::Contains("NotParallel"),
                             Error);
        auto aa = std::get<liegeom::Model>(zoo::entry("almost_abelian_unimodular").object);
        CHECK_THROWS_WITH_AS(from_model(aa, "chern", kCtx), doctest::Contains("NotParallel"),
                             Error);
        CHECK_THROWS_WITH_AS(from_model(hopf, "levi_civita", kCtx),
                             doctest::Contains("InvalidModel"), Error);
    }
}
