#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hermlab/errors.hpp"
#include "hermlab/zoo.hpp"

using namespace hermlab;
using Cx = std::complex<double>;

namespace {
const numlin::ToleranceContext kCtx{};
}

TEST_CASE("every curated entry matches its frozen expected values") {
    auto names = zoo::list();
    CHECK(names.size() == 14);
    for (const auto& name : names) {
        auto e = zoo::entry(name);
        CHECK(e.name == name);
        CHECK_FALSE(e.expected.empty());
        for (const auto& exp : e.expected) {
            CAPTURE(name);
            CAPTURE(exp.name);
            const double got = zoo::evaluate_expected(e, exp.name, kCtx);
            CAPTURE(got);
            CAPTURE(exp.value);
            CHECK(std::abs(got - exp.value) <= exp.tol);
        }
    }
}

TEST_CASE("unknown names are rejected") {
    CHECK_THROWS_WITH_AS(zoo::entry("no-such-model"), doctest::Contains("UnknownModel"), Error);
    auto e = zoo::entry("sl2c");
    CHECK_THROWS_WITH_AS(zoo::evaluate_expected(e, "no-such-value", kCtx),
                         doctest::Contains("UnknownModel"), Error);
}

TEST_CASE("builder input validation") {
    Eigen::MatrixXcd bad(1, 2);
    bad << Cx(1, 0), Cx(1, 0);  // row sum 2 != 0
    CHECK_THROWS_WITH_AS(zoo::nilpotent(3, 2, bad), doctest::Contains("BadRowSum"), Error);

    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_AS(zoo::hopf(3, z), Error);
    Eigen::VectorXcd w(2);
    w << Cx(1, 0), Cx(0, 0);
    CHECK_THROWS_AS(zoo::hopf(3, w), Error);
    CHECK_THROWS_AS(zoo::complex_simple("e8"), Error);
}

TEST_CASE("construction is deterministic") {
    auto a = zoo::entry("sl2c");
    auto b = zoo::entry("sl2c");
    const auto& ma = std::get<liegeom::LieHermitianModel>(std::get<liegeom::Model>(a.object));
    const auto& mb = std::get<liegeom::LieHermitianModel>(std::get<liegeom::Model>(b.object));
    REQUIRE(ma.C.size() == mb.C.size());
    for (std::size_t i = 0; i < ma.C.size(); ++i) {
        CHECK(ma.C.data()[i] == mb.C.data()[i]);
        CHECK(ma.D.data()[i] == mb.D.data()[i]);
    }

    auto sa = std::get<holsys::HolonomySystem>(zoo::entry("cpn2").object);
    auto sb = std::get<holsys::HolonomySystem>(zoo::entry("cpn2").object);
    REQUIRE(sa.Rm.size() == sb.Rm.size());
    for (std::size_t i = 0; i < sa.Rm.size(); ++i) CHECK(sa.Rm.data()[i] == sb.Rm.data()[i]);
}
