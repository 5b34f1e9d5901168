// Cross-cutting properties: serialization invariants, scalar-curvature
// relations along the Gauduchon family, brute-force Ricci contractions, and
// the finite-difference cross-check of closed-form derivatives.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <json.hpp>

#include "hermlab/errors.hpp"
#include "hermlab/liegeom.hpp"
#include "hermlab/modelio.hpp"
#include "hermlab/numlin.hpp"
#include "hermlab/zoo.hpp"

using namespace hermlab;
using numlin::Complex;

namespace {

const numlin::ToleranceContext kCtx{};

liegeom::Model zoo_model(const std::string& name) {
    return std::get<liegeom::Model>(zoo::entry(name).object);
}

std::string parse_error_kind(const nlohmann::ordered_json& doc) {
    try {
        (void)modelio::load(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    return "<no throw>";
}

}  // namespace

TEST_CASE("trace of the torsion-eta pairing equals the squared eta norm") {
    for (const auto& name : zoo::list()) {
        const auto e = zoo::entry(name);
        const auto* m = std::get_if<liegeom::Model>(&e.object);
        if (m == nullptr) continue;
        CAPTURE(name);
        const auto g = liegeom::geometry(*m, 0.0, kCtx);
        const auto td = liegeom::torsion_derived(g.torsion);
        CHECK(std::abs(td.phi.trace() - Complex(td.eta.squaredNorm(), 0.0)) < 1e-12);
    }
}

TEST_CASE("third-scalar shift along the family on torsion-parallel models") {
    // on models whose Chern torsion and curvature are parallel the third
    // scalar obeys s3(t) - s3(0) = -(t^2/4)(|T|^2 - |eta|^2), all t (the
    // skew-torsion value t = 2 included)
    int found = 0;
    for (const auto& name : zoo::list()) {
        const auto e = zoo::entry(name);
        const auto* m = std::get_if<liegeom::Model>(&e.object);
        if (m == nullptr) continue;
        const auto g0 = liegeom::geometry(*m, 0.0, kCtx);
        if (numlin::max_norm(covariant_derivative(g0.eval, g0.chern, g0.torsion)) > 1e-9)
            continue;
        if (numlin::max_norm(covariant_derivative(g0.eval, g0.chern, g0.curv_chern)) > 1e-9)
            continue;
        ++found;
        CAPTURE(name);
        const auto td = liegeom::torsion_derived(g0.torsion);
        const auto rs0 = liegeom::ricci(g0.eval, g0.curv_chern);
        for (double t : {-1.0, 1.0, 2.0, 3.0}) {
            const auto g = liegeom::geometry(*m, t, kCtx);
            const auto rs = liegeom::ricci(g.eval, g.curv_t);
            const double expected =
                -(t * t / 4.0) * (td.torsion_norm_sq - td.eta.squaredNorm());
            CHECK(std::abs((rs.s3 - rs0.s3) - expected) < 1e-10);
        }
    }
    CHECK(found >= 3);  // sl2c, abelian, and the split almost-abelian model
}

TEST_CASE("Ricci contractions agree with brute-force curvature traces") {
    for (const std::string name : {"sl2c", "hopf3@p", "nilpotent32", "almost_abelian_unimodular"}) {
        CAPTURE(name);
        const auto m = zoo_model(name);
        for (double t : {0.0, 2.0}) {
            const auto g = liegeom::geometry(m, t, kCtx);
            const int n = g.eval.n;
            const auto rs = liegeom::ricci(g.eval, g.curv_t);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Complex r1(0, 0), r2(0, 0), r3(0, 0);
                    for (int k = 0; k < n; ++k) {
                        r1 += g.curv_t.at(a, n + b, k, k);
                        r2 += g.curv_t.at(k, n + k, a, b);
                        r3 += g.curv_t.at(k, n + b, a, k);
                    }
                    CHECK(std::abs(rs.ric1(a, b) - r1) < 1e-12);
                    CHECK(std::abs(rs.ric2(a, b) - r2) < 1e-12);
                    CHECK(std::abs(rs.ric3(a, b) - r3) < 1e-12);
                }
        }
    }
}

TEST_CASE("finite-difference jets reproduce the closed-form derivatives") {
    Eigen::VectorXcd z(3);
    z << Complex(0.8, -0.3), Complex(0.2, 1.1), Complex(-0.6, 0.4);
    const auto m = zoo::hopf(3, z);
    for (double t : {0.0, 2.0}) {
        const auto g = liegeom::geometry(m, t, kCtx);
        const auto closed = covariant_derivative(g.eval, g.conn_t, g.curv_t);
        liegeom::CurvatureTensor fd = g.curv_t;
        fd.jets.reset();
        liegeom::attach_fd_jets(std::get<liegeom::PointwiseFrameModel>(m), g.conn_t, fd);
        const auto approx = covariant_derivative(g.eval, g.conn_t, fd);
        REQUIRE(closed.size() == approx.size());
        double diff = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i)
            diff = std::max(diff, std::abs(closed.data()[i] - approx.data()[i]));
        CHECK(diff < 1e-5);
    }
}

TEST_CASE("serialization rejects malformed documents") {
    using json = nlohmann::ordered_json;
    const json good = modelio::dump(zoo_model("nilpotent32"));

    json wrong_version = good;
    wrong_version["version"] = 2;
    CHECK(parse_error_kind(wrong_version) == "ParseError");

    json wrong_kind = good;
    wrong_kind["kind"] = "mystery";
    CHECK(parse_error_kind(wrong_kind) == "ParseError");

    json wrong_dims = good;
    wrong_dims["n"] = 4;  // C/D stay 3x3x3
    CHECK(parse_error_kind(wrong_dims) == "ParseError");

    json missing_field = good;
    missing_field.erase("D");
    CHECK(parse_error_kind(missing_field) == "ParseError");

    json bad_complex = good;
    bad_complex["C"][0][0][0] = json::array({1.0});  // needs [re, im]
    CHECK(parse_error_kind(bad_complex) == "ParseError");

    const json pw = modelio::dump(zoo_model("hopf3@p"));
    json bad_family = pw;
    bad_family["family"] = "sphere";
    CHECK(parse_error_kind(bad_family) == "ParseError");

    json bad_point = pw;
    bad_point["parameters"]["z"] = json::array({json::array({1.0, 0.0})});  // length 1 != n
    CHECK(parse_error_kind(bad_point) == "ParseError");

    const json sys = modelio::dump(
        std::get<holsys::HolonomySystem>(zoo::entry("sphere3").object));
    json bad_h = sys;
    bad_h["H"] = json::array({json::array({1.0})});  // 1x1 pairing for dim 6
    CHECK(parse_error_kind(bad_h) == "ParseError");
}

TEST_CASE("torsion-form compatibility pair holds exactly on the diagonal surface") {
    // dH = 0 together with Ric^g = (1/4) <i_x H, i_y H> characterizes the
    // n = 2 member of the diagonal family; higher n is not even pluriclosed
    auto brf = [](const std::string& name) {
        for (const auto& r : liegeom::predicates(zoo_model(name), kCtx))
            if (r.name == "brf_pair") return r;
        FAIL("predicate missing");
        return ConditionReport{};
    };
    const auto surface = brf("hopf2@p");
    CHECK(surface.holds);
    CHECK(surface.residual < 1e-9);
    const auto threefold = brf("hopf3@p");
    CHECK_FALSE(threefold.holds);
    CHECK(threefold.residual > 0.5);
}

TEST_CASE("analysis results are deterministic across repeated evaluation") {
    const auto m = zoo_model("sl2c");
    const auto a = liegeom::predicates(m, kCtx);
    const auto b = liegeom::predicates(m, kCtx);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].holds == b[i].holds);
        CHECK(a[i].residual == b[i].residual);  // bitwise
    }
}
