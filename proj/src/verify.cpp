#include "hermlab/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>

#include "hermlab/errors.hpp"
#include "hermlab/holsys.hpp"
#include "hermlab/liegeom.hpp"
#include "hermlab/numlin.hpp"
#include "hermlab/zoo.hpp"

namespace hermlab::verify {

namespace {

using liegeom::CurvatureTensor;
using liegeom::GeometryBundle;
using liegeom::HermitianConnection;
using liegeom::LieHermitianModel;
using liegeom::Model;
using liegeom::ModelEval;
using liegeom::PointwiseFrameModel;
using numlin::Complex;
using numlin::ComplexTensor;
using numlin::ToleranceContext;

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Residual/extremum accumulator for one criterion.
struct Checker {
    std::vector<CheckResult> checks;

    void le(std::string name, double worst, double bound, std::string detail = {}) {
        CheckResult c;
        c.name = std::move(name);
        c.worst = worst;
        c.bound = bound;
        c.kind = "<=";
        c.passed = worst <= bound;
        c.detail = std::move(detail);
        checks.push_back(std::move(c));
    }
    void ge(std::string name, double value, double floor_, std::string detail = {}) {
        CheckResult c;
        c.name = std::move(name);
        c.worst = value;
        c.bound = floor_;
        c.kind = ">=";
        c.passed = value >= floor_;
        c.detail = std::move(detail);
        checks.push_back(std::move(c));
    }
    void flag(std::string name, bool ok, std::string detail = {}) {
        CheckResult c;
        c.name = std::move(name);
        c.passed = ok;
        c.kind = "flag";
        c.detail = std::move(detail);
        checks.push_back(std::move(c));
    }

    [[nodiscard]] CriterionResult result(int index, std::string title) const {
        CriterionResult r;
        r.index = index;
        r.title = std::move(title);
        r.passed = std::all_of(checks.begin(), checks.end(),
                               [](const CheckResult& c) { return c.passed; });
        r.checks = checks;
        return r;
    }
};

/// All curated model entries (holonomy systems excluded), deterministic order.
std::vector<std::pair<std::string, Model>> all_models() {
    std::vector<std::pair<std::string, Model>> out;
    for (const auto& name : zoo::list()) {
        auto e = zoo::entry(name);
        if (const auto* m = std::get_if<Model>(&e.object)) out.emplace_back(name, *m);
    }
    return out;
}

double max_abs(const ComplexTensor& t) { return numlin::max_norm(t); }

Eigen::MatrixXcd random_unitary(int n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = Complex(d(rng), d(rng));
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

/// Component of x_M in nabla_{x_A} x_B for a connection carrying a mixed
/// block (the torsion-free one); barred fields by conjugation.
Complex full_coeff(const HermitianConnection& conn, int M, int B, int A, int n) {
    const bool mbar = M >= n;
    const bool bbar = B >= n;
    if (!bbar) {
        if (!mbar)
            return A < n ? conn.gamma_hol(uz(M), uz(B), uz(A)).v
                         : conn.gamma_antihol(uz(M), uz(B), uz(A - n)).v;
        return conn.gamma_mixed ? (*conn.gamma_mixed)(uz(M - n), uz(B), uz(A)).v
                                : Complex(0, 0);
    }
    const int Ab = (A + n) % (2 * n);
    if (mbar)
        return std::conj(Ab < n ? conn.gamma_hol(uz(M - n), uz(B - n), uz(Ab)).v
                                : conn.gamma_antihol(uz(M - n), uz(B - n), uz(Ab - n)).v);
    return conn.gamma_mixed ? std::conj((*conn.gamma_mixed)(uz(M), uz(B - n), uz(Ab)).v)
                            : Complex(0, 0);
}

/// Worst residual among reports with the given name (vacuous entries are
/// counted separately).
struct NamedWorst {
    double worst = 0.0;
    int fired = 0;
    int vacuous = 0;
    std::vector<std::string> fired_on;
    void absorb(const ConditionReport& r, const std::string& where) {
        if (r.witness.rfind("vacuous", 0) == 0) {
            ++vacuous;
            return;
        }
        ++fired;
        worst = std::max(worst, r.residual);
        if (fired_on.size() < 6) fired_on.push_back(where);
    }
};

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += ", ";
        s += x;
    }
    return s;
}

}  // namespace

// ============================================================================
// 1. diagonal Hopf family
// ============================================================================

CriterionResult criterion_hopf_family() {
    const ToleranceContext ctx{};
    Checker ck;
    std::mt19937 rng(0x243f6a88u);
    std::normal_distribution<double> dist(0.0, 1.0);

    double nabla_t = 0.0, nabla_r = 0.0, nabla_r_fd = 0.0, trace_res = 0.0;
    double curv_n2 = 0.0, curv_base_min = 1e300, curv_generic_min = 1e300, r2233_res = 0.0;

    for (int n = 2; n <= 4; ++n) {
        std::vector<Eigen::VectorXcd> points;
        Eigen::VectorXcd base = Eigen::VectorXcd::Zero(n);
        base(0) = 1.0;
        points.push_back(base);
        while (points.size() < 21) {
            Eigen::VectorXcd z(n);
            for (int i = 0; i < n; ++i) z(i) = Complex(dist(rng), dist(rng));
            if (z.norm() > 0.3) points.push_back(z);
        }

        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const Eigen::VectorXcd& z = points[pi];
            Model m = zoo::hopf(n, z);
            const GeometryBundle g = liegeom::geometry(m, 2.0, ctx);

            nabla_t = std::max(nabla_t,
                               max_abs(covariant_derivative(g.eval, g.conn_t, g.torsion)));
            nabla_r = std::max(nabla_r,
                               max_abs(covariant_derivative(g.eval, g.conn_t, g.curv_t)));

            CurvatureTensor fd = g.curv_t;
            fd.jets.reset();
            liegeom::attach_fd_jets(std::get<PointwiseFrameModel>(m), g.conn_t, fd);
            nabla_r_fd = std::max(nabla_r_fd,
                                  max_abs(covariant_derivative(g.eval, g.conn_t, fd)));

            const double cmax = numlin::max_norm(g.curv_t.R);
            if (n == 2) {
                curv_n2 = std::max(curv_n2, cmax);
            } else if (pi == 0) {
                curv_base_min = std::min(curv_base_min, cmax);
            } else {
                curv_generic_min = std::min(curv_generic_min, cmax);
            }

            // Ricci-type trace of the skew-torsion curvature:
            // sum_k R^b_{i bar j k bar k} = -(n-2) (delta_ij - u_i conj(u_j))
            const auto rs = liegeom::ricci(g.eval, g.curv_t);
            const Eigen::VectorXcd u = z.conjugate() / z.norm();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Complex target =
                        -double(n - 2) * ((i == j ? 1.0 : 0.0) - u(i) * std::conj(u(j)));
                    trace_res = std::max(trace_res, std::abs(rs.ric1(i, j) - target));
                }

            if (n >= 3 && pi == 0)
                r2233_res = std::max(
                    r2233_res, std::abs(g.curv_t.at(1, n + 1, 2, 2) - Complex(-1.0, 0.0)));
        }
    }

    ck.le("skew-torsion connection: torsion parallel (n=2..4, 21 points each)", nabla_t,
          1e-9);
    ck.le("skew-torsion connection: curvature parallel (closed-form jets)", nabla_r, 1e-9);
    ck.le("skew-torsion connection: curvature parallel (finite-difference jets)", nabla_r_fd,
          1e-5);
    ck.le("curvature vanishes for n=2", curv_n2, 1e-9);
    ck.ge("curvature max-norm at the base point (n>=3)", curv_base_min, 0.5);
    ck.ge("curvature nonzero at every sampled point (n>=3)", curv_generic_min, 0.1,
          "component max-norm dips to ~1/3 at generic points for n=3; floor certifies "
          "non-flatness");
    ck.le("R_{2 bar2 3 bar3} = -1 at the base point (n=3,4)", r2233_res, 1e-9);
    ck.le("Ricci-type trace constant", trace_res, 1e-9,
          "verified: sum_k R_{i bar j k bar k} = -(n-2)(delta_ij - u_i conj(u_j)), "
          "u = conj(z)/|z|");
    return ck.result(1, "diagonal Hopf family: parallel skew-torsion data and curvature");
}

// ============================================================================
// 2. almost-abelian and nilpotent Ricci profiles
// ============================================================================

CriterionResult criterion_ricci_profiles() {
    const ToleranceContext ctx{};
    Checker ck;

    {
        Eigen::MatrixXcd A(2, 2);
        A << Complex(0, 1), Complex(1, 0), Complex(0, 0), Complex(0, -1);
        const Model m = zoo::almost_abelian(Complex(0, 0), Eigen::VectorXcd::Zero(2), A);
        const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
        const auto rs = liegeom::ricci(g.eval, g.curv_chern);
        ck.le("almost-abelian: third Chern Ricci vanishes", numlin::max_norm(rs.ric3), 1e-9);
        ck.le("almost-abelian: first Chern Ricci vanishes", numlin::max_norm(rs.ric1), 1e-9);
        ck.ge("almost-abelian: Chern curvature is nonzero", numlin::max_norm(g.curv_chern.R),
              0.1);
    }
    {
        Eigen::MatrixXcd Y(1, 2);
        Y << Complex(1, 0), Complex(-1, 0);
        const Model m = zoo::nilpotent(3, 2, Y);
        const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
        const auto td = liegeom::torsion_derived(g.torsion);
        const auto rs = liegeom::ricci(g.eval, g.curv_chern);
        ck.le("nilpotent: balanced (torsion 1-form vanishes)", numlin::max_norm(td.eta),
              1e-9);
        ck.le("nilpotent: first Chern Ricci vanishes", numlin::max_norm(rs.ric1), 1e-9);
        ck.le("nilpotent: third Chern Ricci vanishes", numlin::max_norm(rs.ric3), 1e-9);
        ck.ge("nilpotent: second Chern Ricci is nonzero", numlin::max_norm(rs.ric2), 0.1);
        ck.ge("nilpotent: Chern curvature is nonzero", numlin::max_norm(g.curv_chern.R), 0.1);
    }
    return ck.result(2, "almost-abelian and nilpotent Ricci profiles");
}

// ============================================================================
// 3. complex-parallelizable model and the t-family identities
// ============================================================================

CriterionResult criterion_t_family() {
    const ToleranceContext ctx{};
    Checker ck;

    // flatness and the Ambrose-Singer property along the t-line
    {
        const Model m = std::get<Model>(zoo::entry("sl2c").object);
        const GeometryBundle g0 = liegeom::geometry(m, 0.0, ctx);
        ck.le("sl2c: Chern-flat", numlin::max_norm(g0.curv_chern.R), 1e-9);
        double as_res = 0.0;
        for (double t : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0}) {
            const GeometryBundle g = liegeom::geometry(m, t, ctx);
            as_res = std::max(as_res,
                              max_abs(covariant_derivative(g.eval, g.conn_t, g.torsion)));
            as_res = std::max(as_res,
                              max_abs(covariant_derivative(g.eval, g.conn_t, g.curv_t)));
        }
        ck.le("sl2c: torsion and curvature parallel for t in {-1,0,0.5,1,2,3}", as_res, 1e-9);
    }

    // unconditional expansion identities across the collection
    {
        double bianchi = 0.0, expansion = 0.0;
        for (const auto& [name, m] : all_models())
            for (double t : {-1.0, 1.0, 2.0, 3.0})
                for (const auto& r : liegeom::check_identities(m, t, ctx)) {
                    if (r.name == "first_bianchi_torsion")
                        bianchi = std::max(bianchi, r.residual);
                    if (r.name == "t_curvature_expansion")
                        expansion = std::max(expansion, r.residual);
                }
        ck.le("derivative-of-torsion Bianchi identity, all models, t in {-1,1,2,3}", bianchi,
              1e-8);
        ck.le("t-curvature expansion identity, all models, t in {-1,1,2,3}", expansion, 1e-8);
    }

    // scalar consequence on Chern-parallel models, t != 2
    {
        double scalar_res = 0.0;
        std::vector<std::string> cas_models;
        for (const auto& [name, m] : all_models()) {
            const GeometryBundle g0 = liegeom::geometry(m, 0.0, ctx);
            const double nt = max_abs(covariant_derivative(g0.eval, g0.chern, g0.torsion));
            if (nt > ctx.abs_tol) continue;
            const double nr = max_abs(covariant_derivative(g0.eval, g0.chern, g0.curv_chern));
            if (nr > ctx.abs_tol) continue;
            cas_models.push_back(name);
            const auto td = liegeom::torsion_derived(g0.torsion);
            const auto rs0 = liegeom::ricci(g0.eval, g0.curv_chern);
            for (double t : {-1.0, 1.0, 3.0}) {
                const GeometryBundle g = liegeom::geometry(m, t, ctx);
                const auto rst = liegeom::ricci(g.eval, g.curv_t);
                scalar_res = std::max(
                    scalar_res,
                    std::abs((rst.s3 - rs0.s3) + (t * t / 4.0) * td.torsion_norm_sq));
            }
        }
        ck.le("third-scalar shift = -(t^2/4)|T|^2 on torsion-parallel models (t != 2)",
              scalar_res, 1e-8, "models: " + join(cas_models));
    }

    // balanced contraction on t-parallel Ricci-flat models (gate may be empty)
    {
        NamedWorst nw;
        for (const auto& [name, m] : all_models())
            for (double t : {-1.0, 1.0, 3.0})
                for (const auto& r : liegeom::check_identities(m, t, ctx))
                    if (r.name == "as_ricci_flat_balanced_relation")
                        nw.absorb(r, name + " (t=" + num(t) + ")");
        const std::string note =
            nw.fired > 0 ? "fired on: " + join(nw.fired_on)
                         : "vacuous: no t-parallel model with vanishing third Ricci in the "
                           "collection (reported explicitly)";
        ck.le("balanced contraction on t-parallel Ricci-flat models", nw.worst, 1e-8, note);
    }
    return ck.result(3, "complex-parallelizable flatness and the t-family identities");
}

// ============================================================================
// 4. symmetric holonomy systems
// ============================================================================

CriterionResult criterion_holonomy_suite() {
    const ToleranceContext ctx{};
    Checker ck;

    double validate_res = 0.0, jacobi = 0.0, killing_res = 0.0, mixed_res = 0.0;
    double schur_dev = 0.0, schur_min_lambda = 1e300, kostant_res = 0.0;
    bool reducible_path = false, contradiction = false;

    for (const std::string name : {"cpn2", "sphere3", "flat4"}) {
        const auto sys = std::get<holsys::HolonomySystem>(zoo::entry(name).object);
        for (const auto& r : holsys::validate_system(sys, ctx))
            validate_res = std::max(validate_res, r.residual);
        const auto alg = holsys::nomizu(sys, ctx);
        jacobi = std::max(jacobi, alg.jacobi_residual);
        for (const auto& r : holsys::killing_checks(alg, sys, ctx)) {
            if (r.name == "killing_vs_compact_form")
                killing_res = std::max(killing_res, r.residual);
            if (r.name == "mixed_block") mixed_res = std::max(mixed_res, r.residual);
        }
        if (name == std::string("flat4")) {
            try {
                (void)holsys::schur_lambda(alg, sys, ctx);
            } catch (const Error& e) {
                reducible_path = (e.kind() == "Reducible");
            }
        } else {
            const auto sch = holsys::schur_lambda(alg, sys, ctx);
            schur_dev = std::max(schur_dev, sch.deviation);
            schur_min_lambda = std::min(schur_min_lambda, std::abs(sch.lambda));
            const auto kos = holsys::kostant_reconstruction(alg, sys, ctx);
            kostant_res = std::max(kostant_res, kos.vacuous ? 1e300 : kos.residual);
        }
        const auto cert = holsys::ak_certificate(sys, ctx);
        contradiction = contradiction || cert.contradiction;
    }

    ck.le("system validation residuals (cpn2, sphere3, flat4)", validate_res, 1e-9);
    ck.le("Nomizu-algebra Jacobi residual", jacobi, 1e-10);
    ck.le("trace form restricted to the algebra: K - 2<,>", killing_res, 1e-9);
    ck.le("trace-form mixed block", mixed_res, 1e-9);
    ck.le("Schur scalar deviation (cpn2, sphere3)", schur_dev, 1e-9);
    ck.ge("Schur scalar nonzero (cpn2, sphere3)", schur_min_lambda, 0.1);
    ck.flag("flat system rejected by the irreducibility gate", reducible_path,
            "Reducible raised on flat4 as required");
    ck.le("curvature reconstruction from the trace form", kostant_res, 1e-8);
    ck.flag("Ricci-flat-but-curved contradiction never fires", !contradiction);
    return ck.result(4, "symmetric holonomy systems end to end");
}

// ============================================================================
// 5. parallel-torsion models
// ============================================================================

CriterionResult criterion_parallel_torsion() {
    const ToleranceContext ctx{};
    Checker ck;

    double sym_res = 0.0, diff_res = 0.0, ric_diff_res = 0.0, contraction_res = 0.0;
    std::vector<std::string> btp_models, ric_gate, contraction_gate;

    for (const auto& [name, m] : all_models()) {
        const GeometryBundle g = liegeom::geometry(m, 2.0, ctx);
        const int n = g.eval.n;
        if (max_abs(covariant_derivative(g.eval, g.conn_t, g.torsion)) > ctx.abs_tol)
            continue;  // not torsion-parallel for the skew connection
        btp_models.push_back(name);

        // curvature pair symmetry R_{i bar j k bar l} = R_{k bar l i bar j}
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        sym_res = std::max(sym_res, std::abs(g.curv_t.at(i, n + j, k, l) -
                                                             g.curv_t.at(k, n + l, i, j)));

        // difference against the Chern curvature, unconditional
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        Complex rhs(0, 0);
                        for (int r = 0; r < n; ++r)
                            rhs += g.torsion.T(uz(j), uz(k), uz(r)).v *
                                   std::conj(g.torsion.T(uz(i), uz(l), uz(r)).v);
                        diff_res = std::max(
                            diff_res, std::abs(g.curv_chern.at(i, n + j, k, l) -
                                               g.curv_t.at(k, n + j, i, l) - rhs));
                    }

        // trace consequence and torsion contraction, gated on flat third Ricci
        const auto rs_b = liegeom::ricci(g.eval, g.curv_t);
        if (numlin::max_norm(rs_b.ric3) <= 1e-9) {
            ric_gate.push_back(name);
            const auto rs_c = liegeom::ricci(g.eval, g.curv_chern);
            const auto td = liegeom::torsion_derived(g.torsion);
            ric_diff_res = std::max(
                ric_diff_res, numlin::max_norm(Eigen::MatrixXcd(rs_c.ric1 - rs_b.ric3 - td.B)));

            contraction_gate.push_back(name);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        Complex acc(0, 0);
                        for (int r = 0; r < n; ++r)
                            acc += g.torsion.T(uz(j), uz(r), uz(k)).v * td.B(i, r) +
                                   g.torsion.T(uz(j), uz(i), uz(r)).v * td.B(k, r) -
                                   g.torsion.T(uz(r), uz(i), uz(k)).v * td.B(r, j);
                        contraction_res = std::max(contraction_res, std::abs(acc));
                    }
        }
    }

    ck.le("skew-torsion curvature pair symmetry on torsion-parallel models", sym_res, 1e-9,
          "models: " + join(btp_models));
    ck.le("Chern-vs-skew curvature difference identity", diff_res, 1e-8);
    ck.le("first-Ricci = torsion Gram tensor when the third Ricci vanishes", ric_diff_res,
          1e-9, ric_gate.empty() ? "vacuous: gate never fired" : "fired on: " + join(ric_gate));
    ck.le("torsion-Gram contraction on third-Ricci-flat models", contraction_res, 1e-8);

    // admissible frames on the diagonal family
    {
        double full_res = 0.0, second_res = 0.0;
        for (const std::string name : {"hopf2@p", "hopf3@p", "hopf4@p", "hopf3_generic"}) {
            const auto m = std::get<Model>(zoo::entry(name).object);
            const auto af = liegeom::admissible_frame(m, ctx);
            const int n = static_cast<int>(af.b.size());
            for (int i = 0; i < n; ++i) {
                second_res = std::max(second_res,
                                      std::abs(af.b(i) - 2.0 * std::norm(af.a(i)) -
                                               2.0 * af.delta(i)));
                if (n == 2)
                    full_res = std::max(full_res,
                                        std::abs(af.b(i) - af.lambda * 2.0 * af.a(i).real()));
            }
        }
        ck.le("admissible frame: b_i = 2|a_i|^2 + 2 delta_i (n = 2,3,4)", second_res, 1e-8);
        ck.le("admissible frame: b_i = lambda (a_i + conj a_i) (n = 2)", full_res, 1e-8,
              "first equality needs the vanishing third Ricci hypothesis, met only at n=2 "
              "in this family");
    }
    return ck.result(5, "parallel-torsion curvature symmetries and admissible frames");
}

// ============================================================================
// 6. structural invariances
// ============================================================================

CriterionResult criterion_invariances() {
    const ToleranceContext ctx{};
    Checker ck;
    std::mt19937 rng(0x85ebca6bu);

    // frame covariance: invariant scalars and predicate booleans under 100
    // random unitary frame changes per left-invariant model
    {
        double scalar_res = 0.0;
        bool bools_stable = true;
        int frames = 0;
        for (const auto& [name, m] : all_models()) {
            const auto* lie = std::get_if<LieHermitianModel>(&m);
            if (lie == nullptr) continue;
            const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
            const auto td = liegeom::torsion_derived(g.torsion);
            const auto rs = liegeom::ricci(g.eval, g.curv_chern);
            const auto base_preds = liegeom::predicates(m, ctx);

            for (int trial = 0; trial < 100; ++trial) {
                const Model changed = liegeom::change_frame(*lie, random_unitary(lie->n, rng));
                const GeometryBundle gc = liegeom::geometry(changed, 0.0, ctx);
                const auto tdc = liegeom::torsion_derived(gc.torsion);
                const auto rsc = liegeom::ricci(gc.eval, gc.curv_chern);
                scalar_res = std::max(
                    scalar_res,
                    std::max({std::abs(td.torsion_norm_sq - tdc.torsion_norm_sq),
                              std::abs(td.eta.norm() - tdc.eta.norm()),
                              std::abs(rs.s1 - rsc.s1), std::abs(rs.s3 - rsc.s3)}));
                const auto preds = liegeom::predicates(changed, ctx);
                if (preds.size() != base_preds.size()) {
                    bools_stable = false;
                } else {
                    for (std::size_t i = 0; i < preds.size(); ++i)
                        if (preds[i].name != base_preds[i].name ||
                            preds[i].holds != base_preds[i].holds)
                            bools_stable = false;
                }
                ++frames;
            }
        }
        ck.le("invariant scalars under random unitary frames", scalar_res, 1e-8,
              std::to_string(frames) + " frames");
        ck.flag("predicate booleans stable under random unitary frames", bools_stable);
    }

    // Chern curvature (1,1)-purity on every model
    {
        double purity = 0.0;
        for (const auto& [name, m] : all_models()) {
            const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
            const int n = g.eval.n;
            for (int A = 0; A < 2 * n; ++A)
                for (int B = 0; B < 2 * n; ++B) {
                    if ((A < n) != (B < n)) continue;  // mixed pairs are the (1,1) block
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            purity = std::max(purity, std::abs(g.curv_chern.at(A, B, k, l)));
                }
        }
        ck.le("Chern curvature (1,1)-purity", purity, 1e-8);
    }

    // d^2 = 0 on random constant 1-forms
    {
        std::normal_distribution<double> d(0.0, 1.0);
        double dd = 0.0;
        for (const auto& [name, m] : all_models()) {
            const ModelEval eval = liegeom::evaluate(m);
            const int n = eval.n;
            for (int trial = 0; trial < 3; ++trial) {
                ComplexTensor vals({uz(2 * n)});
                for (int A = 0; A < 2 * n; ++A) vals(uz(A)) = Complex(d(rng), d(rng));
                const auto alpha = liegeom::constant_form(1, n, vals);
                const auto d1 = liegeom::ce_differential(eval, alpha);
                const auto d2 = liegeom::ce_differential(eval, d1.form, d1.jets_valid);
                dd = std::max(dd, max_abs(numlin::values(d2.form.comp)));
            }
        }
        ck.le("exterior differential squares to zero", dd, 1e-8);
    }

    // torsion-free reference connection round-trip
    {
        double torsion_res = 0.0;
        for (const auto& [name, m] : all_models()) {
            const ModelEval eval = liegeom::evaluate(m);
            const int n = eval.n;
            const auto lc = liegeom::levi_civita(eval, ctx);
            const auto F = liegeom::bracket_tensor(eval);
            for (int A = 0; A < 2 * n; ++A)
                for (int B = 0; B < 2 * n; ++B)
                    for (int M = 0; M < 2 * n; ++M) {
                        const Complex t = full_coeff(lc, M, B, A, n) -
                                          full_coeff(lc, M, A, B, n) - F(uz(M), uz(A), uz(B)).v;
                        torsion_res = std::max(torsion_res, std::abs(t));
                    }
        }
        ck.le("torsion-free connection round-trip", torsion_res, 1e-8);
    }

    // invariant-subspace block invariance, real and complex paths
    {
        double inv_res = 0.0;
        const auto sys = std::get<holsys::HolonomySystem>(zoo::entry("sphere3").object);
        const auto blocks = numlin::invariant_subspaces_real(sys.g_basis, sys.dim, ctx);
        for (const auto& P : blocks)
            for (const auto& G : sys.g_basis) {
                const Eigen::MatrixXd proj =
                    Eigen::MatrixXd::Identity(sys.dim, sys.dim) - P * P.transpose();
                inv_res = std::max(inv_res, (proj * G * P).cwiseAbs().maxCoeff());
            }

        const auto m = std::get<Model>(zoo::entry("almost_abelian_unimodular").object);
        const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
        const int n = g.eval.n;
        std::vector<Eigen::MatrixXcd> ops;
        for (int A = 0; A < 2 * n; ++A)
            for (int B = A + 1; B < 2 * n; ++B) {
                Eigen::MatrixXcd op(n, n);
                for (int l = 0; l < n; ++l)
                    for (int k = 0; k < n; ++k) op(l, k) = g.curv_chern.at(A, B, k, l);
                if (op.cwiseAbs().maxCoeff() > 1e-12) ops.push_back(op);
            }
        int total = 0;
        for (const auto& P : numlin::invariant_subspaces(ops, n, ctx)) {
            total += static_cast<int>(P.cols());
            const Eigen::MatrixXcd proj =
                Eigen::MatrixXcd::Identity(n, n) - P * P.adjoint();
            for (const auto& op : ops)
                inv_res = std::max(inv_res, (proj * op * P).cwiseAbs().maxCoeff());
        }
        ck.le("invariant-subspace blocks are generator-invariant", inv_res, 1e-8);
        ck.flag("invariant-subspace blocks span the space", total == n);
    }
    return ck.result(6, "frame covariance and structural invariances");
}

// ============================================================================
// suites and formatting
// ============================================================================

std::vector<CriterionResult> run_suite(const std::string& suite) {
    std::vector<CriterionResult> out;
    if (suite == "appendix") {
        out.push_back(criterion_hopf_family());
    } else if (suite == "identities") {
        out.push_back(criterion_t_family());
        out.push_back(criterion_parallel_torsion());
    } else if (suite == "holonomy") {
        out.push_back(criterion_holonomy_suite());
    } else if (suite == "all") {
        out.push_back(criterion_hopf_family());
        out.push_back(criterion_ricci_profiles());
        out.push_back(criterion_t_family());
        out.push_back(criterion_holonomy_suite());
        out.push_back(criterion_parallel_torsion());
        out.push_back(criterion_invariances());
    } else {
        throw Error("UnknownModel", "unknown suite '" + suite +
                                        "' (expected identities, holonomy, appendix, all)");
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << r.index << ": " << r.title;
    double worst = 0.0;
    for (const auto& c : r.checks)
        if (c.kind == "<=") worst = std::max(worst, c.worst);
    os << " (" << r.checks.size() << " checks, worst residual " << num(worst) << ")";
    std::vector<std::string> notes;
    for (const auto& c : r.checks) {
        if (!c.passed) notes.push_back("FAILED: " + c.name + " (" + num(c.worst) + ")");
        else if (!c.detail.empty()) notes.push_back(c.detail);
    }
    if (!notes.empty()) os << " | " << join(notes);
    return os.str();
}

std::vector<std::string> format_checks(const CriterionResult& r) {
    std::vector<std::string> out;
    for (const auto& c : r.checks) {
        std::ostringstream os;
        os << "  " << (c.passed ? "[ok]  " : "[FAIL]") << " " << c.name;
        if (c.kind == "<=")
            os << ": worst " << num(c.worst) << " (bound " << num(c.bound) << ")";
        else if (c.kind == ">=")
            os << ": value " << num(c.worst) << " (floor " << num(c.bound) << ")";
        if (!c.detail.empty()) os << " — " << c.detail;
        out.push_back(os.str());
    }
    return out;
}

}  // namespace hermlab::verify
