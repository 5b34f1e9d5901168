#include "hermlab/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hermlab/errors.hpp"
#include "hermlab/holsys.hpp"
#include "hermlab/liegeom.hpp"
#include "hermlab/modelio.hpp"
#include "hermlab/numlin.hpp"
#include "hermlab/split.hpp"
#include "hermlab/verify.hpp"
#include "hermlab/zoo.hpp"

namespace hermlab::cli {

namespace {

using json = nlohmann::ordered_json;
using liegeom::GeometryBundle;
using liegeom::LieHermitianModel;
using liegeom::Model;
using numlin::Complex;
using numlin::ToleranceContext;

struct ReportOptions {
    double tol = 1e-9;
    std::vector<double> t_values{-1.0, 0.0, 0.5, 1.0, 2.0, 3.0};
    std::string json_path;
    std::vector<std::string> checks;
    int seed = -1;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const char* tick(bool b) { return b ? "✓" : "✗"; }
const char* yn(bool b) { return b ? "yes" : "no"; }

void heading(const std::string& title) { std::printf("\n== %s ==\n", title.c_str()); }

json mat_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

modelio::Object load_target(const std::string& target) {
    if (target.rfind("zoo:", 0) == 0) {
        const auto e = zoo::entry(target.substr(4));
        if (const auto* m = std::get_if<Model>(&e.object)) return *m;
        return std::get<holsys::HolonomySystem>(e.object);
    }
    return modelio::load_file(target);
}

bool keep_predicate(const std::string& name, const std::vector<std::string>& filter) {
    if (filter.empty()) return true;
    for (const auto& f : filter)
        if (name == f || name.rfind(f, 0) == 0) return true;
    return false;
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = Complex(d(rng), d(rng));
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

// ---------------------------------------------------------------------------
// report sections (Hermitian model)
// ---------------------------------------------------------------------------

void section_summary(const Model& m, const std::string& source, const ToleranceContext& ctx,
                     json& out) {
    const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
    const auto td = liegeom::torsion_derived(g.torsion);
    std::string label, kind;
    if (const auto* lie = std::get_if<LieHermitianModel>(&m)) {
        label = lie->label;
        kind = "lie";
    } else {
        label = std::get<liegeom::PointwiseFrameModel>(m).label;
        kind = "pointwise";
    }
    heading("model");
    std::printf("label %s, n = %d, kind %s, source %s\n", label.c_str(), g.eval.n,
                kind.c_str(), source.c_str());
    std::printf("|T|^2 = %s, |eta| = %s\n", num(td.torsion_norm_sq).c_str(),
                num(td.eta.norm()).c_str());
    out["label"] = label;
    out["n"] = g.eval.n;
    out["kind"] = kind;
    out["torsion"] = {{"norm_sq", td.torsion_norm_sq}, {"eta_norm", td.eta.norm()}};
}

void section_predicates(const Model& m, const ReportOptions& opt,
                        const ToleranceContext& ctx, json& out) {
    liegeom::PredicateOptions popts;
    popts.as_t_values = opt.t_values;
    const auto rows = liegeom::predicates(m, ctx, popts);
    heading("predicates");
    json arr = json::array();
    for (const auto& r : rows) {
        if (!keep_predicate(r.name, opt.checks)) continue;
        std::printf("  %-22s %s  residual %-10s %s\n", r.name.c_str(), tick(r.holds),
                    num(r.residual).c_str(), r.witness.c_str());
        arr.push_back({{"name", r.name},
                       {"holds", r.holds},
                       {"residual", r.residual},
                       {"witness", r.witness}});
    }
    out["predicates"] = std::move(arr);
}

void section_ricci(const Model& m, const ReportOptions& opt, const ToleranceContext& ctx,
                   json& out) {
    heading("ricci");
    std::printf("  %-16s %-10s %-10s %-10s %-10s %-10s %-10s\n", "connection", "s1", "s3",
                "max|ric1|", "max|ric2|", "max|ric3|", "max|R|");
    json arr = json::array();
    std::vector<std::pair<std::string, double>> rows = {{"chern", 0.0}, {"bismut", 2.0}};
    for (double t : opt.t_values)
        if (t != 0.0 && t != 2.0) rows.emplace_back("t=" + num(t), t);
    for (const auto& [name, t] : rows) {
        const GeometryBundle g = liegeom::geometry(m, t, ctx);
        const auto rs = liegeom::ricci(g.eval, g.curv_t);
        const double rmax = numlin::max_norm(g.curv_t.R);
        std::printf("  %-16s %-10s %-10s %-10s %-10s %-10s %-10s\n", name.c_str(),
                    num(rs.s1).c_str(), num(rs.s3).c_str(),
                    num(numlin::max_norm(rs.ric1)).c_str(),
                    num(numlin::max_norm(rs.ric2)).c_str(),
                    num(numlin::max_norm(rs.ric3)).c_str(), num(rmax).c_str());
        arr.push_back({{"connection", name},
                       {"t", t},
                       {"s1", rs.s1},
                       {"s3", rs.s3},
                       {"ric1_max", numlin::max_norm(rs.ric1)},
                       {"ric2_max", numlin::max_norm(rs.ric2)},
                       {"ric3_max", numlin::max_norm(rs.ric3)},
                       {"curvature_max", rmax}});
    }
    out["ricci"] = std::move(arr);
}

void section_identities(const Model& m, const ReportOptions& opt,
                        const ToleranceContext& ctx, json& out) {
    heading("identities");
    json arr = json::array();
    for (double t : opt.t_values)
        for (const auto& r : liegeom::check_identities(m, t, ctx)) {
            std::printf("  t=%-6s %-34s %s  residual %-10s %s\n", num(t).c_str(),
                        r.name.c_str(), tick(r.holds), num(r.residual).c_str(),
                        r.witness.c_str());
            arr.push_back({{"t", t},
                           {"name", r.name},
                           {"holds", r.holds},
                           {"residual", r.residual},
                           {"witness", r.witness}});
        }
    out["identities"] = std::move(arr);
}

void section_decomposition(const Model& m, const ToleranceContext& ctx, json& out) {
    heading("torsion decomposition");
    auto rep = split::torsion_split(m, ctx);
    json dec;
    dec["n"] = rep.n;
    dec["ell1"] = rep.ell1;
    dec["W_basis"] = mat_json(rep.W_basis);
    dec["N_basis"] = mat_json(rep.N_basis);
    dec["N0_basis"] = mat_json(rep.N0_basis);
    std::printf("dim W = %d (torsion image), dim N = %d, dim N0 = %d\n", rep.ell1,
                static_cast<int>(rep.N_basis.cols()), static_cast<int>(rep.N0_basis.cols()));
    try {
        const auto taus = split::tau_forms(m, rep, ctx);
        json tarr = json::array();
        for (std::size_t i = 0; i < taus.size(); ++i) {
            std::printf("2-form %zu: parallel residual %s, closure residual %s\n", i + 1,
                        num(taus[i].parallel_residual).c_str(),
                        num(taus[i].closure_residual).c_str());
            tarr.push_back({{"form", mat_json(taus[i].form)},
                            {"parallel_residual", taus[i].parallel_residual},
                            {"closure_residual", taus[i].closure_residual}});
        }
        dec["tau_forms"] = std::move(tarr);
        if (!taus.empty()) {
            const auto chosen = split::choose_tau(rep, ctx);
            const auto blocks = split::symplectic_blocks(rep, chosen, ctx);
            dec["chosen_tau"] = mat_json(chosen);
            dec["A_matrix"] = mat_json(rep.A_matrix);
            dec["ell2"] = rep.ell2;
            json barr = json::array();
            int twice = 0;
            for (const auto& b : blocks) {
                std::printf("block: b = %s, n_j = %d\n", num(b.b).c_str(), b.n_j);
                barr.push_back(
                    {{"b", b.b}, {"n_j", b.n_j}, {"basis", mat_json(b.basis)}});
                twice += 2 * b.n_j;
            }
            dec["blocks"] = std::move(barr);
            std::printf("ell1 = %d, ell2 = %d, 2*sum(n_j) + ell1 + ell2 = %d (n = %d)\n",
                        rep.ell1, rep.ell2, twice + rep.ell1 + rep.ell2, rep.n);
        } else {
            std::printf("torsion-free: nothing to decompose\n");
            dec["note"] = "torsion-free: nothing to decompose";
        }
    } catch (const Error& e) {
        std::printf("decomposition stopped: %s\n", e.what());
        dec["status"] = e.kind();
        dec["note"] = e.what();
    }
    const auto tf = split::trace_free_check(m, rep, ctx);
    std::printf("trace-free check: %s residual %s %s\n", tick(tf.holds),
                num(tf.residual).c_str(), tf.witness.c_str());
    dec["trace_free"] = {{"holds", tf.holds},
                         {"residual", tf.residual},
                         {"witness", tf.witness}};
    out["decomposition"] = std::move(dec);
}

bool is_as(const Model& m, double t, const ToleranceContext& ctx) {
    const GeometryBundle g = liegeom::geometry(m, t, ctx);
    if (numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.torsion)) > ctx.abs_tol)
        return false;
    return numlin::max_norm(covariant_derivative(g.eval, g.conn_t, g.curv_t)) <= ctx.abs_tol;
}

void section_holonomy(const Model& m, const ToleranceContext& ctx, json& out) {
    json arr = json::array();
    for (const auto& [tag, t] :
         std::vector<std::pair<std::string, double>>{{"chern", 0.0}, {"bismut", 2.0}}) {
        if (!is_as(m, t, ctx)) continue;
        heading("holonomy system (" + tag + ")");
        json entry;
        entry["tag"] = tag;
        try {
            const auto sys = holsys::from_model(m, tag, ctx);
            std::printf("dim %d, generators %zu, torsion attached: %s\n", sys.dim,
                        sys.g_basis.size(), yn(sys.T.has_value()));
            entry["dim"] = sys.dim;
            entry["generators"] = sys.g_basis.size();
            entry["torsion_attached"] = sys.T.has_value();
            const auto cert = holsys::ak_certificate(sys, ctx);
            std::printf(
                "certificate: case %s, ricci flat %s, flat %s, contradiction %s, "
                "agreement %s\n",
                cert.torsion_case.c_str(), yn(cert.ricci_flat), yn(cert.flat),
                yn(cert.contradiction), num(cert.ricci_agreement).c_str());
            entry["certificate"] = {{"case", cert.torsion_case},
                                    {"ricci_flat", cert.ricci_flat},
                                    {"flat", cert.flat},
                                    {"contradiction", cert.contradiction},
                                    {"ricci_agreement", cert.ricci_agreement}};
        } catch (const Error& e) {
            std::printf("holonomy analysis stopped: %s\n", e.what());
            entry["status"] = e.kind();
            entry["note"] = e.what();
        }
        arr.push_back(std::move(entry));
    }
    if (!arr.empty()) out["holonomy"] = std::move(arr);
}

void section_frame_covariance(const Model& m, const ReportOptions& opt,
                              const ToleranceContext& ctx, json& out) {
    heading("frame covariance (seed " + std::to_string(opt.seed) + ")");
    const auto* lie = std::get_if<LieHermitianModel>(&m);
    if (lie == nullptr) {
        std::printf("requires a left-invariant model; skipped\n");
        out["frame_covariance"] = {{"skipped", "requires a left-invariant model"}};
        return;
    }
    liegeom::PredicateOptions popts;
    popts.as_t_values = opt.t_values;
    const GeometryBundle g = liegeom::geometry(m, 0.0, ctx);
    const auto td = liegeom::torsion_derived(g.torsion);
    const auto rs = liegeom::ricci(g.eval, g.curv_chern);
    const auto base = liegeom::predicates(m, ctx, popts);
    std::mt19937 rng(static_cast<unsigned>(opt.seed));
    double dev = 0.0;
    bool stable = true;
    const int frames = 20;
    for (int trial = 0; trial < frames; ++trial) {
        const Model changed = liegeom::change_frame(*lie, random_unitary(lie->n, rng));
        const GeometryBundle gc = liegeom::geometry(changed, 0.0, ctx);
        const auto tdc = liegeom::torsion_derived(gc.torsion);
        const auto rsc = liegeom::ricci(gc.eval, gc.curv_chern);
        dev = std::max(dev, std::max({std::abs(td.torsion_norm_sq - tdc.torsion_norm_sq),
                                      std::abs(td.eta.norm() - tdc.eta.norm()),
                                      std::abs(rs.s1 - rsc.s1), std::abs(rs.s3 - rsc.s3)}));
        const auto preds = liegeom::predicates(changed, ctx, popts);
        for (std::size_t i = 0; i < preds.size() && i < base.size(); ++i)
            if (preds[i].holds != base[i].holds) stable = false;
    }
    std::printf("%d random unitary frames: max scalar deviation %s, predicates stable: %s\n",
                frames, num(dev).c_str(), yn(stable));
    out["frame_covariance"] = {
        {"frames", frames}, {"max_scalar_deviation", dev}, {"predicates_stable", stable}};
}

// ---------------------------------------------------------------------------
// report (holonomy system)
// ---------------------------------------------------------------------------

int report_system(const holsys::HolonomySystem& sys, const std::string& source,
                  const ToleranceContext& ctx, json& out) {
    heading("holonomy system");
    std::printf("label %s, dim %d, generators %zu, torsion attached: %s, source %s\n",
                sys.label.c_str(), sys.dim, sys.g_basis.size(), yn(sys.T.has_value()),
                source.c_str());
    out["label"] = sys.label;
    out["kind"] = "holonomy-system";
    out["dim"] = sys.dim;
    out["generators"] = sys.g_basis.size();

    heading("validation");
    bool ok = true;
    json varr = json::array();
    for (const auto& r : holsys::validate_system(sys, ctx)) {
        std::printf("  %-34s %s  residual %-10s %s\n", r.name.c_str(), tick(r.holds),
                    num(r.residual).c_str(), r.witness.c_str());
        varr.push_back({{"name", r.name}, {"holds", r.holds}, {"residual", r.residual}});
        ok = ok && r.holds;
    }
    out["validation"] = std::move(varr);
    if (!ok) {
        std::fprintf(stderr, "error: holonomy system fails validation\n");
        return 2;
    }

    heading("algebra");
    const auto alg = holsys::nomizu(sys, ctx);
    std::printf("Nomizu Jacobi residual %s\n", num(alg.jacobi_residual).c_str());
    out["jacobi_residual"] = alg.jacobi_residual;
    json karr = json::array();
    for (const auto& r : holsys::killing_checks(alg, sys, ctx)) {
        std::printf("  %-34s %s  residual %-10s\n", r.name.c_str(), tick(r.holds),
                    num(r.residual).c_str());
        karr.push_back({{"name", r.name}, {"holds", r.holds}, {"residual", r.residual}});
    }
    out["trace_form"] = std::move(karr);

    try {
        const auto sch = holsys::schur_lambda(alg, sys, ctx);
        std::printf("Schur scalar lambda = %s (deviation %s)\n", num(sch.lambda).c_str(),
                    num(sch.deviation).c_str());
        out["schur"] = {{"lambda", sch.lambda}, {"deviation", sch.deviation}};
        const auto kos = holsys::kostant_reconstruction(alg, sys, ctx);
        std::printf("curvature reconstruction: residual %s, condition %s%s\n",
                    num(kos.residual).c_str(), num(kos.condition_number).c_str(),
                    kos.vacuous ? " (vacuous)" : "");
        out["reconstruction"] = {{"residual", kos.residual},
                                 {"condition_number", kos.condition_number},
                                 {"vacuous", kos.vacuous}};
    } catch (const Error& e) {
        std::printf("Schur/reconstruction stopped: %s\n", e.what());
        out["schur"] = {{"status", e.kind()}, {"note", e.what()}};
    }

    try {
        const auto cert = holsys::ak_certificate(sys, ctx);
        std::printf(
            "certificate: case %s, ricci flat %s, flat %s, contradiction %s, agreement %s\n",
            cert.torsion_case.c_str(), yn(cert.ricci_flat), yn(cert.flat),
            yn(cert.contradiction), num(cert.ricci_agreement).c_str());
        out["certificate"] = {{"case", cert.torsion_case},
                              {"ricci_flat", cert.ricci_flat},
                              {"flat", cert.flat},
                              {"contradiction", cert.contradiction},
                              {"ricci_agreement", cert.ricci_agreement}};
    } catch (const Error& e) {
        std::printf("certificate stopped: %s\n", e.what());
        out["certificate"] = {{"status", e.kind()}, {"note", e.what()}};
    }
    return 0;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_report(const std::string& target, const ReportOptions& opt) {
    ToleranceContext ctx{};
    ctx.abs_tol = opt.tol;

    modelio::Object obj;
    try {
        obj = load_target(target);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return (e.kind() == "ParseError" || e.kind() == "UnknownModel") ? 1 : 2;
    }

    json out;
    out["target"] = target;
    out["tolerance"] = ctx.abs_tol;

    int code = 0;
    if (const auto* sys = std::get_if<holsys::HolonomySystem>(&obj)) {
        code = report_system(*sys, target, ctx, out);
    } else {
        const Model& m = std::get<Model>(obj);
        try {
            if (const auto* lie = std::get_if<LieHermitianModel>(&m))
                liegeom::validate(*lie, ctx);
            section_summary(m, target, ctx, out);
        } catch (const Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
        section_predicates(m, opt, ctx, out);
        section_ricci(m, opt, ctx, out);
        section_identities(m, opt, ctx, out);
        section_decomposition(m, ctx, out);
        section_holonomy(m, ctx, out);
        if (opt.seed >= 0) section_frame_covariance(m, opt, ctx, out);
        out["model"] = modelio::dump(m);
    }

    if (!opt.json_path.empty()) {
        std::ofstream f(opt.json_path);
        if (!f) {
            std::fprintf(stderr, "error: cannot write %s\n", opt.json_path.c_str());
            return 1;
        }
        f << out.dump(2) << "\n";
    }
    return code;
}

int cmd_verify(const std::string& suite) {
    bool all = true;
    for (const auto& r : verify::run_suite(suite)) {
        std::printf("%s\n", verify::format_line(r).c_str());
        for (const auto& line : verify::format_checks(r)) std::printf("%s\n", line.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 3;
}

int cmd_zoo_list() {
    json arr = json::array();
    for (const auto& name : zoo::list()) {
        const auto e = zoo::entry(name);
        json row;
        row["name"] = name;
        if (const auto* m = std::get_if<Model>(&e.object)) {
            if (const auto* lie = std::get_if<LieHermitianModel>(m)) {
                row["kind"] = "lie";
                row["label"] = lie->label;
                row["n"] = lie->n;
            } else {
                const auto& pw = std::get<liegeom::PointwiseFrameModel>(*m);
                row["kind"] = "pointwise";
                row["label"] = pw.label;
                row["n"] = pw.n;
            }
        } else {
            const auto& sys = std::get<holsys::HolonomySystem>(e.object);
            row["kind"] = "holonomy-system";
            row["label"] = sys.label;
            row["n"] = sys.dim;
        }
        arr.push_back(std::move(row));
    }
    std::printf("%s\n", arr.dump(2).c_str());
    return 0;
}

int cmd_zoo_dump(const std::string& name) {
    try {
        const auto e = zoo::entry(name);
        modelio::Object obj;
        if (const auto* m = std::get_if<Model>(&e.object))
            obj = *m;
        else
            obj = std::get<holsys::HolonomySystem>(e.object);
        std::printf("%s\n", modelio::dump(obj).dump(2).c_str());
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"canonical Hermitian connections on homogeneous models"};
    app.require_subcommand(1);

    std::string target, t_spec, suite, dump_name;
    ReportOptions opt;

    auto* rep = app.add_subcommand("report", "analyze one model and print a report");
    rep->add_option("target", target, "model file path or zoo:<name>")->required();
    rep->add_option("--tol", opt.tol, "absolute tolerance (default 1e-9)")
        ->envname("HERMLAB_TOL")
        ->check(CLI::PositiveNumber);
    rep->add_option("--t", t_spec, "comma-separated Gauduchon parameters");
    rep->add_option("--json", opt.json_path, "write the report as JSON to this path");
    rep->add_option("--check", opt.checks, "restrict the predicate table to these names")
        ->delimiter(',');
    rep->add_option("--seed", opt.seed, "run random-frame covariance tests with this seed");

    auto* ver = app.add_subcommand("verify", "run a verification suite over the collection");
    ver->add_option("suite", suite,
                    "identities (t-family and parallel-torsion identities) | holonomy "
                    "(symmetric holonomy systems) | appendix (diagonal Hopf family "
                    "reproduction) | all")
        ->required()
        ->check(CLI::IsMember({"identities", "holonomy", "appendix", "all"}));

    auto* zoo_cmd = app.add_subcommand("zoo", "curated model collection");
    zoo_cmd->require_subcommand(1);
    auto* zl = zoo_cmd->add_subcommand("list", "list entries as JSON");
    auto* zd = zoo_cmd->add_subcommand("dump", "print one entry in the JSON model format");
    zd->add_option("name", dump_name, "entry name")->required();

    // allow "--t -1,1,3": merge the value into one token so the leading dash
    // is not read as an option
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--t" || args[i] == "--tol" || args[i] == "--seed") {
            args[i] += "=" + args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (!t_spec.empty()) {
        opt.t_values.clear();
        std::stringstream ss(t_spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                opt.t_values.push_back(v);
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: --t expects a comma-separated list of reals\n");
                return 1;
            }
        }
        if (opt.t_values.empty()) {
            std::fprintf(stderr, "error: --t expects a comma-separated list of reals\n");
            return 1;
        }
    }

    try {
        if (rep->parsed()) return cmd_report(target, opt);
        if (ver->parsed()) return cmd_verify(suite);
        if (zl->parsed()) return cmd_zoo_list();
        if (zd->parsed()) return cmd_zoo_dump(dump_name);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

}  // namespace hermlab::cli
