#include "hermlab/split.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hermlab/errors.hpp"

namespace hermlab::split {

namespace {

using liegeom::ModelEval;
using numlin::ComplexTensor;
using numlin::Jet;
using numlin::JetTensor;
using Complex = std::complex<double>;

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// Deterministic column phases: the largest-magnitude entry of each column is
/// made real and positive.
void phase_fix(Eigen::MatrixXcd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Index best = 0;
        double mag = 0.0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (std::abs(m(r, c)) > mag + 1e-12) {
                mag = std::abs(m(r, c));
                best = r;
            }
        if (mag > 0.0) m.col(c) *= std::conj(m(best, c)) / mag;
    }
}

/// Columns of U associated with singular values above (resp. at or below) the
/// relative cut.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> split_by_rank(const Eigen::MatrixXcd& U,
                                                            const Eigen::VectorXd& sv,
                                                            double cut) {
    int rank = 0;
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut * std::max(1.0, top)) ++rank;
    return {U.leftCols(rank), U.rightCols(U.cols() - rank)};
}

/// Gamma value of the connection in direction A (0..2n-1) acting on e-fields.
Complex gamma_val(const liegeom::HermitianConnection& conn, int j, int i, int A, int n) {
    return A < n ? conn.gamma_hol(uz(j), uz(i), uz(A)).v
                 : conn.gamma_antihol(uz(j), uz(i), uz(A - n)).v;
}

}  // namespace

DecompositionReport torsion_split(const liegeom::Model& model, const ToleranceContext& ctx) {
    ctx.validate();
    const ModelEval eval = liegeom::evaluate(model);
    const int n = eval.n;
    auto [conn, torsion] = liegeom::chern_connection(eval, ctx);
    (void)conn;

    DecompositionReport rep;
    rep.n = n;

    // image of the torsion: column span of the flattened map (i,k) -> T(.,i,k)
    Eigen::MatrixXcd flat(n, n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) flat(j, i * n + k) = torsion.T(uz(j), uz(i), uz(k)).v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(flat, Eigen::ComputeFullU);
    const double cut = std::max(ctx.abs_tol, 1e-10);
    auto [W, N] = split_by_rank(svd.matrixU(), svd.singularValues(), cut);
    phase_fix(W);
    phase_fix(N);
    rep.W_basis = W;
    rep.N_basis = N;
    rep.ell1 = static_cast<int>(W.cols());

    // part of N annihilated by the torsion in the first slot
    Eigen::MatrixXcd stacked(n * n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                stacked(j * n + k, i) = torsion.T(uz(j), uz(i), uz(k)).v;
    if (N.cols() == 0) {
        rep.N0_basis = Eigen::MatrixXcd(n, 0);
        return rep;
    }
    const Eigen::MatrixXcd restricted = stacked * N;
    Eigen::JacobiSVD<Eigen::MatrixXcd> ker(restricted, Eigen::ComputeFullV);
    auto [range, null] = split_by_rank(ker.matrixV(), ker.singularValues(), cut);
    (void)range;
    Eigen::MatrixXcd N0 = N * null;
    phase_fix(N0);
    rep.N0_basis = N0;
    return rep;
}

std::vector<TauForm> tau_forms(const liegeom::Model& model, DecompositionReport& report,
                               const ToleranceContext& ctx) {
    ctx.validate();
    report.tau_forms.clear();
    if (report.ell1 == 0) return {};

    const ModelEval eval = liegeom::evaluate(model);
    const int n = eval.n;
    auto [conn, torsion] = liegeom::chern_connection(eval, ctx);

    // a parallel frame of W: null space of the per-direction connection action
    const int l1 = report.ell1;
    Eigen::MatrixXcd stacked(2 * n * n, l1);
    for (int A = 0; A < 2 * n; ++A) {
        Eigen::MatrixXcd G(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) G(j, i) = gamma_val(conn, j, i, A, n);
        stacked.block(A * n, 0, n, l1) = G * report.W_basis;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
    const double scale = std::max(1.0, svd.singularValues().size() > 0 ? svd.singularValues()(0)
                                                                       : 0.0);
    int null_dim = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) <= std::max(ctx.abs_tol, 1e-10) * scale) ++null_dim;
    if (null_dim < l1)
        throw Error("NotCAS", "parallel frame of the torsion image is incomplete (found " +
                                  std::to_string(null_dim) + " of " + std::to_string(l1) +
                                  " directions)");
    Eigen::MatrixXcd frame = report.W_basis * svd.matrixV().rightCols(l1);
    phase_fix(frame);

    std::vector<TauForm> out;
    for (int s = 0; s < l1; ++s) {
        const Eigen::VectorXcd Z = frame.col(s);
        TauForm tf;
        tf.form = Eigen::MatrixXcd::Zero(n, n);

        // tau(i,k) as jets, contracted from the torsion jets
        JetTensor tau({uz(n), uz(n)});
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                Jet acc(n);
                for (int j = 0; j < n; ++j)
                    acc += std::conj(Z(j)) * torsion.T(uz(j), uz(i), uz(k));
                tau(uz(i), uz(k)) = acc;
                tf.form(i, k) = acc.v;
            }

        // parallelism of tau under the connection
        double res = 0.0;
        for (int A = 0; A < 2 * n; ++A)
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    Complex d = A < n ? tau(uz(i), uz(k)).dh(A) : tau(uz(i), uz(k)).da(A - n);
                    for (int m = 0; m < n; ++m) {
                        d -= gamma_val(conn, m, i, A, n) * tau(uz(m), uz(k)).v;
                        d -= gamma_val(conn, m, k, A, n) * tau(uz(i), uz(m)).v;
                    }
                    res = std::max(res, std::abs(d));
                }
        tf.parallel_residual = res;

        // closure: d of the dual 1-form is pure (2,0) and reproduces tau
        ComplexTensor xi_vals({uz(2 * n)});
        for (int k = 0; k < n; ++k) xi_vals(uz(k)) = std::conj(Z(k));
        const liegeom::KForm xi = liegeom::constant_form(1, n, xi_vals);
        const auto d = liegeom::ce_differential(eval, xi);
        double closure = 0.0;
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b) {
                const Complex got = d.form.comp(uz(a), uz(b)).v;
                const Complex want = (a < n && b < n) ? tf.form(a, b) : Complex(0, 0);
                closure = std::max(closure, std::abs(got - want));
            }
        tf.closure_residual = closure;

        report.tau_forms.push_back(tf.form);
        out.push_back(std::move(tf));
    }
    return out;
}

Eigen::MatrixXcd choose_tau(const DecompositionReport& report, const ToleranceContext& ctx) {
    ctx.validate();
    if (report.tau_forms.empty())
        throw Error("Degenerate", "no 2-forms available: the torsion image is trivial");
    const auto& taus = report.tau_forms;
    const Eigen::MatrixXcd& N = report.N_basis;

    auto assess = [&](const Eigen::MatrixXcd& tau) -> std::pair<int, double> {
        if (N.cols() == 0) return {0, 0.0};
        const Eigen::MatrixXcd A = N.transpose() * tau * N;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        const auto& sv = svd.singularValues();
        const double top = sv.size() > 0 ? sv(0) : 0.0;
        int rank = 0;
        double smallest = 0.0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-8 * std::max(1.0, top)) {
                ++rank;
                smallest = sv(i);
            }
        return {rank, smallest};
    };

    Eigen::MatrixXcd best = taus.front();
    auto best_score = assess(best);
    auto consider = [&](const Eigen::MatrixXcd& tau) {
        const auto score = assess(tau);
        if (score.first > best_score.first ||
            (score.first == best_score.first && score.second > best_score.second + 1e-12)) {
            best_score = score;
            best = tau;
        }
    };
    for (std::size_t i = 1; i < taus.size(); ++i) consider(taus[i]);

    std::mt19937 rng(0x517cc1b7u);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 256; ++trial) {
        Eigen::VectorXcd c(static_cast<Eigen::Index>(taus.size()));
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = Complex(dist(rng), dist(rng));
        if (c.norm() == 0.0) continue;
        c /= c.norm();
        Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(report.n, report.n);
        for (std::size_t i = 0; i < taus.size(); ++i) tau += c(static_cast<Eigen::Index>(i)) * taus[i];
        consider(tau);
    }
    return best;
}

std::vector<SymplecticBlock> symplectic_blocks(DecompositionReport& report,
                                               const Eigen::MatrixXcd& chosen_tau,
                                               const ToleranceContext& ctx) {
    ctx.validate();
    const Eigen::MatrixXcd& N = report.N_basis;
    const int m = static_cast<int>(N.cols());
    report.blocks.clear();
    report.ell2 = 0;
    report.A_matrix = N.transpose() * chosen_tau * N;
    if (m == 0) return {};

    const Eigen::MatrixXcd& A = report.A_matrix;
    const double amax = A.cwiseAbs().maxCoeff();
    if ((A + A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, amax))
        throw Error("InvalidModel", "the chosen 2-form is not antisymmetric");
    if (amax <= std::max(ctx.abs_tol, 1e-12)) {
        if (report.tau_forms.empty() || report.ell1 == 0)
            throw Error("Degenerate", "no 2-forms available: the torsion image is trivial");
        throw Error("Degenerate",
                    "the chosen 2-form vanishes on the torsion-orthogonal space");
    }

    // A conj(A) is Hermitian negative semidefinite for antisymmetric A
    Eigen::MatrixXcd M = A * A.conjugate();
    M = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M);
    const Eigen::VectorXd vals = eig.eigenvalues();  // ascending
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    if (vals(m - 1) > 1e-8 * scale)
        throw Error("InvalidModel", "restricted form has a positive eigenvalue of A conj(A)");

    const double zero_cut = std::max(ctx.abs_tol, 1e-8) * scale;
    const double gap = 1e-6 * scale;
    std::vector<SymplecticBlock> blocks;
    int idx = 0;
    while (idx < m) {
        int end = idx + 1;
        while (end < m && std::abs(vals(end) - vals(end - 1)) <= gap) ++end;
        const double mean =
            vals.segment(idx, end - idx).sum() / static_cast<double>(end - idx);
        if (std::abs(mean) <= zero_cut) {
            report.ell2 += end - idx;
        } else {
            const int dim = end - idx;
            if (dim % 2 != 0)
                throw Error("Degenerate", "odd-dimensional eigenvalue cluster (dimension " +
                                              std::to_string(dim) + ")");
            SymplecticBlock blk;
            blk.b = std::sqrt(-mean);
            blk.n_j = dim / 2;
            blk.basis = N * eig.eigenvectors().middleCols(idx, dim);
            phase_fix(blk.basis);
            blocks.push_back(std::move(blk));
        }
        idx = end;
    }
    // ascending eigenvalues (most negative first) give b strictly decreasing
    report.blocks = blocks;
    return blocks;
}

ConditionReport trace_free_check(const liegeom::Model& model, const DecompositionReport& report,
                                 const ToleranceContext& ctx) {
    ctx.validate();
    if (report.blocks.empty())
        return make_condition("block_trace_free", 0.0, ctx.abs_tol,
                              "vacuous: no symplectic blocks");
    const auto g = liegeom::geometry(model, 0.0, ctx);
    const int n = g.eval.n;

    double trace_res = 0.0;
    double ricci_res = 0.0;
    for (const auto& blk : report.blocks) {
        const Eigen::MatrixXcd& K = blk.basis;
        const Eigen::MatrixXcd P = K * K.adjoint();
        for (int Adir = 0; Adir < 2 * n; ++Adir)
            for (int Bdir = 0; Bdir < 2 * n; ++Bdir) {
                Eigen::MatrixXcd M(n, n);
                for (int l = 0; l < n; ++l)
                    for (int k = 0; k < n; ++k) M(l, k) = g.curv_chern.at(Adir, Bdir, k, l);
                trace_res = std::max(trace_res, std::abs((K.adjoint() * M * K).trace()));
            }
        for (Eigen::Index col = 0; col < K.cols(); ++col) {
            const Eigen::VectorXcd v = K.col(col);
            Complex acc(0, 0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (std::abs(v(a)) < 1e-15 || std::abs(v(b)) < 1e-15) continue;
                    Complex inner(0, 0);
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            inner += P(k, l) * g.curv_chern.at(a, n + b, k, l);
                    acc += v(a) * std::conj(v(b)) * inner;
                }
            ricci_res = std::max(ricci_res, std::abs(acc));
        }
    }
    const double res = std::max(trace_res, ricci_res);
    return make_condition("block_trace_free", res, ctx.abs_tol,
                          "blocks=" + std::to_string(report.blocks.size()) +
                              " trace=" + fmt(trace_res) + " ricci=" + fmt(ricci_res));
}

}  // namespace hermlab::split
