#include "hermlab/numlin.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "hermlab/errors.hpp"

namespace hermlab::numlin {

void ToleranceContext::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(fd_tol > 0.0))
        throw Error("InvalidTolerance", "all tolerances must be strictly positive");
}

bool approx_zero(const ComplexTensor& t, const ToleranceContext& ctx, double ref_scale) {
    return max_norm(t) <= ctx.abs_tol + ctx.rel_tol * ref_scale;
}

bool approx_zero(const Eigen::MatrixXcd& m, const ToleranceContext& ctx, double ref_scale) {
    return max_norm(m) <= ctx.abs_tol + ctx.rel_tol * ref_scale;
}

bool approx_zero(double residual, const ToleranceContext& ctx, double ref_scale) {
    return std::abs(residual) <= ctx.abs_tol + ctx.rel_tol * ref_scale;
}

// ============================================================================
// unitarize
// ============================================================================
FrameChange unitarize(const Eigen::MatrixXcd& gram, const ToleranceContext& ctx) {
    ctx.validate();
    const auto n = gram.rows();
    if (gram.cols() != n) throw Error("InvalidModel", "gram matrix must be square");

    // Lower-triangular Cholesky with explicit pivots: G = L L^*.
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex s = gram(j, j);
        for (Eigen::Index k = 0; k < j; ++k) s -= L(j, k) * std::conj(L(j, k));
        const double pivot = s.real();
        if (pivot <= ctx.abs_tol)
            throw Error("NotPositiveDefinite", "pivot " + std::to_string(pivot) +
                                                   " at index " + std::to_string(j));
        L(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            Complex t = gram(i, j);
            for (Eigen::Index k = 0; k < j; ++k) t -= L(i, k) * std::conj(L(j, k));
            L(i, j) = t / L(j, j);
        }
    }

    // P = L^{-1}: then P G P^* = I.  Forward substitution keeps P lower
    // triangular with positive real diagonal, so the output is deterministic.
    FrameChange fc;
    fc.matrix = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(n, n));
    fc.kind = "general";
    if ((fc.matrix * fc.matrix.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <=
        ctx.abs_tol)
        fc.kind = "unitary";
    return fc;
}

// ============================================================================
// invariant subspaces
// ============================================================================
namespace {

/// Nullspace of a real matrix via SVD (columns are an orthonormal basis).
Eigen::MatrixXd real_nullspace(const Eigen::MatrixXd& A, double tol) {
    if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) ++rank;
    return svd.matrixV().rightCols(A.cols() - rank);
}

/// Basis of the space of Hermitian matrices commuting with every generator,
/// returned as explicit matrices.  Generators are used together with their
/// adjoints so the commutant is *-closed.
std::vector<Eigen::MatrixXcd> hermitian_commutant(const std::vector<Eigen::MatrixXcd>& gens,
                                                  int n) {
    // Real parameters of a Hermitian matrix: n diagonal entries, then for each
    // i<j a symmetric and an antisymmetric (times i) off-diagonal pair.
    std::vector<Eigen::MatrixXcd> param;
    param.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, n);
        E(i, i) = 1.0;
        param.push_back(E);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
            S(i, j) = 1.0;
            S(j, i) = 1.0;
            param.push_back(S);
            Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
            K(i, j) = Complex(0, 1);
            K(j, i) = Complex(0, -1);
            param.push_back(K);
        }
    const auto d = static_cast<Eigen::Index>(param.size());

    std::vector<Eigen::MatrixXcd> family;
    for (const auto& g : gens) {
        family.push_back(g);
        family.push_back(g.adjoint());
    }

    Eigen::MatrixXd sys(2 * n * n * static_cast<Eigen::Index>(family.size()), d);
    sys.setZero();
    Eigen::Index row = 0;
    for (const auto& A : family) {
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::MatrixXcd comm = A * param[static_cast<std::size_t>(k)] -
                                    param[static_cast<std::size_t>(k)] * A;
            Eigen::Index r = row;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    sys(r, k) = comm(i, j).real();
                    sys(r + n * n, k) = comm(i, j).imag();
                    ++r;
                }
        }
        row += 2 * n * n;
    }

    Eigen::MatrixXd null = real_nullspace(sys, 1e-11);
    std::vector<Eigen::MatrixXcd> basis;
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index k = 0; k < d; ++k) X += null(k, c) * param[static_cast<std::size_t>(k)];
        basis.push_back(X);
    }
    return basis;
}

/// Frobenius least-squares projection of target onto span(basis)
/// (real coefficients, so Hermitian-ness is preserved).
Eigen::MatrixXcd project_onto(const std::vector<Eigen::MatrixXcd>& basis,
                              const Eigen::MatrixXcd& target) {
    const auto n = target.rows();
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd V(2 * n * n, d);
    Eigen::VectorXd rhs(2 * n * n);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                V(r, k) = basis[static_cast<std::size_t>(k)](i, j).real();
                V(r + n * n, k) = basis[static_cast<std::size_t>(k)](i, j).imag();
                ++r;
            }
    }
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            rhs(r) = target(i, j).real();
            rhs(r + n * n) = target(i, j).imag();
            ++r;
        }
    Eigen::VectorXd alpha = V.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < d; ++k) H += alpha(k) * basis[static_cast<std::size_t>(k)];
    return H;
}

/// Leading coordinate of a subspace basis: smallest row index whose row has
/// non-negligible norm.  Used only for a stable, human-friendly block order.
template <class M>
int leading_row(const M& B) {
    for (Eigen::Index i = 0; i < B.rows(); ++i)
        if (B.row(i).norm() > 1e-8) return static_cast<int>(i);
    return static_cast<int>(B.rows());
}

void phase_fix(Eigen::MatrixXcd& B) {
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
        Eigen::Index best = 0;
        double bestAbs = -1.0;
        for (Eigen::Index i = 0; i < B.rows(); ++i) {
            const double a = std::abs(B(i, c));
            if (a > bestAbs + 1e-14) {
                bestAbs = a;
                best = i;
            }
        }
        if (bestAbs > 0) B.col(c) *= std::conj(B(best, c)) / std::abs(B(best, c));
    }
}

void sign_fix(Eigen::MatrixXd& B) {
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
        Eigen::Index best = 0;
        double bestAbs = -1.0;
        for (Eigen::Index i = 0; i < B.rows(); ++i) {
            const double a = std::abs(B(i, c));
            if (a > bestAbs + 1e-14) {
                bestAbs = a;
                best = i;
            }
        }
        if (bestAbs > 0 && B(best, c) < 0) B.col(c) *= -1.0;
    }
}

bool invariant_under(const std::vector<Eigen::MatrixXcd>& gens, const Eigen::MatrixXcd& B) {
    const Eigen::MatrixXcd proj =
        Eigen::MatrixXcd::Identity(B.rows(), B.rows()) - B * B.adjoint();
    for (const auto& g : gens) {
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        if ((proj * (g * B)).cwiseAbs().maxCoeff() > 1e-8 * scale) return false;
    }
    return true;
}

std::vector<Eigen::MatrixXcd> split_complex(const std::vector<Eigen::MatrixXcd>& gens, int n,
                                            const ToleranceContext& ctx, std::mt19937& rng) {
    if (n == 1) return {Eigen::MatrixXcd::Identity(1, 1)};

    auto comm = hermitian_commutant(gens, n);
    if (comm.size() <= 1) return {Eigen::MatrixXcd::Identity(n, n)};

    Eigen::MatrixXcd seed = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) seed(i, i) = i + 1.0;

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 9; ++attempt) {
        Eigen::MatrixXcd H = project_onto(comm, seed);
        // Draw a fresh candidate for the next attempt before any `continue`.
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) next(i, j) = Complex(gauss(rng), gauss(rng));
        seed = 0.5 * (next + next.adjoint());

        H = 0.5 * (H + H.adjoint()); // kill round-off drift
        const Complex mean = H.trace() / static_cast<double>(n);
        if ((H - mean * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10)
            continue; // projection landed on a scalar; try a random element

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double gap = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());

        std::vector<Eigen::MatrixXcd> blocks;
        Eigen::Index lo = 0;
        bool ok = true;
        for (Eigen::Index k = 1; k <= ev.size(); ++k) {
            if (k == ev.size() || ev(k) - ev(k - 1) > gap) {
                Eigen::MatrixXcd B = es.eigenvectors().middleCols(lo, k - lo);
                if (!invariant_under(gens, B)) {
                    ok = false;
                    break;
                }
                blocks.push_back(std::move(B));
                lo = k;
            }
        }
        if (!ok || blocks.size() < 2) continue;

        // Recurse inside each block until the restricted commutant is trivial.
        std::vector<Eigen::MatrixXcd> out;
        for (const auto& B : blocks) {
            std::vector<Eigen::MatrixXcd> restricted;
            restricted.reserve(gens.size());
            for (const auto& g : gens) restricted.push_back(B.adjoint() * g * B);
            for (const auto& sub :
                 split_complex(restricted, static_cast<int>(B.cols()), ctx, rng))
                out.push_back(B * sub);
        }
        return out;
    }
    // Retries exhausted (numerically degenerate commutant); report one block
    // rather than an unverified split.
    return {Eigen::MatrixXcd::Identity(n, n)};
}

// --- real variant -----------------------------------------------------------

std::vector<Eigen::MatrixXd> symmetric_commutant(const std::vector<Eigen::MatrixXd>& gens,
                                                 int n) {
    std::vector<Eigen::MatrixXd> param;
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
        E(i, i) = 1.0;
        param.push_back(E);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
            S(i, j) = 1.0;
            S(j, i) = 1.0;
            param.push_back(S);
        }
    const auto d = static_cast<Eigen::Index>(param.size());

    std::vector<Eigen::MatrixXd> family;
    for (const auto& g : gens) {
        family.push_back(g);
        family.push_back(g.transpose());
    }

    Eigen::MatrixXd sys(n * n * static_cast<Eigen::Index>(family.size()), d);
    sys.setZero();
    Eigen::Index row = 0;
    for (const auto& A : family) {
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::MatrixXd comm = A * param[static_cast<std::size_t>(k)] -
                                   param[static_cast<std::size_t>(k)] * A;
            Eigen::Index r = row;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) sys(r++, k) = comm(i, j);
        }
        row += n * n;
    }

    Eigen::MatrixXd null = real_nullspace(sys, 1e-11);
    std::vector<Eigen::MatrixXd> basis;
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index k = 0; k < d; ++k) X += null(k, c) * param[static_cast<std::size_t>(k)];
        basis.push_back(X);
    }
    return basis;
}

Eigen::MatrixXd project_onto_real(const std::vector<Eigen::MatrixXd>& basis,
                                  const Eigen::MatrixXd& target) {
    const auto n = target.rows();
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd V(n * n, d);
    Eigen::VectorXd rhs(n * n);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) V(r++, k) = basis[static_cast<std::size_t>(k)](i, j);
    }
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) rhs(r++) = target(i, j);
    Eigen::VectorXd alpha = V.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < d; ++k) H += alpha(k) * basis[static_cast<std::size_t>(k)];
    return H;
}

bool invariant_under_real(const std::vector<Eigen::MatrixXd>& gens, const Eigen::MatrixXd& B) {
    const Eigen::MatrixXd proj =
        Eigen::MatrixXd::Identity(B.rows(), B.rows()) - B * B.transpose();
    for (const auto& g : gens) {
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        if ((proj * (g * B)).cwiseAbs().maxCoeff() > 1e-8 * scale) return false;
    }
    return true;
}

std::vector<Eigen::MatrixXd> split_real(const std::vector<Eigen::MatrixXd>& gens, int n,
                                        const ToleranceContext& ctx, std::mt19937& rng) {
    if (n == 1) return {Eigen::MatrixXd::Identity(1, 1)};

    auto comm = symmetric_commutant(gens, n);
    if (comm.size() <= 1) return {Eigen::MatrixXd::Identity(n, n)};

    Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) seed(i, i) = i + 1.0;

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 9; ++attempt) {
        Eigen::MatrixXd H = project_onto_real(comm, seed);
        Eigen::MatrixXd next(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) next(i, j) = gauss(rng);
        seed = 0.5 * (next + next.transpose());

        H = 0.5 * (H + H.transpose());
        const double mean = H.trace() / n;
        if ((H - mean * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10) continue;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double gap = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());

        std::vector<Eigen::MatrixXd> blocks;
        Eigen::Index lo = 0;
        bool ok = true;
        for (Eigen::Index k = 1; k <= ev.size(); ++k) {
            if (k == ev.size() || ev(k) - ev(k - 1) > gap) {
                Eigen::MatrixXd B = es.eigenvectors().middleCols(lo, k - lo);
                if (!invariant_under_real(gens, B)) {
                    ok = false;
                    break;
                }
                blocks.push_back(std::move(B));
                lo = k;
            }
        }
        if (!ok || blocks.size() < 2) continue;

        std::vector<Eigen::MatrixXd> out;
        for (const auto& B : blocks) {
            std::vector<Eigen::MatrixXd> restricted;
            restricted.reserve(gens.size());
            for (const auto& g : gens) restricted.push_back(B.transpose() * g * B);
            for (const auto& sub : split_real(restricted, static_cast<int>(B.cols()), ctx, rng))
                out.push_back(B * sub);
        }
        return out;
    }
    return {Eigen::MatrixXd::Identity(n, n)};
}

} // namespace

std::vector<Eigen::MatrixXcd> invariant_subspaces(const std::vector<Eigen::MatrixXcd>& generators,
                                                  int n, const ToleranceContext& ctx) {
    ctx.validate();
    for (const auto& g : generators)
        if (g.rows() != n || g.cols() != n)
            throw Error("InvalidModel", "generator dimension mismatch");
    std::mt19937 rng(0x9e3779b9u);
    auto blocks = split_complex(generators, n, ctx, rng);
    for (auto& B : blocks) phase_fix(B);
    std::stable_sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
        return leading_row(a) < leading_row(b);
    });
    return blocks;
}

std::vector<Eigen::MatrixXd> invariant_subspaces_real(const std::vector<Eigen::MatrixXd>& generators,
                                                      int n, const ToleranceContext& ctx) {
    ctx.validate();
    for (const auto& g : generators)
        if (g.rows() != n || g.cols() != n)
            throw Error("InvalidModel", "generator dimension mismatch");
    std::mt19937 rng(0x9e3779b9u);
    auto blocks = split_real(generators, n, ctx, rng);
    for (auto& B : blocks) sign_fix(B);
    std::stable_sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
        return leading_row(a) < leading_row(b);
    });
    return blocks;
}

} // namespace hermlab::numlin
