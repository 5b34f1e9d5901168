#include <algorithm>
#include <cmath>

#include "hermlab/errors.hpp"
#include "hermlab/liegeom.hpp"

namespace hermlab::liegeom {

namespace {

using numlin::as_constant_jets;
using numlin::values;

/// Odometer iteration over a row-major shape.
template <class F>
void for_each_index(const std::vector<std::size_t>& shape, F&& fn) {
    std::vector<std::size_t> idx(shape.size(), 0);
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (auto s : shape) t *= s;
        return t;
    }();
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(idx);
        for (std::size_t k = shape.size(); k-- > 0;) {
            if (++idx[k] < shape[k]) break;
            idx[k] = 0;
        }
    }
}

Jet jet_zero(int n) { return Jet(Complex(0, 0), n); }

} // namespace

// ============================================================================
// evaluation
// ============================================================================

ModelEval evaluate(const LieHermitianModel& model) {
    ModelEval ev;
    ev.n = model.n;
    ev.pointwise = false;
    ev.C = as_constant_jets(model.C, model.n);
    ev.D = as_constant_jets(model.D, model.n);
    return ev;
}

ModelEval evaluate(const PointwiseFrameModel& model) {
    if (!model.structure_fn) throw Error("InvalidModel", "pointwise model has no structure_fn");
    ModelEval ev;
    ev.n = model.n;
    ev.pointwise = true;
    auto [C, D] = model.structure_fn(model.z);
    ev.C = std::move(C);
    ev.D = std::move(D);
    ev.source = &model;
    return ev;
}

ModelEval evaluate(const Model& model) {
    return std::visit([](const auto& m) { return evaluate(m); }, model);
}

// ============================================================================
// validation
// ============================================================================

void validate(const LieHermitianModel& model, const ToleranceContext& ctx) {
    ctx.validate();
    const auto n = static_cast<std::size_t>(model.n);
    if (model.n <= 0) throw Error("InvalidModel", "n must be positive");
    const std::vector<std::size_t> want = {n, n, n};
    if (model.C.shape() != want || model.D.shape() != want)
        throw Error("InvalidModel", "C and D must be n x n x n");

    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(model.C(k, i, j) + model.C(k, j, i)) > ctx.abs_tol)
                    throw Error("InvalidModel", "bracket coefficients not antisymmetric");

    // Jacobi identity of the reconstructed complexified bracket.
    ModelEval ev = evaluate(model);
    const ComplexTensor F = values(bracket_tensor(ev));
    const int N = 2 * model.n;
    double worst = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b)
            for (int c = b + 1; c < N; ++c)
                for (int m = 0; m < N; ++m) {
                    Complex acc(0, 0);
                    for (int r = 0; r < N; ++r)
                        acc += F(r, a, b) * F(m, r, c) + F(r, b, c) * F(m, r, a) +
                               F(r, c, a) * F(m, r, b);
                    worst = std::max(worst, std::abs(acc));
                }
    if (worst > ctx.abs_tol)
        throw Error("InvalidModel",
                    "Jacobi identity violated, residual " + std::to_string(worst));
}

// ============================================================================
// brackets
// ============================================================================

JetTensor bracket_tensor(const ModelEval& eval) {
    const int n = eval.n;
    const auto N = static_cast<std::size_t>(2 * n);
    JetTensor F({N, N, N});
    for (std::size_t i = 0; i < F.size(); ++i) F.data()[i] = jet_zero(n);

    auto ui = [&](int a) { return static_cast<std::size_t>(a); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // [e_i, e_j] and its conjugate
            for (int k = 0; k < n; ++k) {
                const Jet& c = eval.C(ui(k), ui(i), ui(j));
                F(ui(k), ui(i), ui(j)) = c;
                F(ui(n + k), ui(n + i), ui(n + j)) = conj(c);
            }
            // [e_i, conj(e_j)] = sum_k conj(D^i_{kj}) e_k − D^j_{ki} conj(e_k)
            for (int k = 0; k < n; ++k) {
                const Jet ePart = conj(eval.D(ui(i), ui(k), ui(j)));
                const Jet ebPart = -eval.D(ui(j), ui(k), ui(i));
                F(ui(k), ui(i), ui(n + j)) = ePart;
                F(ui(n + k), ui(i), ui(n + j)) = ebPart;
                F(ui(k), ui(n + j), ui(i)) = -ePart;
                F(ui(n + k), ui(n + j), ui(i)) = -ebPart;
            }
        }
    return F;
}

LieHermitianModel change_frame(const LieHermitianModel& model, const Eigen::MatrixXcd& U) {
    const int n = model.n;
    LieHermitianModel out;
    out.n = n;
    out.label = model.label;
    const auto un = static_cast<std::size_t>(n);
    out.C = ComplexTensor({un, un, un});
    out.D = ComplexTensor({un, un, un});
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Complex c(0, 0), d(0, 0);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int k = 0; k < n; ++k) {
                            c += U(i, a) * U(j, b) * std::conj(U(m, k)) * model.C(k, a, b);
                            // new D^j_{mi} = U_{mk} U_{ia} conj(U_{jb}) D^b_{ka}
                            d += U(m, k) * U(i, a) * std::conj(U(j, b)) * model.D(b, k, a);
                        }
                out.C(m, i, j) = c;
                out.D(j, m, i) = d;
            }
    return out;
}

// ============================================================================
// forms
// ============================================================================

KForm metric_form(const ModelEval& eval) {
    const int n = eval.n;
    const auto N = static_cast<std::size_t>(2 * n);
    KForm w;
    w.degree = 2;
    w.n = n;
    w.comp = JetTensor({N, N});
    for (std::size_t i = 0; i < w.comp.size(); ++i) w.comp.data()[i] = jet_zero(n);
    for (int i = 0; i < n; ++i) {
        w.comp(static_cast<std::size_t>(i), static_cast<std::size_t>(n + i)) =
            Jet::constant(Complex(0, 1), n);
        w.comp(static_cast<std::size_t>(n + i), static_cast<std::size_t>(i)) =
            Jet::constant(Complex(0, -1), n);
    }
    return w;
}

KForm constant_form(int degree, int n, const ComplexTensor& vals) {
    KForm f;
    f.degree = degree;
    f.n = n;
    f.comp = numlin::as_constant_jets(vals, n);
    return f;
}

DifferentialResult ce_differential(const ModelEval& eval, const KForm& form,
                                   bool input_jets_exact) {
    const int n = eval.n;
    const int N = 2 * n;
    const int k = form.degree;
    const JetTensor F = bracket_tensor(eval);

    bool input_constant = true;
    for (std::size_t i = 0; i < form.comp.size() && input_constant; ++i) {
        const Jet& j = form.comp.data()[i];
        if (j.n() != 0 && (j.dh.cwiseAbs().maxCoeff() > 0 || j.da.cwiseAbs().maxCoeff() > 0))
            input_constant = false;
    }

    KForm out;
    out.degree = k + 1;
    out.n = n;
    std::vector<std::size_t> shape(static_cast<std::size_t>(k) + 1, static_cast<std::size_t>(N));
    out.comp = JetTensor(shape);
    for (std::size_t i = 0; i < out.comp.size(); ++i) out.comp.data()[i] = jet_zero(n);

    std::vector<std::size_t> sub(static_cast<std::size_t>(k), 0);
    for_each_index(shape, [&](const std::vector<std::size_t>& idx) {
        Jet acc = jet_zero(n);
        // derivative terms: sum_a (−1)^a x_{A_a}( alpha(.. hat A_a ..) )
        for (int a = 0; a <= k; ++a) {
            std::size_t p = 0;
            for (int q = 0; q <= k; ++q)
                if (q != a) sub[p++] = idx[static_cast<std::size_t>(q)];
            const Jet& aj = form.comp[std::span<const std::size_t>(sub)];
            if (aj.n() != 0) {
                const auto A = static_cast<int>(idx[static_cast<std::size_t>(a)]);
                const Complex dv = (A < n) ? aj.dh(A) : aj.da(A - n);
                Jet term = jet_zero(n);
                term.v = ((a % 2) == 0 ? 1.0 : -1.0) * dv;
                acc += term; // value only; second derivatives are not tracked
            }
        }
        // bracket terms: sum_{a<b} (−1)^{a+b} alpha([x_a,x_b], ..)
        for (int a = 0; a <= k; ++a)
            for (int b = a + 1; b <= k; ++b) {
                std::size_t p = 1;
                for (int q = 0; q <= k; ++q)
                    if (q != a && q != b) sub[p++] = idx[static_cast<std::size_t>(q)];
                const double sign = (((a + b) % 2) == 0) ? 1.0 : -1.0;
                for (int M = 0; M < N; ++M) {
                    const Jet& f = F(static_cast<std::size_t>(M), idx[static_cast<std::size_t>(a)],
                                     idx[static_cast<std::size_t>(b)]);
                    sub[0] = static_cast<std::size_t>(M);
                    acc += sign * Complex(1, 0) *
                           (f * form.comp[std::span<const std::size_t>(sub)]);
                }
            }
        out.comp[std::span<const std::size_t>(idx)] = acc;
    });

    DifferentialResult res;
    res.form = std::move(out);
    res.jets_valid = input_constant && input_jets_exact;
    return res;
}

KForm type_part(const KForm& form, int p, int q) {
    if (p + q != form.degree) throw Error("InvalidModel", "type split must sum to the degree");
    KForm out = form;
    const int n = form.n;
    for_each_index(out.comp.shape(), [&](const std::vector<std::size_t>& idx) {
        int unbarred = 0;
        for (auto a : idx)
            if (static_cast<int>(a) < n) ++unbarred;
        if (unbarred != p)
            out.comp[std::span<const std::size_t>(idx)] = jet_zero(n);
    });
    return out;
}

} // namespace hermlab::liegeom
