#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "hermlab/errors.hpp"

namespace hermlab::numlin {

using Complex = std::complex<double>;

// ============================================================================
// Jet: first-order forward derivative record over a unitary frame.
//
// A Jet holds the value of a scalar function at a point together with its
// derivatives along the n holomorphic frame fields e_s (dh) and the n
// conjugate fields \bar e_s (da).  Arithmetic follows the Leibniz rule;
// conjugation swaps the two derivative slots (e_s(conj f) = conj(\bar e_s f)).
// ============================================================================
struct Jet {
    Complex v{};
    Eigen::VectorXcd dh; // derivative along e_s, s = 0..n-1
    Eigen::VectorXcd da; // derivative along conj(e_s)

    Jet() = default;
    explicit Jet(int n) : dh(Eigen::VectorXcd::Zero(n)), da(Eigen::VectorXcd::Zero(n)) {}
    Jet(Complex value, int n) : v(value), dh(Eigen::VectorXcd::Zero(n)), da(Eigen::VectorXcd::Zero(n)) {}

    [[nodiscard]] static Jet constant(Complex value, int n) { return Jet(value, n); }

    [[nodiscard]] int n() const { return static_cast<int>(dh.size()); }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        if (dh.size() == 0) { dh = o.dh; da = o.da; }
        else if (o.dh.size() != 0) { dh += o.dh; da += o.da; }
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        if (dh.size() == 0) { dh = -o.dh; da = -o.da; }
        else if (o.dh.size() != 0) { dh -= o.dh; da -= o.da; }
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        r.v = -r.v;
        r.dh = -r.dh;
        r.da = -r.da;
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.v = a.v * b.v;
        if (a.dh.size() == 0) { r.dh = a.v * b.dh; r.da = a.v * b.da; }
        else if (b.dh.size() == 0) { r.dh = b.v * a.dh; r.da = b.v * a.da; }
        else {
            r.dh = a.v * b.dh + b.v * a.dh;
            r.da = a.v * b.da + b.v * a.da;
        }
        return r;
    }
    friend Jet operator*(Complex s, Jet a) {
        a.v *= s;
        a.dh *= s;
        a.da *= s;
        return a;
    }
    friend Jet operator*(Jet a, Complex s) { return s * a; }
    friend Jet operator*(double s, Jet a) { return Complex(s, 0.0) * a; }
    friend Jet operator*(Jet a, double s) { return Complex(s, 0.0) * a; }
};

/// conj(f): value conjugated, and e_s / \bar e_s derivative roles swap.
[[nodiscard]] inline Jet conj(const Jet& a) {
    Jet r;
    r.v = std::conj(a.v);
    r.dh = a.da.conjugate();
    r.da = a.dh.conjugate();
    return r;
}

[[nodiscard]] inline Complex conj(const Complex& a) { return std::conj(a); }
[[nodiscard]] inline double conj(double a) { return a; }

// ============================================================================
// TensorND<T>: dense row-major tensor with explicit strides.
// ============================================================================
template <class T>
class TensorND {
public:
    TensorND() = default;

    explicit TensorND(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        computeStrides();
        data_.assign(total_, T{});
    }

    [[nodiscard]] static TensorND zeros(std::vector<std::size_t> shape) { return TensorND(std::move(shape)); }

    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
    [[nodiscard]] const std::vector<std::size_t>& strides() const { return strides_; }
    [[nodiscard]] std::size_t rank() const { return shape_.size(); }
    [[nodiscard]] std::size_t size() const { return total_; }

    [[nodiscard]] T* data() { return data_.data(); }
    [[nodiscard]] const T* data() const { return data_.data(); }

    [[nodiscard]] std::size_t flatIndex(std::span<const std::size_t> idx) const {
        assert(idx.size() == shape_.size());
        std::size_t off = 0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            assert(idx[a] < shape_[a]);
            off += idx[a] * strides_[a];
        }
        return off;
    }

    T& operator[](std::span<const std::size_t> idx) { return data_[flatIndex(idx)]; }
    const T& operator[](std::span<const std::size_t> idx) const { return data_[flatIndex(idx)]; }

    template <class... I>
    T& operator()(I... i) {
        const std::size_t idx[] = {static_cast<std::size_t>(i)...};
        return data_[flatIndex(std::span<const std::size_t>(idx, sizeof...(I)))];
    }
    template <class... I>
    const T& operator()(I... i) const {
        const std::size_t idx[] = {static_cast<std::size_t>(i)...};
        return data_[flatIndex(std::span<const std::size_t>(idx, sizeof...(I)))];
    }

    /// Elementwise conjugate (ADL conj so it works for Complex and Jet alike).
    [[nodiscard]] TensorND conjugate() const {
        TensorND r(shape_);
        for (std::size_t i = 0; i < total_; ++i) r.data_[i] = conj(data_[i]);
        return r;
    }

    /// Axis permutation with numpy `transpose` semantics:
    /// result.shape[k] = shape[perm[k]], and the element at result index
    /// (i_0,...,i_{r-1}) is the source element whose index j satisfies
    /// j[perm[k]] = i_k.
    [[nodiscard]] TensorND permute(const std::vector<std::size_t>& perm) const {
        if (perm.size() != shape_.size()) throw Error("InvalidModel", "permutation rank mismatch");
        std::vector<std::size_t> newShape(perm.size());
        for (std::size_t k = 0; k < perm.size(); ++k) newShape[k] = shape_[perm[k]];
        TensorND r(newShape);
        std::vector<std::size_t> idx(perm.size(), 0);
        std::vector<std::size_t> src(perm.size(), 0);
        for (std::size_t flat = 0; flat < r.total_; ++flat) {
            for (std::size_t k = 0; k < perm.size(); ++k) src[perm[k]] = idx[k];
            r.data_[flat] = data_[flatIndex(src)];
            // row-major increment of idx over newShape
            for (std::size_t k = perm.size(); k-- > 0;) {
                if (++idx[k] < newShape[k]) break;
                idx[k] = 0;
            }
        }
        return r;
    }

    TensorND& operator+=(const TensorND& o) {
        assert(shape_ == o.shape_);
        for (std::size_t i = 0; i < total_; ++i) data_[i] += o.data_[i];
        return *this;
    }
    TensorND& operator-=(const TensorND& o) {
        assert(shape_ == o.shape_);
        for (std::size_t i = 0; i < total_; ++i) data_[i] -= o.data_[i];
        return *this;
    }
    friend TensorND operator+(TensorND a, const TensorND& b) { a += b; return a; }
    friend TensorND operator-(TensorND a, const TensorND& b) { a -= b; return a; }

    template <class S>
    TensorND& scale(const S& s) {
        for (std::size_t i = 0; i < total_; ++i) data_[i] = data_[i] * s;
        return *this;
    }

private:
    void computeStrides() {
        strides_.assign(shape_.size(), 1);
        total_ = 1;
        for (std::size_t k = shape_.size(); k-- > 0;) {
            strides_[k] = total_;
            total_ *= shape_[k];
        }
        if (shape_.empty()) total_ = 1;
    }

    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 0;
    std::vector<T> data_;
};

using ComplexTensor = TensorND<Complex>;
using JetTensor = TensorND<Jet>;

/// Largest absolute entry (the norm used by the approx-zero tests).
[[nodiscard]] inline double max_norm(const ComplexTensor& t) {
    double m = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t.data()[i]));
    return m;
}

[[nodiscard]] inline double max_norm(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

[[nodiscard]] inline double max_norm(const Eigen::VectorXcd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// General pairwise contraction: sums over the paired axes
/// (axesA[k] of `a` against axesB[k] of `b`, equal lengths required).
/// Result axes are the remaining axes of `a` followed by those of `b`,
/// keeping their original relative order.
template <class T>
[[nodiscard]] TensorND<T> contract(const TensorND<T>& a, std::vector<std::size_t> axesA,
                                   const TensorND<T>& b, std::vector<std::size_t> axesB) {
    if (axesA.size() != axesB.size()) throw Error("InvalidModel", "contraction axis count mismatch");
    for (std::size_t k = 0; k < axesA.size(); ++k) {
        if (a.shape()[axesA[k]] != b.shape()[axesB[k]])
            throw Error("InvalidModel", "contraction axis extent mismatch");
    }
    std::vector<std::size_t> freeA, freeB;
    for (std::size_t k = 0; k < a.rank(); ++k)
        if (std::find(axesA.begin(), axesA.end(), k) == axesA.end()) freeA.push_back(k);
    for (std::size_t k = 0; k < b.rank(); ++k)
        if (std::find(axesB.begin(), axesB.end(), k) == axesB.end()) freeB.push_back(k);

    std::vector<std::size_t> outShape;
    for (auto k : freeA) outShape.push_back(a.shape()[k]);
    for (auto k : freeB) outShape.push_back(b.shape()[k]);
    TensorND<T> out(outShape);

    std::vector<std::size_t> sumExt;
    for (auto k : axesA) sumExt.push_back(a.shape()[k]);
    const std::size_t sumTotal =
        std::accumulate(sumExt.begin(), sumExt.end(), std::size_t{1}, std::multiplies<>());

    std::vector<std::size_t> outIdx(outShape.size(), 0);
    std::vector<std::size_t> ia(a.rank(), 0), ib(b.rank(), 0), is(sumExt.size(), 0);
    const std::size_t outTotal = out.size();
    for (std::size_t flat = 0; flat < outTotal; ++flat) {
        for (std::size_t k = 0; k < freeA.size(); ++k) ia[freeA[k]] = outIdx[k];
        for (std::size_t k = 0; k < freeB.size(); ++k) ib[freeB[k]] = outIdx[freeA.size() + k];
        T acc{};
        std::fill(is.begin(), is.end(), 0);
        for (std::size_t s = 0; s < sumTotal; ++s) {
            for (std::size_t k = 0; k < axesA.size(); ++k) {
                ia[axesA[k]] = is[k];
                ib[axesB[k]] = is[k];
            }
            acc += a[std::span<const std::size_t>(ia)] * b[std::span<const std::size_t>(ib)];
            for (std::size_t k = sumExt.size(); k-- > 0;) {
                if (++is[k] < sumExt[k]) break;
                is[k] = 0;
            }
        }
        out[std::span<const std::size_t>(outIdx)] = acc;
        for (std::size_t k = outShape.size(); k-- > 0;) {
            if (++outIdx[k] < outShape[k]) break;
            outIdx[k] = 0;
        }
    }
    return out;
}

/// Trace over two axes of a single tensor.
template <class T>
[[nodiscard]] TensorND<T> trace_axes(const TensorND<T>& a, std::size_t ax1, std::size_t ax2) {
    if (ax1 == ax2 || a.shape()[ax1] != a.shape()[ax2])
        throw Error("InvalidModel", "trace axes invalid");
    std::vector<std::size_t> freeAx;
    for (std::size_t k = 0; k < a.rank(); ++k)
        if (k != ax1 && k != ax2) freeAx.push_back(k);
    std::vector<std::size_t> outShape;
    for (auto k : freeAx) outShape.push_back(a.shape()[k]);
    TensorND<T> out(outShape);
    std::vector<std::size_t> outIdx(outShape.size(), 0), ia(a.rank(), 0);
    const std::size_t n = a.shape()[ax1];
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        for (std::size_t k = 0; k < freeAx.size(); ++k) ia[freeAx[k]] = outIdx[k];
        T acc{};
        for (std::size_t s = 0; s < n; ++s) {
            ia[ax1] = s;
            ia[ax2] = s;
            acc += a[std::span<const std::size_t>(ia)];
        }
        out[std::span<const std::size_t>(outIdx)] = acc;
        for (std::size_t k = outShape.size(); k-- > 0;) {
            if (++outIdx[k] < outShape[k]) break;
            outIdx[k] = 0;
        }
    }
    return out;
}

/// Value part of a jet tensor.
[[nodiscard]] inline ComplexTensor values(const JetTensor& jt) {
    ComplexTensor r(jt.shape());
    for (std::size_t i = 0; i < jt.size(); ++i) r.data()[i] = jt.data()[i].v;
    return r;
}

/// Derivative slice: direction A in 0..2n-1 (first n: e_s, last n: conj(e_s)).
[[nodiscard]] inline ComplexTensor derivative_slice(const JetTensor& jt, int A, int n) {
    ComplexTensor r(jt.shape());
    for (std::size_t i = 0; i < jt.size(); ++i) {
        const Jet& j = jt.data()[i];
        if (j.n() == 0) { r.data()[i] = Complex(0, 0); continue; }
        r.data()[i] = (A < n) ? j.dh(A) : j.da(A - n);
    }
    return r;
}

/// Lift a constant tensor to a jet tensor with zero derivatives.
[[nodiscard]] inline JetTensor as_constant_jets(const ComplexTensor& t, int n) {
    JetTensor r(t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) r.data()[i] = Jet::constant(t.data()[i], n);
    return r;
}

} // namespace hermlab::numlin
