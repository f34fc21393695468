#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/errors.hpp"

namespace qgap {

using cx = std::complex<double>;

// Dense row-major complex matrix. Small value type; everything copies.
struct CMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cx> a;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cx(0.0, 0.0)) {}

    cx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

using StateVector = std::vector<cx>;

inline CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionError("matrix add: shape mismatch");
    CMatrix r = x;
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] += y.a[k];
    return r;
}

inline CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionError("matrix sub: shape mismatch");
    CMatrix r = x;
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] -= y.a[k];
    return r;
}

inline CMatrix operator*(cx s, const CMatrix& x) {
    CMatrix r = x;
    for (auto& v : r.a) v *= s;
    return r;
}

inline CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw DimensionError("matmul: inner dimension mismatch");
    CMatrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            cx xv = x(i, k);
            if (xv == cx(0.0, 0.0)) continue;
            const cx* yrow = &y.a[k * y.cols];
            cx* rrow = &r.a[i * r.cols];
            for (std::size_t j = 0; j < y.cols; ++j) rrow[j] += xv * yrow[j];
        }
    return r;
}

inline CMatrix dagger(const CMatrix& x) {
    CMatrix r(x.cols, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

inline double fro_norm(const CMatrix& x) {
    double s = 0.0;
    for (const auto& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

inline double max_abs(const CMatrix& x) {
    double m = 0.0;
    for (const auto& v : x.a) m = std::max(m, std::abs(v));
    return m;
}

// Largest |M[i][j] - conj(M[j][i])| over all entries.
inline double hermiticity_defect(const CMatrix& m) {
    if (m.rows != m.cols) throw DimensionError("hermiticity_defect: matrix not square");
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i; j < m.cols; ++j)
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

inline bool is_hermitian(const CMatrix& m, double tol = Config::defaults().hermiticity_tol) {
    return hermiticity_defect(m) <= tol;
}

// (M + M^dag)/2, squashing roundoff drift after long products.
inline CMatrix hermitize(const CMatrix& m) {
    CMatrix r(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return r;
}

inline CMatrix kron(const CMatrix& x, const CMatrix& y,
                    const Config& cfg = Config::defaults()) {
    std::uint64_t rr = std::uint64_t(x.rows) * y.rows;
    std::uint64_t cc = std::uint64_t(x.cols) * y.cols;
    if (rr > cfg.kron_dim_cap || cc > cfg.kron_dim_cap)
        throw DimensionError("kron: product dimension " + std::to_string(rr) + "x" +
                             std::to_string(cc) + " exceeds cap " +
                             std::to_string(cfg.kron_dim_cap));
    CMatrix r(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) {
            cx xv = x(i, j);
            if (xv == cx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < y.rows; ++k)
                for (std::size_t l = 0; l < y.cols; ++l)
                    r(i * y.rows + k, j * y.cols + l) = xv * y(k, l);
        }
    return r;
}

// Trace out every subsystem not listed in `keep`. dims are the per-site
// dimensions in tensor order; kept sites stay in their original order.
inline CMatrix partial_trace(const CMatrix& m, const std::vector<std::size_t>& dims,
                             const std::vector<std::size_t>& keep) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw DimensionError("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (m.rows != total || m.cols != total)
        throw DimensionError("partial_trace: matrix is " + std::to_string(m.rows) +
                             "x" + std::to_string(m.cols) + " but dims multiply to " +
                             std::to_string(total));
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw DimensionError("partial_trace: keep index out of range");
        if (kept[k]) throw ContractError("partial_trace: duplicate keep index");
        kept[k] = true;
    }
    std::size_t dkeep = 1, dtrace = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? dkeep : dtrace) *= dims[s];

    // Strides of each site in the flat index, then assemble row indices from
    // a (kept, traced) coordinate pair.
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t s = dims.size(); s-- > 1;) stride[s - 1] = stride[s] * dims[s];

    auto flat = [&](std::size_t kidx, std::size_t tidx) {
        std::size_t f = 0;
        for (std::size_t s = dims.size(); s-- > 0;) {
            std::size_t d = dims[s];
            if (kept[s]) {
                f += (kidx % d) * stride[s];
                kidx /= d;
            } else {
                f += (tidx % d) * stride[s];
                tidx /= d;
            }
        }
        return f;
    };
    // The modulo walk above consumes site coordinates from the last site
    // backwards, so build lookup tables once instead of recomputing.
    std::vector<std::size_t> kmap(dkeep), tmap(dtrace);
    for (std::size_t k = 0; k < dkeep; ++k) kmap[k] = flat(k, 0);
    for (std::size_t t = 0; t < dtrace; ++t) tmap[t] = flat(0, t);

    CMatrix r(dkeep, dkeep);
    for (std::size_t i = 0; i < dkeep; ++i)
        for (std::size_t j = 0; j < dkeep; ++j) {
            cx s(0.0, 0.0);
            for (std::size_t t = 0; t < dtrace; ++t)
                s += m(kmap[i] + tmap[t], kmap[j] + tmap[t]);
            r(i, j) = s;
        }
    return r;
}

inline StateVector matvec(const CMatrix& m, const StateVector& v) {
    if (m.cols != v.size()) throw DimensionError("matvec: shape mismatch");
    StateVector r(m.rows, cx(0.0, 0.0));
    for (std::size_t i = 0; i < m.rows; ++i) {
        const cx* row = &m.a[i * m.cols];
        cx s(0.0, 0.0);
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
        r[i] = s;
    }
    return r;
}

inline cx inner(const StateVector& x, const StateVector& y) {
    if (x.size() != y.size()) throw DimensionError("inner: length mismatch");
    cx s(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double vec_norm(const StateVector& v) { return std::sqrt(std::real(inner(v, v))); }

inline void normalize(StateVector& v) {
    double n = vec_norm(v);
    if (n == 0.0) throw ContractError("normalize: zero vector");
    for (auto& c : v) c /= n;
}

// <psi| M |psi>, real part (M is Hermitian wherever this is used).
inline double expectation(const CMatrix& m, const StateVector& psi) {
    return std::real(inner(psi, matvec(m, psi)));
}

inline CMatrix pauli_x() {
    CMatrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline CMatrix pauli_y() {
    CMatrix m(2, 2);
    m(0, 1) = cx(0.0, -1.0);
    m(1, 0) = cx(0.0, 1.0);
    return m;
}

inline CMatrix pauli_z() {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

}  // namespace qgap
