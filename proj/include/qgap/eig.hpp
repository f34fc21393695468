#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/errors.hpp"
#include "qgap/matrix.hpp"

namespace qgap {

struct EigResult {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column k is the eigenvector of values[k]
};

// Cyclic Jacobi for complex Hermitian matrices. Deterministic sweep order,
// rotations applied in place, eigenvectors accumulated as a product of
// unitary Givens rotations (so orthonormality holds to roundoff).
inline EigResult herm_eig(const CMatrix& m0, const Config& cfg = Config::defaults()) {
    if (m0.rows != m0.cols) throw DimensionError("herm_eig: matrix not square");
    if (hermiticity_defect(m0) > cfg.hermiticity_tol)
        throw ContractError("herm_eig: input is not Hermitian within tolerance");
    std::size_t n = m0.rows;
    CMatrix a = hermitize(m0);
    CMatrix v = CMatrix::identity(n);
    if (n == 0) return {{}, v};

    double fro = fro_norm(a);
    double stop = cfg.eig_offdiag_tol * (fro > 0.0 ? fro : 1.0);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        off = std::sqrt(2.0 * off);
        if (off <= stop) break;
        if (sweep == 99) throw Error("herm_eig: Jacobi failed to converge in 100 sweeps");

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double r = std::abs(a(p, q));
                if (r <= stop / (double(n) * double(n)) || r == 0.0) continue;
                cx phase = a(p, q) / r;  // e^{i phi}
                double alpha = std::real(a(p, p));
                double beta = std::real(a(q, q));
                double t;
                if (alpha == beta) {
                    t = 1.0;
                } else {
                    double tau = (alpha - beta) / (2.0 * r);
                    t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                }
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                cx sp = s * std::conj(phase);  // s e^{-i phi}
                cx sm = s * phase;             // s e^{+i phi}

                a(p, p) = alpha + t * r;
                a(q, q) = beta - t * r;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    cx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + sp * akq;
                    a(k, q) = -sm * akp + c * akq;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                for (std::size_t k = 0; k < n; ++k) {
                    cx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + sp * vkq;
                    v(k, q) = -sm * vkp + c * vkq;
                }
            }
    }

    // Sort ascending, carrying columns along.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::real(a(i, i));
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    EigResult res;
    res.values.resize(n);
    res.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, k) = v(i, order[k]);
    }
    return res;
}

// Matrix sign with the zero band mapped to +1: eigenvalues within
// sign_zero_band of 0 count as +1, so the result always squares to identity.
inline CMatrix sign_operator(const CMatrix& m, const Config& cfg = Config::defaults()) {
    EigResult e = herm_eig(m, cfg);
    std::size_t n = m.rows;
    CMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = (e.values[k] < -cfg.sign_zero_band) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            cx vik = e.vectors(i, k);
            if (vik == cx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += s * vik * std::conj(e.vectors(j, k));
        }
    }
    return hermitize(r);
}

// ---- real symmetric path (used by the SDP cone projection) ---- //

// Householder reduction to tridiagonal form; a (n x n, row-major) holds the
// accumulated orthogonal transform on exit, d the diagonal, e the
// subdiagonal in e[1..n-1].
inline void tred2(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                  std::vector<double>& e) {
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (std::size_t i = n - 1; i >= 1; --i) {
        std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    A(j, i) = A(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = A(i, j);
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (std::size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += A(i, k) * A(k, j);
                for (std::size_t k = 0; k < i; ++k) A(k, j) -= g * A(k, i);
            }
        }
        d[i] = A(i, i);
        A(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) A(j, i) = A(i, j) = 0.0;
    }
}

// Implicit-shift QL on the tridiagonal (d, e) from tred2, rotating the
// transform z along so its columns end as eigenvectors.
inline void tqli(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 std::vector<double>& z) {
    auto Z = [&](std::size_t i, std::size_t j) -> double& { return z[i * n + j]; };
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        anorm = std::max(anorm, std::fabs(d[i]) + std::fabs(e[i]));
    // Off-diagonals below floor are numerical zeros; without the floor the
    // purely relative split test can stall on zero-plateau diagonals.
    double floor = DBL_EPSILON * (anorm > 0.0 ? anorm : 1.0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::max(DBL_EPSILON * dd, floor)) break;
            }
            if (m != l) {
                if (iter++ == 100) throw Error("tqli: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = Z(k, i + 1);
                        Z(k, i + 1) = s * Z(k, i) + c * f;
                        Z(k, i) = c * Z(k, i) - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

struct SymEigResult {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // n x n row-major, column k belongs to values[k]
};

inline SymEigResult sym_eig(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) throw DimensionError("sym_eig: buffer size mismatch");
    SymEigResult res;
    if (n == 0) return res;
    std::vector<double> d, e;
    tred2(a, n, d, e);
    tqli(d, e, n, a);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    res.values.resize(n);
    res.vectors.assign(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        res.values[k] = d[order[k]];
        for (std::size_t i = 0; i < n; ++i) res.vectors[i * n + k] = a[i * n + order[k]];
    }
    return res;
}

// ---- iterative top eigenpair (Lanczos, full reorthogonalization) ---- //

struct TopEig {
    double value = 0.0;
    StateVector vector;
    int matvecs = 0;
};

// Largest (algebraic) eigenpair of a Hermitian operator given as a matvec.
// Deterministic for a fixed start vector; restarts with the current Ritz
// vector until the residual drops below tol * scale.
inline TopEig top_eigenpair(std::size_t n,
                            const std::function<void(const StateVector&, StateVector&)>& apply,
                            StateVector start, const Config& cfg = Config::defaults(),
                            int max_rounds = 200) {
    const std::size_t krylov = std::min<std::size_t>(n, 48);
    if (start.size() != n || vec_norm(start) < 1e-14) {
        start.assign(n, cx(0.0, 0.0));
        start[0] = 1.0;
    }
    normalize(start);

    TopEig out;
    StateVector w(n), tmp(n);
    int kick = 0;
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<StateVector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(start);
        double scale = 1.0;
        for (std::size_t j = 0; j < krylov; ++j) {
            apply(basis[j], w);
            ++out.matvecs;
            double aj = std::real(inner(basis[j], w));
            alpha.push_back(aj);
            // Subtract projections on all kept vectors, twice to restore
            // orthogonality lost to roundoff.
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) {
                    cx coef = inner(b, w);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= coef * b[i];
                }
            double bj = vec_norm(w);
            scale = std::max(scale, std::fabs(aj) + bj);
            if (bj < 1e-13 * scale || basis.size() == krylov) break;
            beta.push_back(bj);
            for (auto& c : w) c /= bj;
            basis.push_back(w);
        }
        // Ritz pairs of the small tridiagonal.
        std::size_t k = basis.size();
        std::vector<double> t(k * k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            t[i * k + i] = alpha[i];
            if (i + 1 < k) {
                t[i * k + i + 1] = beta[i];
                t[(i + 1) * k + i] = beta[i];
            }
        }
        std::vector<double> d, e;
        tred2(t, k, d, e);
        tqli(d, e, k, t);
        std::size_t top = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (d[i] > d[top]) top = i;
        StateVector ritz(n, cx(0.0, 0.0));
        for (std::size_t j = 0; j < k; ++j) {
            double coef = t[j * k + top];
            for (std::size_t i = 0; i < n; ++i) ritz[i] += coef * basis[j][i];
        }
        normalize(ritz);
        apply(ritz, tmp);
        ++out.matvecs;
        double lam = std::real(inner(ritz, tmp));
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) resid += std::norm(tmp[i] - lam * ritz[i]);
        resid = std::sqrt(resid);
        if (resid <= cfg.lanczos_tol * scale || k == n) {
            out.value = lam;
            out.vector = ritz;
            return out;
        }
        start = ritz;
        if (k < krylov && k < n) {
            // Hit an invariant subspace that may not contain the top
            // eigenvector: nudge along a cycling basis direction.
            start[kick % n] += 1e-3;
            ++kick;
            normalize(start);
        }
    }
    throw Error("top_eigenpair: no convergence");
}

inline TopEig top_eigenpair(const CMatrix& m, StateVector start,
                            const Config& cfg = Config::defaults()) {
    if (m.rows != m.cols) throw DimensionError("top_eigenpair: matrix not square");
    auto apply = [&m](const StateVector& x, StateVector& y) { y = matvec(m, x); };
    return top_eigenpair(m.rows, apply, std::move(start), cfg);
}

}  // namespace qgap
