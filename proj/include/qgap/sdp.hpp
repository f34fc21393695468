#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/eig.hpp"
#include "qgap/errors.hpp"

namespace qgap {

// Sparse entry of a symmetric matrix: value at (i, j) and, implicitly, at
// (j, i). Stored with i <= j.
struct SymEntry {
    int i = 0;
    int j = 0;
    double v = 0.0;
};

struct SdpConstraint {
    std::vector<SymEntry> a;
    double b = 0.0;
};

// maximize <C, X>  s.t.  <A_k, X> = b_k,  X psd.
struct SdpProblem {
    std::size_t dim = 0;
    std::vector<SymEntry> objective;
    std::vector<SdpConstraint> constraints;
    // When the constraints structurally pin Tr X (unit diagonal, unit trace),
    // callers set this so dual slack can be turned into a sound bound.
    double trace_bound = 0.0;
};

struct SdpSolution {
    std::vector<double> x;       // dim x dim row-major, the psd iterate
    std::vector<double> y;       // one multiplier per deduplicated constraint
    double value = 0.0;          // primal <C, X>
    double dual_value = 0.0;     // b^T y, an upper bound once the slack is psd
    double dual_slack_min = 0.0; // most negative eigenvalue of A^T y - C
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    std::string status;          // optimal | max_iters | infeasible-suspected
};

namespace detail {

inline void normalize_entries(std::vector<SymEntry>& es) {
    for (auto& e : es)
        if (e.i > e.j) std::swap(e.i, e.j);
    std::sort(es.begin(), es.end(), [](const SymEntry& a, const SymEntry& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::vector<SymEntry> out;
    for (const auto& e : es) {
        if (!out.empty() && out.back().i == e.i && out.back().j == e.j)
            out.back().v += e.v;
        else
            out.push_back(e);
    }
    std::erase_if(out, [](const SymEntry& e) { return e.v == 0.0; });
    es = std::move(out);
}

// Frobenius inner product with a dense symmetric matrix.
inline double dot_dense(const std::vector<SymEntry>& a, const std::vector<double>& x,
                        std::size_t n) {
    double s = 0.0;
    for (const auto& e : a) {
        double w = x[std::size_t(e.i) * n + e.j];
        s += (e.i == e.j) ? e.v * w : 2.0 * e.v * w;
    }
    return s;
}

inline double fro2(const std::vector<SymEntry>& a) {
    double s = 0.0;
    for (const auto& e : a) s += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
    return s;
}

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

// Projector onto {X : <A_k, X> = b_k}. The constraint Gram matrix splits into
// connected components over shared support cells; each component is factored
// once with a band Cholesky (chains of equalities give bandwidth 1, a dense
// component is just the worst band), so a projection costs O(total entries).
struct AffineProjector {
    std::size_t n = 0;
    std::vector<SdpConstraint> cons;  // scaled to unit Frobenius norm
    std::vector<double> scale;        // original ||A_k||_F

    struct Component {
        std::vector<int> members;
        std::size_t bw = 0;
        std::vector<double> chol;  // band storage, members.size() x (bw+1)
    };
    std::vector<Component> comps;
    std::vector<double> resid;
    std::vector<double> lambda;

    AffineProjector(const SdpProblem& p, std::size_t dim) : n(dim) {
        for (const auto& c0 : p.constraints) {
            SdpConstraint c = c0;
            normalize_entries(c.a);
            if (c.a.empty()) {
                if (std::fabs(c.b) > 1e-12)
                    throw ContractError("sdp: empty constraint with nonzero rhs");
                continue;
            }
            for (const auto& e : c.a)
                if (e.i < 0 || std::size_t(e.j) >= n)
                    throw DimensionError("sdp: constraint entry out of range");
            double s = std::sqrt(fro2(c.a));
            for (auto& e : c.a) e.v /= s;
            c.b /= s;
            cons.push_back(std::move(c));
            scale.push_back(s);
        }
        std::vector<std::size_t> keep;
        std::map<std::string, std::size_t> seen;
        for (std::size_t k = 0; k < cons.size(); ++k) {
            std::ostringstream sig;
            for (const auto& e : cons[k].a) sig << e.i << "," << e.j << "," << e.v << ";";
            auto [it, fresh] = seen.try_emplace(sig.str(), k);
            if (fresh) {
                keep.push_back(k);
            } else if (std::fabs(cons[it->second].b - cons[k].b) > 1e-10) {
                throw ContractError("sdp: duplicate constraint with conflicting rhs");
            }
        }
        if (keep.size() != cons.size()) {
            std::vector<SdpConstraint> c2;
            std::vector<double> s2;
            for (std::size_t k : keep) {
                c2.push_back(std::move(cons[k]));
                s2.push_back(scale[k]);
            }
            cons = std::move(c2);
            scale = std::move(s2);
        }

        int m = static_cast<int>(cons.size());
        UnionFind uf(m);
        std::map<std::uint64_t, std::vector<std::pair<int, double>>> cells;
        for (int k = 0; k < m; ++k)
            for (const auto& e : cons[k].a) {
                std::uint64_t cell = std::uint64_t(e.i) * n + e.j;
                auto& lst = cells[cell];
                if (!lst.empty()) uf.unite(k, lst.front().first);
                lst.push_back({k, (e.i == e.j ? 1.0 : 2.0) * e.v});
            }
        std::map<int, std::vector<int>> groups;
        for (int k = 0; k < m; ++k) groups[uf.find(k)].push_back(k);

        std::vector<int> local(m, -1);
        for (auto& [root, members] : groups) {
            Component comp;
            comp.members = members;
            std::size_t sz = members.size();
            for (std::size_t a = 0; a < sz; ++a) local[members[a]] = int(a);

            std::map<std::pair<int, int>, double> gram;  // (row >= col) local indices
            for (int k : members)
                for (const auto& e : cons[k].a) {
                    const auto& lst = cells[std::uint64_t(e.i) * n + e.j];
                    double w_k = (e.i == e.j ? 1.0 : 2.0) * e.v;
                    for (const auto& [k2, w2] : lst) {
                        int a = local[k], b = local[k2];
                        if (a < b) continue;
                        double w = w_k * w2;
                        if (e.i != e.j) w *= 0.5;  // both factors carry the doubling
                        gram[{a, b}] += w;
                    }
                }
            std::size_t bw = 0;
            for (const auto& [rc, v] : gram)
                bw = std::max(bw, std::size_t(rc.first - rc.second));
            comp.bw = bw;
            comp.chol.assign(sz * (bw + 1), 0.0);
            auto G = [&](std::size_t r, std::size_t c) {
                auto it = gram.find({int(r), int(c)});
                return it == gram.end() ? 0.0 : it->second;
            };
            auto L = [&](std::size_t r, std::size_t c) -> double& {
                return comp.chol[r * (bw + 1) + (c + bw - r)];
            };
            for (std::size_t c = 0; c < sz; ++c) {
                for (std::size_t r = c; r < std::min(sz, c + bw + 1); ++r) {
                    double s = G(r, c);
                    std::size_t k0 = r > bw ? r - bw : 0;
                    for (std::size_t k2 = k0; k2 < c; ++k2) s -= L(r, k2) * L(c, k2);
                    if (r == c) {
                        if (s < 1e-12)
                            throw ContractError(
                                "sdp: constraints linearly dependent after deduplication");
                        L(c, c) = std::sqrt(s);
                    } else {
                        L(r, c) = s / L(c, c);
                    }
                }
            }
            comps.push_back(std::move(comp));
        }
        resid.resize(cons.size());
        lambda.resize(cons.size());
    }

    void residuals(const std::vector<double>& x) {
        for (std::size_t k = 0; k < cons.size(); ++k)
            resid[k] = dot_dense(cons[k].a, x, n) - cons[k].b;
    }

    // x <- x - A^T G^{-1} (A(x) - b); fills lambda with G^{-1}(A(x) - b).
    void project(std::vector<double>& x) {
        residuals(x);
        for (const auto& comp : comps) {
            std::size_t sz = comp.members.size();
            std::size_t bw = comp.bw;
            const double* ch = comp.chol.data();
            auto L = [&](std::size_t r, std::size_t c) { return ch[r * (bw + 1) + (c + bw - r)]; };
            std::vector<double> r(sz);
            for (std::size_t a = 0; a < sz; ++a) r[a] = resid[comp.members[a]];
            for (std::size_t a = 0; a < sz; ++a) {
                double s = r[a];
                std::size_t k0 = a > bw ? a - bw : 0;
                for (std::size_t k2 = k0; k2 < a; ++k2) s -= L(a, k2) * r[k2];
                r[a] = s / L(a, a);
            }
            for (std::size_t a = sz; a-- > 0;) {
                double s = r[a];
                for (std::size_t k2 = a + 1; k2 < std::min(sz, a + bw + 1); ++k2)
                    s -= L(k2, a) * r[k2];
                r[a] = s / L(a, a);
            }
            for (std::size_t a = 0; a < sz; ++a) lambda[comp.members[a]] = r[a];
        }
        for (std::size_t k = 0; k < cons.size(); ++k) {
            double lk = lambda[k];
            if (lk == 0.0) continue;
            for (const auto& e : cons[k].a) {
                x[std::size_t(e.i) * n + e.j] -= lk * e.v;
                if (e.i != e.j) x[std::size_t(e.j) * n + e.i] -= lk * e.v;
            }
        }
    }
};

// Projection onto the psd cone. Reconstructs from whichever side of the
// spectrum is smaller.
inline void psd_project(std::vector<double>& x, std::size_t n, std::vector<double>& work) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double m = 0.5 * (x[i * n + j] + x[j * n + i]);
            x[i * n + j] = m;
            x[j * n + i] = m;
        }
    SymEigResult e = sym_eig(x, n);
    std::size_t npos = 0;
    for (double v : e.values)
        if (v > 0.0) ++npos;
    work.assign(n * n, 0.0);
    bool build_pos = npos <= n - npos;
    for (std::size_t k = 0; k < n; ++k) {
        double v = e.values[k];
        if (build_pos ? (v <= 0.0) : (v > 0.0)) continue;
        for (std::size_t i = 0; i < n; ++i) {
            double w = v * e.vectors[i * n + k];
            if (w == 0.0) continue;
            for (std::size_t j = i; j < n; ++j) work[i * n + j] += w * e.vectors[j * n + k];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) work[i * n + j] = work[j * n + i];
    if (build_pos) {
        x = work;
    } else {
        for (std::size_t k = 0; k < n * n; ++k) x[k] -= work[k];
    }
}

}  // namespace detail

// First-order splitting solver: alternate projection onto the affine
// constraint set (cached band factorization) and onto the psd cone
// (eigendecomposition), with over-relaxation. Deterministic for fixed inputs;
// the seed parameter is accepted for interface uniformity and does not
// influence the iterates.
inline SdpSolution solve_sdp(const SdpProblem& p, double tol = Config::defaults().sdp_tol,
                             int max_iters = Config::defaults().sdp_max_iters,
                             std::uint64_t seed = 0,
                             const Config& cfg = Config::defaults()) {
    (void)seed;
    std::size_t n = p.dim;
    if (n == 0) throw DimensionError("sdp: zero dimension");
    if (tol <= 0) throw ContractError("sdp: tolerance must be positive");
    std::vector<SymEntry> c = p.objective;
    detail::normalize_entries(c);
    double cnorm = std::sqrt(detail::fro2(c));
    double cscale = cnorm > 0.0 ? cnorm : 1.0;
    std::vector<SymEntry> chat = c;
    for (auto& e : chat) e.v /= cscale;

    detail::AffineProjector aff(p, n);

    double bnorm = 0.0;
    for (const auto& ck : aff.cons) bnorm += ck.b * ck.b;
    bnorm = std::sqrt(bnorm);

    double t = p.trace_bound > 0.0 ? std::max(0.05, p.trace_bound / std::sqrt(double(n)))
                                   : 1.0;
    const double rho = cfg.sdp_relaxation;

    std::vector<double> z(n * n, 0.0), x, y, y_prev, work;
    int stable = 0;
    double prev_obj = 0.0;
    SdpSolution sol;
    sol.status = "max_iters";

    auto tilt = [&](std::vector<double>& m) {
        for (const auto& e : chat) {
            m[std::size_t(e.i) * n + e.j] += t * e.v;
            if (e.i != e.j) m[std::size_t(e.j) * n + e.i] += t * e.v;
        }
    };

    int iter = 0;
    for (; iter < max_iters; ++iter) {
        x = z;
        tilt(x);
        aff.project(x);
        std::swap(y_prev, y);
        y.resize(n * n);
        for (std::size_t k = 0; k < n * n; ++k) y[k] = 2.0 * x[k] - z[k];
        detail::psd_project(y, n, work);
        for (std::size_t k = 0; k < n * n; ++k) z[k] += rho * (y[k] - x[k]);

        if (iter % 5 == 4) {
            aff.residuals(y);
            double pres = 0.0;
            for (double rv : aff.resid) pres += rv * rv;
            pres = std::sqrt(pres) / (1.0 + bnorm);
            double dres = 0.0, ynorm = 0.0;
            for (std::size_t k = 0; k < n * n; ++k) {
                double d = y[k] - y_prev[k];
                dres += d * d;
                ynorm += y[k] * y[k];
            }
            dres = std::sqrt(dres) / (1.0 + std::sqrt(ynorm));
            double obj = detail::dot_dense(chat, y, n);
            double dobj = std::fabs(obj - prev_obj) / (1.0 + std::fabs(obj));
            prev_obj = obj;
            if (std::max({pres, dres, dobj}) < tol) {
                if (++stable >= (cfg.sdp_stable_iters + 4) / 5) {
                    sol.status = "optimal";
                    ++iter;
                    break;
                }
            } else {
                stable = 0;
            }
        }
    }
    sol.iterations = iter;

    // Unscale and report. The projection step gives x = (z + t*Chat) - A^T l,
    // so the dual slack is A^T(l/t) - Chat and the multiplier in user units
    // is y_k = (l_k / t) * cscale / ||A_k||.
    sol.x = y;
    sol.value = detail::dot_dense(c, y, n);
    x = z;
    tilt(x);
    aff.project(x);
    sol.y.resize(aff.cons.size());
    sol.dual_value = 0.0;
    for (std::size_t k = 0; k < aff.cons.size(); ++k) {
        sol.y[k] = aff.lambda[k] / t * cscale / aff.scale[k];
        sol.dual_value += aff.lambda[k] / t * cscale * aff.cons[k].b;
    }

    // Dual slack S = A^T y - C must be psd for b^T y to upper-bound the
    // primal; record its most negative eigenvalue so callers can certify.
    std::vector<double> slack(n * n, 0.0);
    for (std::size_t k = 0; k < aff.cons.size(); ++k) {
        double yk = aff.lambda[k] / t * cscale;  // pairs with unit-norm A_k
        for (const auto& e : aff.cons[k].a) {
            slack[std::size_t(e.i) * n + e.j] += yk * e.v;
            if (e.i != e.j) slack[std::size_t(e.j) * n + e.i] += yk * e.v;
        }
    }
    for (const auto& e : c) {
        slack[std::size_t(e.i) * n + e.j] -= e.v;
        if (e.i != e.j) slack[std::size_t(e.j) * n + e.i] -= e.v;
    }
    SymEigResult se = sym_eig(slack, n);
    sol.dual_slack_min = se.values.empty() ? 0.0 : se.values.front();

    aff.residuals(y);
    double pres = 0.0;
    for (double rv : aff.resid) pres += rv * rv;
    sol.primal_residual = std::sqrt(pres) / (1.0 + bnorm);
    double dres = 0.0, ynorm = 0.0;
    if (!y_prev.empty())
        for (std::size_t k = 0; k < n * n; ++k) {
            double d = y[k] - y_prev[k];
            dres += d * d;
            ynorm += y[k] * y[k];
        }
    sol.dual_residual = std::sqrt(dres) / (1.0 + std::sqrt(ynorm));

    if (sol.status == "max_iters" && sol.primal_residual > std::sqrt(tol))
        sol.status = "infeasible-suspected";
    return sol;
}

// ---- triplet dump / restore ---- //

inline std::string dump_sdp(const SdpProblem& p) {
    std::ostringstream out;
    out.precision(17);
    out << "# qgap sdp v1\n";
    out << "dim " << p.dim << "\n";
    out << "trace_bound " << p.trace_bound << "\n";
    std::vector<SymEntry> c = p.objective;
    detail::normalize_entries(c);
    out << "entries\n";
    for (const auto& e : c) out << "0 " << e.i << " " << e.j << " " << e.v << "\n";
    for (std::size_t k = 0; k < p.constraints.size(); ++k) {
        std::vector<SymEntry> a = p.constraints[k].a;
        detail::normalize_entries(a);
        for (const auto& e : a)
            out << (k + 1) << " " << e.i << " " << e.j << " " << e.v << "\n";
    }
    out << "rhs\n";
    for (std::size_t k = 0; k < p.constraints.size(); ++k)
        out << (k + 1) << " " << p.constraints[k].b << "\n";
    return out.str();
}

inline SdpProblem parse_sdp(const std::string& text) {
    std::istringstream in(text);
    SdpProblem p;
    std::string line;
    int lineno = 0;
    enum { HEAD, ENTRIES, RHS } state = HEAD;
    auto fail = [&](const std::string& msg) {
        throw ParseError("sdp document line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        std::istringstream ls(stripped);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks[0] == "dim" && toks.size() == 2) {
            p.dim = std::stoul(toks[1]);
        } else if (toks[0] == "trace_bound" && toks.size() == 2) {
            p.trace_bound = std::stod(toks[1]);
        } else if (toks[0] == "entries") {
            state = ENTRIES;
        } else if (toks[0] == "rhs") {
            state = RHS;
        } else if (state == ENTRIES && toks.size() == 4) {
            std::size_t k = std::stoul(toks[0]);
            SymEntry e{std::stoi(toks[1]), std::stoi(toks[2]), std::stod(toks[3])};
            if (e.i < 0 || e.j < 0 || std::size_t(e.i) >= p.dim || std::size_t(e.j) >= p.dim)
                fail("entry index out of range");
            if (k == 0) {
                p.objective.push_back(e);
            } else {
                if (p.constraints.size() < k) p.constraints.resize(k);
                p.constraints[k - 1].a.push_back(e);
            }
        } else if (state == RHS && toks.size() == 2) {
            std::size_t k = std::stoul(toks[0]);
            if (k == 0 || k > p.constraints.size()) fail("rhs index out of range");
            p.constraints[k - 1].b = std::stod(toks[1]);
        } else {
            fail("unrecognized line '" + line + "'");
        }
    }
    if (p.dim == 0) throw ParseError("sdp document: missing dim header");
    return p;
}

}  // namespace qgap
