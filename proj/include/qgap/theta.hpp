#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/errors.hpp"
#include "qgap/graph.hpp"
#include "qgap/sdp.hpp"

namespace qgap {

// Unit vectors, one per graph vertex, orthogonal across every edge, plus the
// handle vector realizing achieved_sum = sum_i <handle, v_i>^2.
struct OrthonormalRepresentation {
    std::size_t dim = 0;
    std::vector<std::vector<double>> vectors;
    std::vector<double> handle;
    double achieved_sum = 0.0;
};

// maximize <J, X> s.t. Tr X = 1, X_ij = 0 on edges, X psd. Adjacency means
// same context here, so adjacent vertices carry orthogonal vectors; this is
// the complement of the classic theta convention.
inline SdpProblem theta_problem(const CompatibilityGraph& g) {
    std::size_t n = g.vertices.size();
    if (n == 0) throw DomainError("theta: empty graph");
    SdpProblem p;
    p.dim = n;
    p.trace_bound = 1.0;
    for (int i = 0; i < int(n); ++i)
        for (int j = i; j < int(n); ++j)
            p.objective.push_back(SymEntry{i, j, 1.0});
    SdpConstraint tr;
    for (int i = 0; i < int(n); ++i) tr.a.push_back(SymEntry{i, i, 1.0});
    tr.b = 1.0;
    p.constraints.push_back(std::move(tr));
    for (const auto& [u, v] : g.edges)
        p.constraints.push_back({{SymEntry{u, v, 0.5}}, 0.0});
    return p;
}

struct ThetaResult {
    double value = 0.0;      // primal objective of the solver
    double error_bar = 0.0;  // value + error_bar certifies an upper bound
    SdpSolution solution;
};

inline ThetaResult lovasz_theta_full(const CompatibilityGraph& g,
                                     double tol = Config::defaults().sdp_tol,
                                     const Config& cfg = Config::defaults()) {
    SdpProblem p = theta_problem(g);
    SdpSolution s = solve_sdp(p, tol, cfg.sdp_max_iters, 0, cfg);
    ThetaResult r;
    r.value = s.value;
    double correction = p.trace_bound * std::max(0.0, -s.dual_slack_min);
    r.error_bar = std::fabs(s.dual_value - s.value) + correction;
    r.solution = std::move(s);
    return r;
}

inline double lovasz_theta(const CompatibilityGraph& g,
                           double tol = Config::defaults().sdp_tol,
                           const Config& cfg = Config::defaults()) {
    return lovasz_theta_full(g, tol, cfg).value;
}

namespace detail {

inline double rdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double rnorm(const std::vector<double>& a) { return std::sqrt(rdot(a, a)); }

inline void rscale(std::vector<double>& a, double s) {
    for (double& x : a) x *= s;
}

}  // namespace detail

// Factor the optimal moment matrix into vectors, fill in zero-weight
// vertices by orthogonalizing against their neighbors, then polish pairwise
// edge overlaps down to rounding level so the construction built on top
// meets exact-commutation checks.
inline OrthonormalRepresentation recover_representation(
    const CompatibilityGraph& g, const SdpSolution& sol,
    const Config& cfg = Config::defaults()) {
    std::size_t n = g.vertices.size();
    if (sol.x.size() != n * n)
        throw DimensionError("representation: solution dimension does not match graph");

    SymEigResult e = sym_eig(sol.x, n);
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k)
        if (e.values[k] >= cfg.rep_truncate_tol) kept.push_back(k);
    if (kept.empty()) throw Error("representation: moment matrix numerically zero");
    std::size_t d = kept.size();

    OrthonormalRepresentation rep;
    rep.dim = d;
    rep.vectors.assign(n, std::vector<double>(d, 0.0));
    std::vector<double> weight(n, 0.0);  // |w_i| before normalization
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < d; ++r)
            rep.vectors[i][r] = std::sqrt(e.values[kept[r]]) * e.vectors[i * n + kept[r]];
        weight[i] = detail::rnorm(rep.vectors[i]);
    }

    std::vector<std::vector<int>> nbrs(n);
    for (const auto& [u, v] : g.edges) {
        nbrs[u].push_back(v);
        nbrs[v].push_back(u);
    }

    std::vector<bool> valid(n, false);
    for (std::size_t i = 0; i < n; ++i)
        if (weight[i] > cfg.rep_zero_vector_tol) {
            detail::rscale(rep.vectors[i], 1.0 / weight[i]);
            valid[i] = true;
        } else {
            weight[i] = 0.0;
        }
    for (std::size_t i = 0; i < n; ++i) {
        if (valid[i]) continue;
        // Vanishing weight: deterministic Gram-Schmidt against the span of
        // the neighbors already holding vectors, cycling through basis seeds.
        for (std::size_t s = 0; s < d && !valid[i]; ++s) {
            std::vector<double> cand(d, 0.0);
            cand[(i + s) % d] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (int nb : nbrs[i]) {
                    if (!valid[std::size_t(nb)]) continue;
                    const auto& w = rep.vectors[std::size_t(nb)];
                    double c = detail::rdot(cand, w);
                    for (std::size_t k = 0; k < d; ++k) cand[k] -= c * w[k];
                }
            double cn = detail::rnorm(cand);
            if (cn > 1e-6) {
                detail::rscale(cand, 1.0 / cn);
                rep.vectors[i] = std::move(cand);
                valid[i] = true;
            }
        }
        if (!valid[i])
            throw Error("representation: no unit vector orthogonal to neighbors of vertex " +
                        std::to_string(i));
    }

    // Pairwise symmetric orthogonalization across edges.
    for (int sweep = 0; sweep < cfg.rep_polish_sweeps; ++sweep) {
        double worst = 0.0;
        for (const auto& [u, v] : g.edges) {
            auto& a = rep.vectors[u];
            auto& b = rep.vectors[v];
            double c = detail::rdot(a, b);
            worst = std::max(worst, std::fabs(c));
            if (c == 0.0) continue;
            double h = 0.5 * c;
            std::vector<double> a2(d), b2(d);
            for (std::size_t k = 0; k < d; ++k) {
                a2[k] = a[k] - h * b[k];
                b2[k] = b[k] - h * a[k];
            }
            detail::rscale(a2, 1.0 / detail::rnorm(a2));
            detail::rscale(b2, 1.0 / detail::rnorm(b2));
            a = std::move(a2);
            b = std::move(b2);
        }
        if (worst < 1e-15) break;
    }

    rep.handle.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) rep.handle[k] += weight[i] * rep.vectors[i][k];
    double hn = detail::rnorm(rep.handle);
    if (hn < cfg.rep_zero_vector_tol)
        throw Error("representation: handle vector vanished");
    detail::rscale(rep.handle, 1.0 / hn);

    rep.achieved_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double c = detail::rdot(rep.handle, rep.vectors[i]);
        rep.achieved_sum += c * c;
    }
    return rep;
}

inline OrthonormalRepresentation theta_representation(const CompatibilityGraph& g,
                                                      double tol = Config::defaults().sdp_tol,
                                                      const Config& cfg = Config::defaults()) {
    return recover_representation(g, lovasz_theta_full(g, tol, cfg).solution, cfg);
}

// ---- export ---- //

inline std::string serialize_representation(const OrthonormalRepresentation& rep) {
    std::ostringstream out;
    out.precision(17);
    out << "# qgap onr v1\n";
    out << "dim " << rep.dim << "\n";
    out << "vertices " << rep.vectors.size() << "\n";
    for (std::size_t i = 0; i < rep.vectors.size(); ++i) {
        out << i;
        for (double x : rep.vectors[i]) out << " " << x;
        out << "\n";
    }
    out << "handle";
    for (double x : rep.handle) out << " " << x;
    out << "\n";
    out << "achieved_sum " << rep.achieved_sum << "\n";
    return out.str();
}

}  // namespace qgap
