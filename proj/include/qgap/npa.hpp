#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/errors.hpp"
#include "qgap/operators.hpp"
#include "qgap/parallel.hpp"
#include "qgap/sdp.hpp"

namespace qgap {

// Word over the observable symbols. Letters of different parties commute;
// letters of one party are free generators of order two.
struct Monomial {
    std::vector<Factor> letters;
    bool operator==(const Monomial&) const = default;
    auto operator<=>(const Monomial&) const = default;
};

inline Monomial canonicalize(Monomial m) {
    std::stable_sort(m.letters.begin(), m.letters.end(),
                     [](const Factor& a, const Factor& b) { return a.party < b.party; });
    std::vector<Factor> out;
    for (const Factor& f : m.letters) {
        if (!out.empty() && out.back() == f)
            out.pop_back();
        else
            out.push_back(f);
    }
    m.letters = std::move(out);
    return m;
}

inline Monomial reversed(const Monomial& m) {
    Monomial r = m;
    std::reverse(r.letters.begin(), r.letters.end());
    return canonicalize(r);
}

// Representative of the {word, reversed word} pair; the moment matrix is
// taken real symmetric, which identifies the two.
inline Monomial moment_class(const Monomial& m) {
    Monomial r = reversed(m);
    return r.letters < m.letters ? r : m;
}

// All canonical words of length <= level, identity first, in breadth-first
// order with letters enumerated by (party, setting). Every canonical word has
// a unique parent (drop the last letter), so no deduplication is needed.
inline std::vector<Monomial> npa_basis(const CorrelationOperator& op, int level) {
    if (level < 0) throw DomainError("npa: level must be nonnegative");
    std::vector<Factor> alphabet = observables(op);
    std::vector<Monomial> basis{Monomial{}};
    std::size_t lo = 0, hi = 1;
    for (int len = 1; len <= level; ++len) {
        for (std::size_t w = lo; w < hi; ++w) {
            Monomial base = basis[w];
            Factor last = base.letters.empty() ? Factor{0, 0} : base.letters.back();
            for (const Factor& f : alphabet) {
                if (f.party < last.party) continue;
                if (f.party == last.party && f.setting == last.setting) continue;
                Monomial ext = base;
                ext.letters.push_back(f);
                basis.push_back(std::move(ext));
            }
        }
        lo = hi;
        hi = basis.size();
    }
    return basis;
}

struct MomentMatrixIndex {
    std::vector<Monomial> basis;
    // class representative -> entries (i, j) with i <= j, scan order
    std::map<std::vector<Factor>, std::vector<std::pair<int, int>>> classes;
};

inline MomentMatrixIndex build_moment_index(const CorrelationOperator& op, int level) {
    MomentMatrixIndex idx;
    idx.basis = npa_basis(op, level);
    int n = static_cast<int>(idx.basis.size());

    std::vector<std::vector<std::pair<std::vector<Factor>, int>>> rows(n);
    parallel_for(std::size_t(n), [&](std::size_t i) {
        std::vector<std::pair<std::vector<Factor>, int>> row;
        Monomial ri;
        ri.letters.assign(idx.basis[i].letters.rbegin(), idx.basis[i].letters.rend());
        for (int j = int(i); j < n; ++j) {
            Monomial w = ri;
            w.letters.insert(w.letters.end(), idx.basis[j].letters.begin(),
                             idx.basis[j].letters.end());
            row.push_back({moment_class(canonicalize(std::move(w))).letters, j});
        }
        rows[i] = std::move(row);
    });
    for (int i = 0; i < n; ++i)
        for (auto& [key, j] : rows[i]) idx.classes[std::move(key)].push_back({i, j});
    return idx;
}

inline SdpProblem build_relaxation(const CorrelationOperator& op, int level) {
    validate_operator(op);
    std::size_t max_arity = 0;
    for (std::size_t ti = 0; ti < op.terms.size(); ++ti)
        max_arity = std::max(max_arity, op.terms[ti].factors.size());
    for (std::size_t ti = 0; ti < op.terms.size(); ++ti)
        if (op.terms[ti].factors.size() > 2 * std::size_t(level))
            throw DomainError("npa: level " + std::to_string(level) +
                              " too small for terms[" + std::to_string(ti) + "] with " +
                              std::to_string(op.terms[ti].factors.size()) + " factors");

    MomentMatrixIndex idx = build_moment_index(op, level);
    std::size_t n = idx.basis.size();

    SdpProblem p;
    p.dim = n;
    p.trace_bound = double(n);
    p.constraints.push_back({{SymEntry{0, 0, 1.0}}, 1.0});
    for (const auto& [key, entries] : idx.classes) {
        for (std::size_t m = 0; m + 1 < entries.size(); ++m) {
            auto [i1, j1] = entries[m];
            auto [i2, j2] = entries[m + 1];
            double v1 = i1 == j1 ? 1.0 : 0.5;
            double v2 = i2 == j2 ? 1.0 : 0.5;
            p.constraints.push_back({{SymEntry{i1, j1, v1}, SymEntry{i2, j2, -v2}}, 0.0});
        }
    }

    std::map<std::pair<int, int>, double> obj;
    for (const auto& term : op.terms) {
        Monomial w;
        for (const auto& f : term.factors) w.letters.push_back(f);
        w = canonicalize(std::move(w));
        auto it = idx.classes.find(moment_class(w).letters);
        if (it == idx.classes.end())
            throw ContractError("npa: term monomial missing from moment matrix");
        auto [i, j] = it->second.front();
        obj[{i, j}] += term.coeff * (i == j ? 1.0 : 0.5);
    }
    for (const auto& [ij, v] : obj)
        p.objective.push_back(SymEntry{ij.first, ij.second, v});
    return p;
}

struct NpaResult {
    double value = 0.0;      // dual objective of the relaxation
    double error_bar = 0.0;  // value + error_bar is a certified upper bound
    int level = 0;
    std::size_t basis_size = 0;
    int iterations = 0;
    std::string sdp_status;
};

inline NpaResult npa_upper_bound(const CorrelationOperator& op, int level,
                                 double tol = Config::defaults().sdp_tol,
                                 int max_iters = Config::defaults().sdp_max_iters,
                                 std::uint64_t seed = 0,
                                 const Config& cfg = Config::defaults()) {
    SdpProblem p = build_relaxation(op, level);
    SdpSolution s = solve_sdp(p, tol, max_iters, seed, cfg);
    NpaResult r;
    r.level = level;
    r.basis_size = p.dim;
    r.iterations = s.iterations;
    r.sdp_status = s.status;
    double correction = p.trace_bound * std::max(0.0, -s.dual_slack_min);
    r.value = s.dual_value;
    r.error_bar = std::fabs(s.dual_value - s.value) + correction;
    return r;
}

// Lowest level in [level_min, level_max] whose certified upper bound reaches
// target + tol; 0 if none does. Records the bound obtained at each level.
struct LevelScan {
    int certified_level = 0;
    std::vector<NpaResult> bounds;
};

inline LevelScan npa_certify_level(const CorrelationOperator& op, double target,
                                   int level_max, double tol,
                                   const Config& cfg = Config::defaults()) {
    std::size_t max_arity = 0;
    for (const auto& t : op.terms) max_arity = std::max(max_arity, t.factors.size());
    int level_min = int((max_arity + 1) / 2);
    LevelScan scan;
    for (int lv = std::max(1, level_min); lv <= level_max; ++lv) {
        NpaResult r = npa_upper_bound(op, lv, cfg.sdp_tol, cfg.sdp_max_iters, 0, cfg);
        scan.bounds.push_back(r);
        if (r.value + r.error_bar <= target + tol) {
            scan.certified_level = lv;
            break;
        }
    }
    return scan;
}

// Sidecar mapping basis indices to monomial strings; the identity is "e".
inline std::string basis_sidecar(const std::vector<Monomial>& basis) {
    std::ostringstream out;
    out << "# qgap npa basis v1\n";
    for (std::size_t i = 0; i < basis.size(); ++i) {
        out << i;
        if (basis[i].letters.empty()) {
            out << " e";
        } else {
            for (const auto& f : basis[i].letters) out << " " << f.party << ":" << f.setting;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace qgap
