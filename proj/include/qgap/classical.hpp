#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/errors.hpp"
#include "qgap/operators.hpp"
#include "qgap/parallel.hpp"

namespace qgap {

struct ClassicalResult {
    double value = 0.0;
    std::map<Factor, int> witness;  // +/-1 per observable that occurs in a term
    bool integer_arithmetic = false;
    std::uint64_t enumerated = 0;   // assignments visited after elimination
};

namespace detail {

// Per-term data against the enumeration bit layout. Bit k set in x means
// observable k is assigned -1.
struct TermBits {
    std::uint64_t mask = 0;  // enumerated observables in this term
    double coeff = 0.0;
    std::int64_t icoeff = 0;
    int group = -1;          // setting index of the eliminated party, or -1
};

struct BestTracker {
    bool valid = false;
    double value = 0.0;
    std::vector<int> key;  // signs over all observables in sorted order, +1 first

    // Lexicographic order with +1 < -1, applied only on value ties.
    bool offer(double v, const std::vector<int>& k) {
        if (!valid || v > value) {
            valid = true;
            value = v;
            key = k;
            return true;
        }
        if (v == value) {
            // +1 sorts before -1, so compare flipped signs numerically.
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (k[i] == key[i]) continue;
                if (k[i] > key[i]) {  // +1 beats -1
                    key = k;
                    return true;
                }
                return false;
            }
        }
        return false;
    }
};

}  // namespace detail

// Exact maximum of the operator over deterministic +/-1 assignments.
// The party with the most observed observables is never enumerated: for a
// fixed assignment of everyone else, each of its settings independently
// takes the sign of its partial sum. Remaining assignments are enumerated
// as bit patterns, split across worker threads by prefix, with a
// deterministic (value, then lexicographic witness) reduction.
inline ClassicalResult classical_max(const CorrelationOperator& op,
                                     const Config& cfg = Config::defaults()) {
    validate_operator(op);
    std::vector<Factor> obs = observables(op);
    if (obs.empty()) {
        ClassicalResult r;
        for (const auto& t : op.terms) r.value += t.coeff;
        r.integer_arithmetic = integral_coefficients(op);
        r.enumerated = 1;
        return r;
    }

    std::vector<int> count(op.parties + 1, 0);
    for (const auto& f : obs) ++count[f.party];
    int elim = 1;
    for (int p = 1; p <= op.parties; ++p)
        if (count[p] >= count[elim]) elim = p;

    std::vector<Factor> enumerated, elim_obs;
    for (const auto& f : obs) (f.party == elim ? elim_obs : enumerated).push_back(f);

    if (enumerated.size() > 62)
        throw ResourceError("classical_max: " + std::to_string(enumerated.size()) +
                            " observables to enumerate exceed the 62-bit limit");
    std::uint64_t space = 1ull << enumerated.size();
    if (space > cfg.enumeration_budget)
        throw ResourceError("classical_max: needs " + std::to_string(space) +
                            " assignments after elimination, budget is " +
                            std::to_string(cfg.enumeration_budget));

    std::map<Factor, int> bit_of;
    for (std::size_t i = 0; i < enumerated.size(); ++i) bit_of[enumerated[i]] = int(i);
    std::map<Factor, int> group_of;
    for (std::size_t i = 0; i < elim_obs.size(); ++i) group_of[elim_obs[i]] = int(i);

    const bool integral = integral_coefficients(op);
    std::vector<detail::TermBits> tb;
    for (const auto& t : op.terms) {
        detail::TermBits b;
        b.coeff = t.coeff;
        b.icoeff = static_cast<std::int64_t>(std::llround(t.coeff));
        for (const auto& f : t.factors) {
            if (f.party == elim)
                b.group = group_of.at(f);
            else
                b.mask |= 1ull << bit_of.at(f);
        }
        tb.push_back(b);
    }
    const int ngroups = static_cast<int>(elim_obs.size());

    // Full sign key over all observables in sorted order, for tie-breaking.
    auto make_key = [&](std::uint64_t x, const std::vector<int>& elim_signs) {
        std::vector<int> key;
        key.reserve(obs.size());
        for (const auto& f : obs) {
            if (f.party == elim)
                key.push_back(elim_signs[group_of.at(f)]);
            else
                key.push_back((x >> bit_of.at(f)) & 1 ? -1 : 1);
        }
        return key;
    };

    auto evaluate = [&](std::uint64_t x, std::vector<int>& elim_signs) -> double {
        if (integral) {
            std::int64_t base = 0;
            std::vector<std::int64_t> part(ngroups, 0);
            for (const auto& b : tb) {
                std::int64_t s = (std::popcount(x & b.mask) & 1) ? -b.icoeff : b.icoeff;
                if (b.group < 0)
                    base += s;
                else
                    part[b.group] += s;
            }
            std::int64_t v = base;
            for (int g = 0; g < ngroups; ++g) {
                v += std::llabs(part[g]);
                elim_signs[g] = part[g] < 0 ? -1 : 1;
            }
            return static_cast<double>(v);
        }
        double base = 0.0;
        std::vector<double> part(ngroups, 0.0);
        for (const auto& b : tb) {
            double s = (std::popcount(x & b.mask) & 1) ? -b.coeff : b.coeff;
            if (b.group < 0)
                base += s;
            else
                part[b.group] += s;
        }
        double v = base;
        for (int g = 0; g < ngroups; ++g) {
            v += std::fabs(part[g]);
            elim_signs[g] = part[g] < 0.0 ? -1 : 1;
        }
        return v;
    };

    unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), 64));
    while (workers > 1 && space / workers < 1024) workers /= 2;
    std::vector<detail::BestTracker> best(workers);
    std::uint64_t chunk = space / workers + 1;

    parallel_for(workers, [&](std::size_t w) {
        std::uint64_t lo = w * chunk;
        std::uint64_t hi = std::min(space, lo + chunk);
        std::vector<int> elim_signs(ngroups, 1);
        detail::BestTracker& bt = best[w];
        for (std::uint64_t x = lo; x < hi; ++x) {
            double v = evaluate(x, elim_signs);
            if (bt.valid && v < bt.value) continue;
            bt.offer(v, make_key(x, elim_signs));
        }
    });

    detail::BestTracker total;
    for (const auto& bt : best)
        if (bt.valid) total.offer(bt.value, bt.key);

    ClassicalResult r;
    r.value = total.value;
    r.integer_arithmetic = integral;
    r.enumerated = space;
    for (std::size_t i = 0; i < obs.size(); ++i) r.witness[obs[i]] = total.key[i];
    return r;
}

// Structural sanity for the chained family: under every deterministic
// assignment the value is an even integer, and the product of the first n
// term values equals the product of the last n (both reduce to the product
// of all observables). Exhaustive up to 2^20 assignments, sampled beyond.
inline bool parity_check_sn(int n, const Config& cfg = Config::defaults()) {
    (void)cfg;
    CorrelationOperator op = build_sn(n);
    std::vector<Factor> obs = observables(op);
    std::size_t nobs = obs.size();
    std::map<Factor, int> bit_of;
    for (std::size_t i = 0; i < nobs; ++i) bit_of[obs[i]] = int(i);

    std::vector<std::uint64_t> masks;
    for (const auto& t : op.terms) {
        std::uint64_t m = 0;
        for (const auto& f : t.factors) m |= 1ull << bit_of.at(f);
        masks.push_back(m);
    }

    auto check_one = [&](std::uint64_t x) {
        std::int64_t value = 0;
        int prod_shift = 1, prod_aligned = 1;
        for (std::size_t t = 0; t < masks.size(); ++t) {
            int sgn = (std::popcount(x & masks[t]) & 1) ? -1 : 1;
            value += static_cast<std::int64_t>(op.terms[t].coeff) * sgn;
            if (t < static_cast<std::size_t>(n))
                prod_shift *= sgn;
            else
                prod_aligned *= sgn;
        }
        return (value % 2 == 0) && (prod_shift == prod_aligned);
    };

    if (nobs <= 20) {
        for (std::uint64_t x = 0; x < (1ull << nobs); ++x)
            if (!check_one(x)) return false;
        return true;
    }
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < 4096; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        if (!check_one(state & ((1ull << nobs) - 1))) return false;
    }
    return true;
}

}  // namespace qgap
