#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgap/errors.hpp"

namespace qgap {

// One +/-1 observable slot: party p measuring setting s (both 1-based).
struct Factor {
    int party = 0;
    int setting = 0;
    friend bool operator==(const Factor&, const Factor&) = default;
    friend auto operator<=>(const Factor&, const Factor&) = default;
};

struct Term {
    double coeff = 0.0;
    std::vector<Factor> factors;  // distinct parties; product taken in this order
};

// A linear combination of correlation terms over +/-1 observables.
struct CorrelationOperator {
    std::string name;           // label used in reports ("sn:3", file stem, ...)
    int parties = 0;
    std::vector<int> settings;  // settings per party, settings.size() == parties
    std::vector<Term> terms;
};

inline void validate_operator(const CorrelationOperator& op) {
    if (op.parties < 1) throw ContractError("operator: parties must be >= 1");
    if (static_cast<int>(op.settings.size()) != op.parties)
        throw ContractError("operator: settings list length " +
                            std::to_string(op.settings.size()) + " != parties " +
                            std::to_string(op.parties));
    for (int s : op.settings)
        if (s < 1) throw ContractError("operator: every party needs >= 1 setting");
    for (std::size_t t = 0; t < op.terms.size(); ++t) {
        std::set<int> seen;
        for (std::size_t f = 0; f < op.terms[t].factors.size(); ++f) {
            const Factor& fac = op.terms[t].factors[f];
            std::string where = "terms[" + std::to_string(t) + "].factors[" + std::to_string(f) + "]";
            if (fac.party < 1 || fac.party > op.parties)
                throw ContractError("operator: " + where + " party " +
                                    std::to_string(fac.party) + " out of range");
            if (fac.setting < 1 || fac.setting > op.settings[fac.party - 1])
                throw ContractError("operator: " + where + " setting " +
                                    std::to_string(fac.setting) + " out of range");
            if (!seen.insert(fac.party).second)
                throw ContractError("operator: " + where + " repeats party " +
                                    std::to_string(fac.party));
        }
    }
}

inline double algebraic_max(const CorrelationOperator& op) {
    double s = 0.0;
    for (const auto& t : op.terms) s += std::fabs(t.coeff);
    return s;
}

// Sorted list of the observables that actually occur in some term.
inline std::vector<Factor> observables(const CorrelationOperator& op) {
    std::set<Factor> s;
    for (const auto& t : op.terms)
        for (const auto& f : t.factors) s.insert(f);
    return {s.begin(), s.end()};
}

inline bool integral_coefficients(const CorrelationOperator& op) {
    for (const auto& t : op.terms)
        if (t.coeff != std::nearbyint(t.coeff)) return false;
    return true;
}

// Value of the operator under a deterministic +/-1 assignment.
inline double evaluate_assignment(const CorrelationOperator& op,
                                  const std::map<Factor, int>& assign) {
    double total = 0.0;
    for (const auto& t : op.terms) {
        double prod = t.coeff;
        for (const auto& f : t.factors) {
            auto it = assign.find(f);
            if (it == assign.end())
                throw ContractError("evaluate_assignment: no value for party " +
                                    std::to_string(f.party) + " setting " +
                                    std::to_string(f.setting));
            prod *= it->second;
        }
        total += prod;
    }
    return total;
}

// 1-based cyclic shift: wraps i+k into {1..n}.
inline int cyc(int i, int k, int n) { return ((i - 1 + k) % n + n) % n + 1; }

// Chained n-party family: n parties with n settings each, 2n terms.
// The first n terms shift each party's setting by its index; the next n-1
// align all parties on a common setting; the last aligned term enters with
// coefficient -1. n = 2 is CHSH up to relabeling.
inline CorrelationOperator build_sn(int n) {
    if (n < 2) throw ContractError("build_sn: n must be >= 2");
    CorrelationOperator op;
    op.name = "sn:" + std::to_string(n);
    op.parties = n;
    op.settings.assign(n, n);
    for (int i = 1; i <= n; ++i) {
        Term t;
        t.coeff = 1.0;
        for (int p = 1; p <= n; ++p) t.factors.push_back({p, cyc(i, p - 1, n)});
        op.terms.push_back(std::move(t));
    }
    for (int i = 1; i <= n; ++i) {
        Term t;
        t.coeff = (i == n) ? -1.0 : 1.0;
        for (int p = 1; p <= n; ++p) t.factors.push_back({p, i});
        op.terms.push_back(std::move(t));
    }
    return op;
}

// Cyclic 4-body family on 2n+1 parties with 2 settings each: 2n+1 terms,
// all with coefficient -1, term i touching parties i-1, i, i+1, i+2.
inline CorrelationOperator build_t(int n) {
    if (n < 2) throw ContractError("build_t: n must be >= 2");
    int m = 2 * n + 1;
    CorrelationOperator op;
    op.name = "t:" + std::to_string(n);
    op.parties = m;
    op.settings.assign(m, 2);
    for (int i = 1; i <= m; ++i) {
        Term t;
        t.coeff = -1.0;
        t.factors.push_back({cyc(i, -1, m), 2});
        t.factors.push_back({i, 1});
        t.factors.push_back({cyc(i, 1, m), 1});
        t.factors.push_back({cyc(i, 2, m), 2});
        std::sort(t.factors.begin(), t.factors.end());
        op.terms.push_back(std::move(t));
    }
    return op;
}

// ---- structured-text (JSON) operator documents ---- //

inline nlohmann::json operator_to_json(const CorrelationOperator& op) {
    nlohmann::json j;
    if (!op.name.empty()) j["name"] = op.name;
    j["parties"] = op.parties;
    j["settings"] = op.settings;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : op.terms) {
        nlohmann::json jt;
        jt["coeff"] = t.coeff;
        jt["factors"] = nlohmann::json::array();
        for (const auto& f : t.factors)
            jt["factors"].push_back({f.party, f.setting});
        j["terms"].push_back(std::move(jt));
    }
    return j;
}

inline std::string serialize_operator(const CorrelationOperator& op) {
    return operator_to_json(op).dump(2) + "\n";
}

inline CorrelationOperator operator_from_json(const nlohmann::json& j) {
    CorrelationOperator op;
    try {
        if (j.contains("name")) op.name = j.at("name").get<std::string>();
        op.parties = j.at("parties").get<int>();
        op.settings = j.at("settings").get<std::vector<int>>();
        const auto& terms = j.at("terms");
        for (std::size_t t = 0; t < terms.size(); ++t) {
            Term term;
            term.coeff = terms[t].at("coeff").get<double>();
            const auto& facs = terms[t].at("factors");
            for (std::size_t f = 0; f < facs.size(); ++f) {
                if (!facs[f].is_array() || facs[f].size() != 2)
                    throw ParseError("operator document: terms[" + std::to_string(t) +
                                     "].factors[" + std::to_string(f) +
                                     "] must be a [party, setting] pair");
                term.factors.push_back(
                    {facs[f][0].get<int>(), facs[f][1].get<int>()});
            }
            op.terms.push_back(std::move(term));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("operator document: ") + e.what());
    }
    try {
        validate_operator(op);
    } catch (const ContractError& e) {
        throw ParseError(e.what());
    }
    return op;
}

inline CorrelationOperator parse_operator(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("operator document: ") + e.what());
    }
    return operator_from_json(j);
}

}  // namespace qgap
