#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qgap/errors.hpp"
#include "qgap/operators.hpp"

namespace qgap {

// Compatibility structure of an operator: vertices are the observables that
// occur in some term, an edge joins two observables that share a term, and
// each term contributes one clique. Note the convention: adjacency means
// jointly measurable (same context), which is the complement of the
// orthogonality-graph convention some of the literature uses.
struct CompatibilityGraph {
    std::vector<Factor> vertices;             // sorted by (party, setting)
    std::vector<std::pair<int, int>> edges;   // u < v, sorted
    std::vector<std::vector<int>> cliques;    // one per term, in term order
};

inline CompatibilityGraph compatibility_graph(const CorrelationOperator& op) {
    validate_operator(op);
    CompatibilityGraph g;
    g.vertices = observables(op);
    std::map<Factor, int> id;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        id[g.vertices[i]] = static_cast<int>(i);
    std::set<std::pair<int, int>> es;
    for (const auto& t : op.terms) {
        std::vector<int> clique;
        for (const auto& f : t.factors) clique.push_back(id.at(f));
        std::sort(clique.begin(), clique.end());
        for (std::size_t a = 0; a < clique.size(); ++a)
            for (std::size_t b = a + 1; b < clique.size(); ++b)
                es.insert({clique[a], clique[b]});
        g.cliques.push_back(std::move(clique));
    }
    g.edges.assign(es.begin(), es.end());
    return g;
}

inline std::string serialize_graph(const CompatibilityGraph& g) {
    std::ostringstream out;
    out << "# qgap graph v1\n";
    out << "vertices " << g.vertices.size() << "\n";
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        out << i << " " << g.vertices[i].party << " " << g.vertices[i].setting << "\n";
    out << "edges " << g.edges.size() << "\n";
    for (const auto& [u, v] : g.edges) out << u << " " << v << "\n";
    out << "cliques " << g.cliques.size() << "\n";
    for (const auto& c : g.cliques) {
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << c[i];
        out << "\n";
    }
    return out.str();
}

// Reads the format written above. The cliques section is optional; vertex
// attribute lines may be omitted ("vertices N" alone), in which case party
// and setting default to 0.
inline CompatibilityGraph parse_graph(const std::string& text) {
    CompatibilityGraph g;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_tokens = [&](std::vector<std::string>& toks) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            std::string stripped = line.substr(0, line.find('#'));
            std::istringstream ls(stripped);
            toks.clear();
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (!toks.empty()) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError("graph document line " + std::to_string(lineno) + ": " + msg);
    };
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) fail("bad integer '" + s + "'");
            return v;
        } catch (const std::exception&) {
            fail("bad integer '" + s + "'");
            return 0;
        }
    };

    std::vector<std::string> toks;
    if (!next_tokens(toks) || toks[0] != "vertices" || toks.size() != 2)
        fail("expected 'vertices <count>'");
    int nv = to_int(toks[1]);
    if (nv < 0) fail("negative vertex count");
    g.vertices.assign(nv, Factor{0, 0});
    bool have = next_tokens(toks);
    // Vertex attribute lines: "<id> <party> <setting>" until the edges header.
    while (have && toks[0] != "edges") {
        if (toks.size() != 3) fail("expected '<id> <party> <setting>' or 'edges <count>'");
        int id = to_int(toks[0]);
        if (id < 0 || id >= nv) fail("vertex id out of range");
        g.vertices[id] = Factor{to_int(toks[1]), to_int(toks[2])};
        have = next_tokens(toks);
    }
    if (!have || toks.size() != 2) fail("expected 'edges <count>'");
    int ne = to_int(toks[1]);
    std::set<std::pair<int, int>> es;
    for (int i = 0; i < ne; ++i) {
        if (!next_tokens(toks) || toks.size() != 2) fail("expected edge '<u> <v>'");
        int u = to_int(toks[0]), v = to_int(toks[1]);
        if (u < 0 || u >= nv || v < 0 || v >= nv) fail("edge endpoint out of range");
        if (u == v) fail("self loop");
        es.insert({std::min(u, v), std::max(u, v)});
    }
    g.edges.assign(es.begin(), es.end());
    if (next_tokens(toks)) {
        if (toks[0] != "cliques" || toks.size() != 2) fail("expected 'cliques <count>'");
        int nc = to_int(toks[1]);
        for (int i = 0; i < nc; ++i) {
            if (!next_tokens(toks)) fail("missing clique line");
            std::vector<int> c;
            for (const auto& t : toks) {
                int v = to_int(t);
                if (v < 0 || v >= nv) fail("clique vertex out of range");
                c.push_back(v);
            }
            g.cliques.push_back(std::move(c));
        }
    }
    return g;
}

}  // namespace qgap
