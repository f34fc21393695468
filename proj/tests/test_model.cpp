#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "qgap/graph.hpp"
#include "qgap/operators.hpp"

using namespace qgap;

namespace {

std::set<std::pair<double, std::vector<std::pair<int, int>>>> term_set(
    const CorrelationOperator& op) {
    std::set<std::pair<double, std::vector<std::pair<int, int>>>> s;
    for (const auto& t : op.terms) {
        std::vector<std::pair<int, int>> fs;
        for (const auto& f : t.factors) fs.push_back({f.party, f.setting});
        std::sort(fs.begin(), fs.end());
        s.insert({t.coeff, fs});
    }
    return s;
}

}  // namespace

TEST_CASE("cyclic shift wraps in both directions", "[model]") {
    CHECK(cyc(1, 0, 4) == 1);
    CHECK(cyc(1, 3, 4) == 4);
    CHECK(cyc(4, 1, 4) == 1);
    CHECK(cyc(1, -1, 4) == 4);
    CHECK(cyc(2, 8, 4) == 2);
}

TEST_CASE("chained family structure", "[model]") {
    for (int n : {2, 3, 4, 5}) {
        CorrelationOperator op = build_sn(n);
        CHECK(op.parties == n);
        CHECK(op.settings == std::vector<int>(std::size_t(n), n));
        REQUIRE(op.terms.size() == std::size_t(2 * n));
        for (const auto& t : op.terms) CHECK(t.factors.size() == std::size_t(n));
        int negs = 0;
        for (const auto& t : op.terms) negs += t.coeff < 0 ? 1 : 0;
        CHECK(negs == 1);
        CHECK(op.terms.back().coeff == -1.0);
        CHECK(algebraic_max(op) == 2.0 * n);
        CHECK(observables(op).size() == std::size_t(n) * std::size_t(n));
        CHECK(integral_coefficients(op));
    }
    CHECK_THROWS_AS(build_sn(1), ContractError);
}

TEST_CASE("n = 2 chained operator is the CHSH combination", "[model]") {
    auto got = term_set(build_sn(2));
    std::set<std::pair<double, std::vector<std::pair<int, int>>>> want = {
        {1.0, {{1, 1}, {2, 2}}},
        {1.0, {{1, 2}, {2, 1}}},
        {1.0, {{1, 1}, {2, 1}}},
        {-1.0, {{1, 2}, {2, 2}}},
    };
    CHECK(got == want);
}

TEST_CASE("shifted block settings advance cyclically per party", "[model]") {
    CorrelationOperator op = build_sn(4);
    for (int i = 0; i < 4; ++i) {
        const Term& t = op.terms[std::size_t(i)];
        for (const auto& f : t.factors)
            CHECK(f.setting == cyc(i + 1, f.party - 1, 4));
    }
    for (int i = 0; i < 4; ++i) {
        const Term& t = op.terms[std::size_t(4 + i)];
        for (const auto& f : t.factors) CHECK(f.setting == i + 1);
    }
}

TEST_CASE("cyclic four-body family structure", "[model]") {
    for (int n : {2, 3, 4}) {
        CorrelationOperator op = build_t(n);
        int m = 2 * n + 1;
        CHECK(op.parties == m);
        CHECK(op.settings == std::vector<int>(std::size_t(m), 2));
        REQUIRE(op.terms.size() == std::size_t(m));
        for (const auto& t : op.terms) {
            CHECK(t.coeff == -1.0);
            CHECK(t.factors.size() == 4);
        }
        CHECK(algebraic_max(op) == double(m));
        CHECK(observables(op).size() == std::size_t(2 * m));
    }
    CHECK_THROWS_AS(build_t(1), ContractError);
}

TEST_CASE("four-body term i touches the cyclic party window", "[model]") {
    CorrelationOperator op = build_t(2);
    for (int i = 1; i <= 5; ++i) {
        const Term& t = op.terms[std::size_t(i - 1)];
        std::set<std::pair<int, int>> got;
        for (const auto& f : t.factors) got.insert({f.party, f.setting});
        std::set<std::pair<int, int>> want = {{cyc(i, -1, 5), 2},
                                              {i, 1},
                                              {cyc(i, 1, 5), 1},
                                              {cyc(i, 2, 5), 2}};
        CHECK(got == want);
    }
}

TEST_CASE("operator document round-trip", "[model]") {
    for (const CorrelationOperator& op : {build_sn(3), build_t(2)}) {
        CorrelationOperator back = parse_operator(serialize_operator(op));
        CHECK(back.name == op.name);
        CHECK(back.parties == op.parties);
        CHECK(back.settings == op.settings);
        REQUIRE(back.terms.size() == op.terms.size());
        CHECK(term_set(back) == term_set(op));
        CHECK(serialize_operator(back) == serialize_operator(op));
    }
}

TEST_CASE("operator document rejects malformed input", "[model]") {
    CHECK_THROWS_AS(parse_operator("not json"), ParseError);
    CHECK_THROWS_AS(parse_operator("{}"), ParseError);
    CHECK_THROWS_AS(
        parse_operator(R"({"parties":1,"settings":[1],"terms":[{"coeff":1,"factors":[3]}]})"),
        ParseError);
    // out-of-range party
    CHECK_THROWS_AS(
        parse_operator(
            R"({"parties":1,"settings":[1],"terms":[{"coeff":1,"factors":[[2,1]]}]})"),
        ParseError);
    // repeated party inside a term
    CHECK_THROWS_AS(
        parse_operator(
            R"({"parties":2,"settings":[2,2],"terms":[{"coeff":1,"factors":[[1,1],[1,2]]}]})"),
        ParseError);
}

TEST_CASE("validate_operator enforces shape invariants", "[model]") {
    CorrelationOperator op;
    op.parties = 2;
    op.settings = {2};
    CHECK_THROWS_AS(validate_operator(op), ContractError);
    op.settings = {2, 0};
    CHECK_THROWS_AS(validate_operator(op), ContractError);
    op.settings = {2, 2};
    CHECK_NOTHROW(validate_operator(op));
}

TEST_CASE("deterministic assignment evaluation", "[model]") {
    CorrelationOperator op = build_sn(2);
    std::map<Factor, int> all_plus;
    for (const Factor& f : observables(op)) all_plus[f] = 1;
    CHECK(evaluate_assignment(op, all_plus) == 2.0);
    std::map<Factor, int> partial = {{Factor{1, 1}, 1}};
    CHECK_THROWS_AS(evaluate_assignment(op, partial), ContractError);
}

TEST_CASE("compatibility graph of the five-party four-body operator", "[model]") {
    CompatibilityGraph g = compatibility_graph(build_t(2));
    CHECK(g.vertices.size() == 10);
    CHECK(g.edges.size() == 30);
    REQUIRE(g.cliques.size() == 5);
    for (const auto& c : g.cliques) CHECK(c.size() == 4);
    // every observable occurs in exactly two terms
    std::vector<int> degree_in_cliques(10, 0);
    for (const auto& c : g.cliques)
        for (int v : c) ++degree_in_cliques[std::size_t(v)];
    for (int d : degree_in_cliques) CHECK(d == 2);
    // edges are exactly the within-clique pairs
    std::set<std::pair<int, int>> from_cliques;
    for (const auto& c : g.cliques)
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a + 1; b < c.size(); ++b)
                from_cliques.insert({c[a], c[b]});
    CHECK(std::set<std::pair<int, int>>(g.edges.begin(), g.edges.end()) == from_cliques);
}

TEST_CASE("graph document round-trip", "[model]") {
    CompatibilityGraph g = compatibility_graph(build_t(2));
    CompatibilityGraph back = parse_graph(serialize_graph(g));
    CHECK(back.vertices == g.vertices);
    CHECK(back.edges == g.edges);
    CHECK(back.cliques == g.cliques);
    CHECK(serialize_graph(back) == serialize_graph(g));
}

TEST_CASE("graph parser tolerates omitted sections and rejects bad input", "[model]") {
    CompatibilityGraph g = parse_graph("vertices 3\nedges 1\n0 1\n");
    CHECK(g.vertices.size() == 3);
    CHECK(g.edges.size() == 1);
    CHECK(g.cliques.empty());
    CHECK_THROWS_AS(parse_graph(""), ParseError);
    CHECK_THROWS_AS(parse_graph("vertices 2\nedges 1\n0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("vertices 2\nedges 1\n0 5\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("vertices x\nedges 0\n"), ParseError);
}
