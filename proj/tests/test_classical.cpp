#include <catch2/catch_amalgamated.hpp>

#include "qgap/classical.hpp"
#include "qgap/operators.hpp"

using namespace qgap;

TEST_CASE("chained family deterministic maxima", "[classical]") {
    CHECK(classical_max(build_sn(2)).value == 2.0);
    CHECK(classical_max(build_sn(3)).value == 4.0);
    CHECK(classical_max(build_sn(4)).value == 6.0);
    CHECK(classical_max(build_sn(5)).value == 8.0);
}

TEST_CASE("cyclic four-body family deterministic maxima", "[classical]") {
    CHECK(classical_max(build_t(2)).value == 3.0);
    CHECK(classical_max(build_t(3)).value == 5.0);
    CHECK(classical_max(build_t(4)).value == 7.0);
}

TEST_CASE("witness reproduces the reported value", "[classical]") {
    for (const CorrelationOperator& op : {build_sn(3), build_sn(4), build_t(2), build_t(3)}) {
        ClassicalResult res = classical_max(op);
        CHECK(res.enumerated > 0);
        CHECK(res.integer_arithmetic);
        CHECK(res.witness.size() == observables(op).size());
        CHECK(evaluate_assignment(op, res.witness) == res.value);
    }
}

TEST_CASE("witness is deterministic across runs", "[classical]") {
    ClassicalResult a = classical_max(build_sn(4));
    ClassicalResult b = classical_max(build_sn(4));
    CHECK(a.value == b.value);
    CHECK(a.witness == b.witness);
}

TEST_CASE("value is invariant under party relabeling", "[classical]") {
    CorrelationOperator op = build_sn(3);
    CorrelationOperator swapped = op;
    swapped.name = "sn-3-swapped";
    for (auto& t : swapped.terms)
        for (auto& f : t.factors)
            f.party = f.party == 1 ? 2 : (f.party == 2 ? 1 : f.party);
    CHECK(classical_max(swapped).value == classical_max(op).value);
}

TEST_CASE("value is invariant under observable sign flips", "[classical]") {
    // negating every setting of one party can be absorbed into the assignment
    CorrelationOperator op = build_t(2);
    CorrelationOperator flipped = op;
    flipped.name = "t-2-flipped";
    for (auto& t : flipped.terms)
        for (const auto& f : t.factors)
            if (f.party == 1) t.coeff = -t.coeff;
    CHECK(classical_max(flipped).value == classical_max(op).value);
}

TEST_CASE("fractional coefficients fall back to floating arithmetic", "[classical]") {
    CorrelationOperator op = build_sn(2);
    for (auto& t : op.terms) t.coeff *= 0.5;
    ClassicalResult res = classical_max(op);
    CHECK_FALSE(res.integer_arithmetic);
    CHECK(res.value == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("single-term operators have obvious maxima", "[classical]") {
    CorrelationOperator op;
    op.name = "toy";
    op.parties = 2;
    op.settings = {1, 1};
    op.terms = {Term{-1.5, {Factor{1, 1}, Factor{2, 1}}}};
    ClassicalResult res = classical_max(op);
    CHECK(res.value == 1.5);
    CHECK(evaluate_assignment(op, res.witness) == 1.5);
}

TEST_CASE("enumeration refuses to exceed the configured budget", "[classical]") {
    Config cfg;
    cfg.enumeration_budget = 4;
    CHECK_THROWS_AS(classical_max(build_sn(3), cfg), ResourceError);
}

TEST_CASE("parity argument matches enumeration on small chained operators", "[classical]") {
    for (int n : {2, 3, 4, 5}) CHECK(parity_check_sn(n));
}
