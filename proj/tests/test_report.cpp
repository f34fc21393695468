#include <catch2/catch_amalgamated.hpp>

#include "qgap/report.hpp"

using namespace qgap;

namespace {

BoundReport full_report() {
    BoundReport r;
    r.operator_id = "sn-3";
    r.algebraic_max = 6.0;
    r.classical = ClassicalEntry{4.0, true, 64};
    r.seesaw = SeesawEntry{5.196152, 2, 8, 1, 1e-12, true};
    r.npa = NpaEntry{5.196162, 1e-5, 2, 1e-6, "optimal"};
    r.theta = ThetaEntry{2.5, 1e-6};
    r.sequential = SequentialEntry{6.0, 1e-14, "fnv1a:abc"};
    compute_gap_flags(r);
    return r;
}

}  // namespace

TEST_CASE("gap flags compare the right pairs", "[report]") {
    BoundReport r = full_report();
    REQUIRE(r.tensor_vs_sequential.has_value());
    REQUIRE(r.quantum_vs_classical_tensor.has_value());
    CHECK(*r.tensor_vs_sequential);
    CHECK(*r.quantum_vs_classical_tensor);

    BoundReport close = full_report();
    close.sequential->value = close.npa->value + close.npa->error_bar + 1e-4;
    compute_gap_flags(close);
    CHECK_FALSE(*close.tensor_vs_sequential);

    BoundReport sparse;
    sparse.operator_id = "x";
    sparse.classical = ClassicalEntry{2.0, true, 4};
    compute_gap_flags(sparse);
    CHECK_FALSE(sparse.tensor_vs_sequential.has_value());
    CHECK_FALSE(sparse.quantum_vs_classical_tensor.has_value());
}

TEST_CASE("document round-trip preserves every entry", "[report]") {
    BoundReport r = full_report();
    r.incomplete = true;
    r.incomplete_reason = "npa skipped";
    std::string text = serialize_report(r);
    BoundReport back = parse_report(text);
    CHECK(back.operator_id == r.operator_id);
    CHECK(back.algebraic_max == r.algebraic_max);
    REQUIRE(back.classical);
    CHECK(back.classical->value == r.classical->value);
    CHECK(back.classical->budget == r.classical->budget);
    REQUIRE(back.seesaw);
    CHECK(back.seesaw->value == r.seesaw->value);
    CHECK(back.seesaw->seed == r.seesaw->seed);
    CHECK(back.seesaw->converged == r.seesaw->converged);
    REQUIRE(back.npa);
    CHECK(back.npa->value == r.npa->value);
    CHECK(back.npa->error_bar == r.npa->error_bar);
    CHECK(back.npa->level == r.npa->level);
    CHECK(back.npa->status == r.npa->status);
    REQUIRE(back.theta);
    CHECK(back.theta->value == r.theta->value);
    REQUIRE(back.sequential);
    CHECK(back.sequential->model_hash == r.sequential->model_hash);
    CHECK(back.tensor_vs_sequential == r.tensor_vs_sequential);
    CHECK(back.quantum_vs_classical_tensor == r.quantum_vs_classical_tensor);
    CHECK(back.incomplete);
    CHECK(back.incomplete_reason == r.incomplete_reason);
    CHECK(serialize_report(back) == text);
}

TEST_CASE("engine tags are stamped per entry", "[report]") {
    nlohmann::json j = report_to_json(full_report());
    CHECK(j["format"] == "qgap-report-v1");
    CHECK(j["classical"]["engine"] == "enumeration");
    CHECK(j["seesaw"]["engine"] == "seesaw");
    CHECK(j["npa"]["engine"] == "moment-sdp");
    CHECK(j["theta"]["engine"] == "lovasz-sdp");
    CHECK(j["sequential"]["engine"] == "construction");
}

TEST_CASE("validation rejects inconsistent bound chains", "[report]") {
    BoundReport r = full_report();
    CHECK_NOTHROW(validate_report(r));

    BoundReport noid = full_report();
    noid.operator_id.clear();
    CHECK_THROWS_AS(validate_report(noid), ContractError);

    BoundReport c = full_report();
    c.classical->value = c.seesaw->value + 1.0;
    CHECK_THROWS_AS(validate_report(c), ContractError);

    BoundReport s = full_report();
    s.seesaw->value = s.npa->value + s.npa->error_bar + 1.0;
    CHECK_THROWS_AS(validate_report(s), ContractError);

    BoundReport q = full_report();
    q.sequential->value = q.algebraic_max + 1.0;
    CHECK_THROWS_AS(validate_report(q), ContractError);

    BoundReport a = full_report();
    a.classical->value = a.algebraic_max + 1.0;
    a.seesaw.reset();
    CHECK_THROWS_AS(validate_report(a), ContractError);
}

TEST_CASE("parser surfaces breaches and malformed text as errors", "[report]") {
    CHECK_THROWS_AS(parse_report("nonsense"), ParseError);
    CHECK_THROWS_AS(parse_report(R"({"format":"other"})"), ParseError);
    BoundReport bad = full_report();
    bad.classical->value = bad.algebraic_max + 1.0;
    bad.seesaw.reset();
    CHECK_THROWS_AS(parse_report(serialize_report(bad)), ContractError);
}
