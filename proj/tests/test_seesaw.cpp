#include <catch2/catch_amalgamated.hpp>

#include "qgap/operators.hpp"
#include "qgap/seesaw.hpp"
#include "qgap/sequential.hpp"

using namespace qgap;

TEST_CASE("two-party chained optimum with qubits", "[seesaw]") {
    SeesawReport rep = seesaw(build_sn(2), 2, 8, 1);
    CHECK(rep.value == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-4));
    CHECK(rep.converged);
    CHECK(rep.restarts_used == 8);
    CHECK(rep.model.local_dims == std::vector<std::size_t>{2, 2});
    CHECK(rep.value == evaluate(build_sn(2), rep.model));
}

TEST_CASE("three-party chained optimum with qubits", "[seesaw]") {
    SeesawReport rep = seesaw(build_sn(3), 2, 8, 1);
    CHECK(rep.value == Catch::Approx(3.0 * std::sqrt(3.0)).margin(1e-3));
}

TEST_CASE("five-party four-body value stays in the quantum window", "[seesaw]") {
    SeesawReport rep = seesaw(build_t(2), 2, 24, 1);
    CHECK(rep.value >= 3.32);
    CHECK(rep.value <= 3.342);
}

TEST_CASE("winning trajectory never decreases", "[seesaw]") {
    SeesawReport rep = seesaw(build_sn(3), 2, 4, 5);
    REQUIRE(rep.sweep_values.size() >= 2);
    for (std::size_t k = 1; k < rep.sweep_values.size(); ++k)
        CHECK(rep.sweep_values[k] >= rep.sweep_values[k - 1] - 1e-10);
    CHECK(rep.sweep_values.back() == Catch::Approx(rep.value).margin(1e-9));
}

TEST_CASE("identical seeds give identical reports", "[seesaw]") {
    SeesawReport a = seesaw(build_sn(2), 2, 4, 9);
    SeesawReport b = seesaw(build_sn(2), 2, 4, 9);
    CHECK(a.value == b.value);
    CHECK(a.iterations == b.iterations);
    CHECK(a.sweep_values == b.sweep_values);
    CHECK(quantum_model_hash(a.model) == quantum_model_hash(b.model));
}

TEST_CASE("argument validation", "[seesaw]") {
    CHECK_THROWS_AS(seesaw(build_sn(2), 1, 4, 1), DomainError);
    CHECK_THROWS_AS(seesaw(build_sn(2), 2, 0, 1), DomainError);
    Config cfg;
    cfg.kron_dim_cap = 8;
    CHECK_THROWS_AS(
        seesaw(build_sn(2), 3, 2, 1, Config::defaults().seesaw_improve_tol, cfg),
        ResourceError);
}

TEST_CASE("model document round-trip preserves the value", "[seesaw]") {
    SeesawReport rep = seesaw(build_sn(2), 2, 4, 2);
    std::string text = serialize_model(rep.model);
    QuantumModel back = parse_model(text);
    CHECK(serialize_model(back) == text);
    CHECK(evaluate(build_sn(2), back) == Catch::Approx(rep.value).margin(1e-12));
    CHECK_THROWS_AS(parse_model("{]"), ParseError);
    CHECK_THROWS_AS(parse_model(R"({"local_dims":[2]})"), ParseError);
}

TEST_CASE("model validation catches mismatched shapes", "[seesaw]") {
    SeesawReport rep = seesaw(build_sn(2), 2, 2, 3);
    QuantumModel bad = rep.model;
    bad.state.pop_back();
    CHECK_THROWS_AS(validate_model(build_sn(2), bad), DimensionError);
    QuantumModel missing = rep.model;
    missing.observables.erase(Factor{1, 1});
    CHECK_THROWS_AS(validate_model(build_sn(2), missing), ContractError);
    QuantumModel skew = rep.model;
    skew.observables.at(Factor{1, 1})(0, 1) += cx{0.5, 0.5};
    CHECK_THROWS_AS(validate_model(build_sn(2), skew), ContractError);
}
