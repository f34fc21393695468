#include <catch2/catch_amalgamated.hpp>

#include "qgap/classical.hpp"
#include "qgap/npa.hpp"
#include "qgap/operators.hpp"
#include "qgap/sequential.hpp"
#include "qgap/theta.hpp"

using namespace qgap;

TEST_CASE("chained sequential models reach twice the party count", "[sequential]") {
    for (int n : {3, 4, 5}) {
        CorrelationOperator op = build_sn(n);
        SequentialModel m = build_sn_sequential(n);
        SequentialCheck chk = check_sequential_value(op, m);
        CHECK(chk.commutation_ok);
        CHECK(chk.commutation_max <= 1e-10);
        CHECK(chk.value == Catch::Approx(2.0 * n).margin(1e-12));
        REQUIRE(chk.per_term.size() == std::size_t(2 * n));
        double sum = 0.0;
        for (std::size_t t = 0; t < chk.per_term.size(); ++t) {
            CHECK(std::fabs(chk.per_term[t]) == Catch::Approx(1.0).margin(1e-12));
            sum += op.terms[t].coeff * chk.per_term[t];
        }
        CHECK(sum == Catch::Approx(chk.value).margin(1e-12));
    }
}

TEST_CASE("two-party sequential model matches the tensor optimum", "[sequential]") {
    SequentialModel m = build_sn_sequential(2);
    SequentialCheck chk = check_sequential_value(build_sn(2), m);
    CHECK(chk.commutation_ok);
    CHECK(chk.value == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("chained sequential value ignores the state from three parties on",
          "[sequential]") {
    for (int n : {3, 4}) {
        CorrelationOperator op = build_sn(n);
        SequentialModel m = build_sn_sequential(n);
        double base = check_sequential_value(op, m).value;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            SequentialModel probe = m;
            probe.state = random_state(m.dim, seed);
            CHECK(check_sequential_value(op, probe).value ==
                  Catch::Approx(base).margin(1e-10));
        }
    }
}

TEST_CASE("two-party sequential value does depend on the state", "[sequential]") {
    CorrelationOperator op = build_sn(2);
    SequentialModel m = build_sn_sequential(2);
    double base = check_sequential_value(op, m).value;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SequentialModel probe = m;
        probe.state = random_state(m.dim, seed);
        worst = std::max(worst,
                         std::fabs(check_sequential_value(op, probe).value - base));
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("four-body sequential value equals the handle sum identity", "[sequential]") {
    for (int n : {2, 3}) {
        CorrelationOperator op = build_t(n);
        OrthonormalRepresentation rep = theta_representation(compatibility_graph(op));
        SequentialModel m = build_t_sequential(n, rep);
        SequentialCheck chk = check_sequential_value(op, m);
        CHECK(chk.commutation_ok);
        double mlen = 2.0 * n + 1.0;
        CHECK(chk.value == Catch::Approx(4.0 * rep.achieved_sum - mlen).margin(1e-8));
        CHECK(chk.value == Catch::Approx(mlen).margin(1e-2));
    }
}

TEST_CASE("certificates pass for the builtin constructions", "[sequential]") {
    for (int n : {2, 3, 4, 5}) {
        Certificate c = certify_sn_sequential(n);
        CHECK(c.pass);
        CHECK(c.fixture == build_sn(n).name);
        CHECK(c.model_hash.rfind("fnv1a:", 0) == 0);
        CHECK(c.target == (n == 2 ? 2.0 * std::sqrt(2.0) : 2.0 * n));
    }
    for (int n : {2, 3, 4}) {
        Certificate c = certify_t_sequential(n);
        CHECK(c.pass);
        CHECK(c.target == 2.0 * n + 1.0);
    }
}

TEST_CASE("certificates are reproducible", "[sequential]") {
    Certificate a = certify_sn_sequential(3);
    Certificate b = certify_sn_sequential(3);
    CHECK(a.model_hash == b.model_hash);
    CHECK(a.value == b.value);
    Certificate ta = certify_t_sequential(2);
    Certificate tb = certify_t_sequential(2);
    CHECK(ta.model_hash == tb.model_hash);
}

TEST_CASE("explicit tensor fixtures hit their targets", "[sequential]") {
    CHECK(verify_s3_tensor() == Catch::Approx(3.0 * std::sqrt(3.0)).margin(1e-9));
    CHECK(verify_t5_tensor() == Catch::Approx(3.340).margin(2e-3));
    CHECK(certify_s3_tensor().pass);
    CHECK(certify_t5_tensor().pass);
    CHECK(certify_chsh().pass);
}

TEST_CASE("rotated qubit observables square to the identity", "[sequential]") {
    for (double t : {0.0, 0.25, 0.3, 0.5, 2.0 / 3.0}) {
        CMatrix f = f_theta(t);
        CHECK(hermiticity_defect(f) < 1e-12);
        CMatrix sq = f * f;
        sq(0, 0) -= cx{1.0, 0.0};
        sq(1, 1) -= cx{1.0, 0.0};
        CHECK(max_abs(sq) < 1e-12);
    }
}

TEST_CASE("tampering is detected", "[sequential]") {
    CorrelationOperator op = build_sn(3);
    SequentialModel m = build_sn_sequential(3);
    CHECK(check_sequential_value(op, m).commutation_ok);
    inject_noncommuting(op, m);
    SequentialCheck chk = check_sequential_value(op, m);
    CHECK_FALSE(chk.commutation_ok);
    CHECK(chk.commutation_max > 1e-3);
}

TEST_CASE("sequential model validation catches broken observables", "[sequential]") {
    CorrelationOperator op = build_sn(3);
    SequentialModel m = build_sn_sequential(3);
    SequentialModel shrunk = m;
    shrunk.state.pop_back();
    CHECK_THROWS_AS(validate_sequential_model(op, shrunk), DimensionError);
    SequentialModel skew = m;
    skew.observables.at(Factor{1, 1})(0, 1) += cx{0.3, 0.1};
    CHECK_THROWS_AS(validate_sequential_model(op, skew), ContractError);
    SequentialModel scaled = m;
    for (auto& v : scaled.observables.at(Factor{1, 1}).a) v *= 0.5;
    CHECK_THROWS_AS(validate_sequential_model(op, scaled), ContractError);
}

TEST_CASE("certified gaps separate the two quantum values", "[sequential]") {
    double seq3 = certify_sn_sequential(3).value;
    NpaResult tensor3 = npa_upper_bound(build_sn(3), 2);
    CHECK(seq3 - (tensor3.value + tensor3.error_bar) >= 0.8 - 2e-3);

    double seqt = certify_t_sequential(2).value;
    double tensor_t = verify_t5_tensor();
    CHECK(seqt - tensor_t >= 1.66 - 4e-3);
}
