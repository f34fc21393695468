#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qgap/eig.hpp"
#include "qgap/matrix.hpp"

using namespace qgap;

namespace {

CMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto u = [&]() { return (double(gen() >> 11) + 0.5) * 0x1p-53 - 0.5; };
    CMatrix m(r, c);
    for (auto& v : m.a) v = cx{u(), u()};
    return m;
}

CMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    CMatrix m = random_matrix(n, n, seed);
    return hermitize(m);
}

}  // namespace

TEST_CASE("kron satisfies the mixed product identity", "[linalg]") {
    CMatrix a = random_matrix(3, 4, 11), c = random_matrix(4, 2, 12);
    CMatrix b = random_matrix(2, 5, 13), d = random_matrix(5, 3, 14);
    CMatrix lhs = kron(a, b) * kron(c, d);
    CMatrix rhs = kron(a * c, b * d);
    REQUIRE(lhs.rows == rhs.rows);
    REQUIRE(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("kron dimensions multiply and the cap trips", "[linalg]") {
    CMatrix a = random_matrix(3, 2, 1), b = random_matrix(5, 7, 2);
    CMatrix k = kron(a, b);
    REQUIRE(k.rows == 15);
    REQUIRE(k.cols == 14);
    Config cfg = Config::defaults();
    cfg.kron_dim_cap = 8;
    REQUIRE_THROWS_AS(kron(a, b, cfg), DimensionError);
}

TEST_CASE("pauli algebra", "[linalg]") {
    CMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
    REQUIRE(max_abs(x * y - cx{0.0, 1.0} * z) < 1e-15);
    REQUIRE(max_abs(x * x - CMatrix::identity(2)) < 1e-15);
    REQUIRE(max_abs(y * y - CMatrix::identity(2)) < 1e-15);
    REQUIRE(max_abs(z * z - CMatrix::identity(2)) < 1e-15);
}

TEST_CASE("herm_eig matches the 2x2 closed form", "[linalg]") {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -2.0;
    m(0, 1) = cx{0.6, -0.8};
    m(1, 0) = cx{0.6, 0.8};
    EigResult e = herm_eig(m);
    REQUIRE(e.values[0] == Catch::Approx(-2.3027756377319946).epsilon(1e-12));
    REQUIRE(e.values[1] == Catch::Approx(1.3027756377319946).epsilon(1e-12));
}

TEST_CASE("herm_eig reconstructs and is orthonormal", "[linalg]") {
    const std::size_t n = 24;
    CMatrix m = random_hermitian(n, 21);
    EigResult e = herm_eig(m);
    CMatrix recon(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += e.values[k] * e.vectors(i, k) * std::conj(e.vectors(j, k));
            recon(i, j) = s;
        }
    REQUIRE(max_abs(recon - m) < 1e-9 * (1.0 + fro_norm(m)));
    CMatrix gram = dagger(e.vectors) * e.vectors;
    REQUIRE(max_abs(gram - CMatrix::identity(n)) < 1e-9);
    for (std::size_t k = 1; k < n; ++k) REQUIRE(e.values[k - 1] <= e.values[k]);
}

TEST_CASE("herm_eig rejects non-hermitian input", "[linalg]") {
    CMatrix m = random_matrix(4, 4, 3);
    REQUIRE_THROWS_AS(herm_eig(m), ContractError);
}

TEST_CASE("sym_eig agrees with herm_eig on real symmetric input", "[linalg]") {
    const std::size_t n = 16;
    CMatrix h = random_hermitian(n, 31);
    std::vector<double> a(n * n);
    CMatrix hr(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.5 * (h(i, j).real() + h(j, i).real());
            a[i * n + j] = v;
            hr(i, j) = v;
        }
    SymEigResult se = sym_eig(a, n);
    EigResult he = herm_eig(hr);
    for (std::size_t k = 0; k < n; ++k)
        REQUIRE(se.values[k] == Catch::Approx(he.values[k]).margin(1e-9));
    for (std::size_t k = 0; k < n; ++k) {
        double dot = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += se.vectors[i * n + k] * a[i * n + k];
            nrm += se.vectors[i * n + k] * se.vectors[i * n + k];
        }
        (void)dot;
        REQUIRE(nrm == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("sign_operator maps zero modes to plus one", "[linalg]") {
    CMatrix m(3, 3);
    m(0, 0) = 0.3;
    m(1, 1) = -0.2;
    m(2, 2) = 0.0;
    CMatrix s = sign_operator(m);
    REQUIRE(s(0, 0).real() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s(1, 1).real() == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(s(2, 2).real() == Catch::Approx(1.0).margin(1e-12));
    CMatrix sq = s * s;
    REQUIRE(max_abs(sq - CMatrix::identity(3)) < 1e-12);
}

TEST_CASE("sign_operator commutes with its input", "[linalg]") {
    CMatrix m = random_hermitian(10, 41);
    CMatrix s = sign_operator(m);
    REQUIRE(max_abs(s * m - m * s) < 1e-9);
    REQUIRE(max_abs(s * s - CMatrix::identity(10)) < 1e-9);
}

TEST_CASE("partial_trace preserves trace and splits products", "[linalg]") {
    CMatrix ra = random_hermitian(3, 51);
    CMatrix rb = random_hermitian(4, 52);
    CMatrix rho = kron(ra, rb);
    CMatrix keep_a = partial_trace(rho, {3, 4}, {0});
    cx tr_b = 0.0;
    for (std::size_t i = 0; i < 4; ++i) tr_b += rb(i, i);
    REQUIRE(max_abs(keep_a - tr_b * ra) < 1e-12);
    cx tr_all = 0.0, tr_red = 0.0;
    for (std::size_t i = 0; i < 12; ++i) tr_all += rho(i, i);
    for (std::size_t i = 0; i < 3; ++i) tr_red += keep_a(i, i);
    REQUIRE(std::abs(tr_all - tr_red) < 1e-10);
}

TEST_CASE("partial_trace keeps a middle site", "[linalg]") {
    CMatrix r1 = random_hermitian(2, 61), r2 = random_hermitian(3, 62), r3 = random_hermitian(2, 63);
    CMatrix rho = kron(kron(r1, r2), r3);
    CMatrix keep_mid = partial_trace(rho, {2, 3, 2}, {1});
    cx t1 = 0.0, t3 = 0.0;
    for (std::size_t i = 0; i < 2; ++i) t1 += r1(i, i);
    for (std::size_t i = 0; i < 2; ++i) t3 += r3(i, i);
    REQUIRE(max_abs(keep_mid - (t1 * t3) * r2) < 1e-12);
}

TEST_CASE("top_eigenpair matches dense on a large operator", "[linalg]") {
    const std::size_t n = 80;
    CMatrix m = random_hermitian(n, 71);
    EigResult dense = herm_eig(m);
    StateVector start(n, cx{0.0, 0.0});
    start[0] = 1.0;
    TopEig top = top_eigenpair(m, start);
    double want = dense.values[n - 1];
    REQUIRE(top.value == Catch::Approx(want).margin(1e-9 * (1.0 + std::fabs(want))));
    StateVector mv = matvec(m, top.vector);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(mv[i] - top.value * top.vector[i]));
    REQUIRE(res < 1e-8 * (1.0 + fro_norm(m)));
}

TEST_CASE("matvec inner normalize expectation basics", "[linalg]") {
    CMatrix m = random_hermitian(6, 81);
    StateVector v(6);
    for (std::size_t i = 0; i < 6; ++i) v[i] = cx{double(i + 1), -0.5 * double(i)};
    normalize(v);
    REQUIRE(vec_norm(v) == Catch::Approx(1.0).margin(1e-13));
    double e = expectation(m, v);
    cx direct = inner(v, matvec(m, v));
    REQUIRE(e == Catch::Approx(direct.real()).margin(1e-12));
    REQUIRE(std::abs(direct.imag()) < 1e-12);
}

TEST_CASE("hermitize and defect", "[linalg]") {
    CMatrix m = random_matrix(5, 5, 91);
    CMatrix h = hermitize(m);
    REQUIRE(hermiticity_defect(h) < 1e-15);
    REQUIRE(hermiticity_defect(m) > 0.01);
}
