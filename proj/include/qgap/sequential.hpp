#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgap/classical.hpp"
#include "qgap/config.hpp"
#include "qgap/errors.hpp"
#include "qgap/graph.hpp"
#include "qgap/matrix.hpp"
#include "qgap/operators.hpp"
#include "qgap/seesaw.hpp"
#include "qgap/theta.hpp"

#include "json.hpp"

namespace qgap {

// Single shared space, one observable per (party, setting); measurements in
// one term commute instead of acting on separate factors.
struct SequentialModel {
    std::size_t dim = 0;
    StateVector state;
    std::map<Factor, CMatrix> observables;
};

inline void validate_sequential_model(const CorrelationOperator& op,
                                      const SequentialModel& m,
                                      const Config& cfg = Config::defaults()) {
    if (m.state.size() != m.dim)
        throw DimensionError("sequential model: state length does not match dim");
    for (const Factor& f : observables(op)) {
        auto it = m.observables.find(f);
        if (it == m.observables.end())
            throw ContractError("sequential model: missing observable for party " +
                                std::to_string(f.party) + " setting " +
                                std::to_string(f.setting));
        const CMatrix& o = it->second;
        if (o.rows != m.dim || o.cols != m.dim)
            throw DimensionError("sequential model: observable dimension mismatch");
        if (hermiticity_defect(o) > 1e-9 * (1.0 + max_abs(o)))
            throw ContractError("sequential model: observable not Hermitian");
        CMatrix sq = o * o;
        for (std::size_t k = 0; k < m.dim; ++k) sq(k, k) -= cx{1.0, 0.0};
        if (max_abs(sq) > 1e-9)
            throw ContractError("sequential model: observable does not square to identity");
    }
    (void)cfg;
}

struct SequentialCheck {
    double value = 0.0;
    std::vector<double> per_term;
    bool commutation_ok = true;
    double commutation_max = 0.0;
};

inline SequentialCheck check_sequential_value(const CorrelationOperator& op,
                                              const SequentialModel& m,
                                              const Config& cfg = Config::defaults()) {
    validate_sequential_model(op, m, cfg);
    SequentialCheck out;
    for (const auto& term : op.terms) {
        std::vector<const CMatrix*> ops;
        for (const auto& f : term.factors) ops.push_back(&m.observables.at(f));
        for (std::size_t a = 0; a < ops.size(); ++a)
            for (std::size_t b = a + 1; b < ops.size(); ++b) {
                CMatrix comm = *ops[a] * *ops[b] - *ops[b] * *ops[a];
                out.commutation_max = std::max(out.commutation_max, max_abs(comm));
            }
        StateVector cur = m.state, tmp;
        for (std::size_t a = ops.size(); a-- > 0;) {
            tmp = matvec(*ops[a], cur);
            std::swap(cur, tmp);
        }
        double ev = inner(m.state, cur).real();
        out.per_term.push_back(ev);
        out.value += term.coeff * ev;
    }
    out.commutation_ok = out.commutation_max <= cfg.commutator_tol;
    return out;
}

namespace detail {

inline CMatrix pauli_i2() { return CMatrix::identity(2); }

// Signed two-qubit Pauli products used by the square construction.
inline CMatrix two_qubit(const CMatrix& a, const CMatrix& b, double sign = 1.0,
                         const Config& cfg = Config::defaults()) {
    CMatrix m = kron(a, b, cfg);
    for (auto& v : m.a) v *= sign;
    return m;
}

struct RowTriple {
    CMatrix single1, single2, product;
};

inline RowTriple sn_row_pattern(int k, int n) {
    CMatrix I = pauli_i2(), X = pauli_x(), Y = pauli_y(), Z = pauli_z();
    if (k == 1) return {two_qubit(Z, I), two_qubit(I, X), two_qubit(Z, X)};
    if (k == 2) return {two_qubit(I, Z), two_qubit(X, I), two_qubit(X, Z)};
    if (k == n) return {two_qubit(Z, Z), two_qubit(X, X), two_qubit(Y, Y)};
    if (n % 2 == 0 && k == 3) {
        CMatrix id4 = CMatrix::identity(4);
        return {id4, id4, id4};
    }
    return {two_qubit(Z, Z), two_qubit(X, X), two_qubit(Y, Y, -1.0)};
}

inline bool verify_term(const Term& term, const std::map<Factor, CMatrix>& obs,
                        double* comm_max = nullptr) {
    std::vector<const CMatrix*> ops;
    for (const auto& f : term.factors) ops.push_back(&obs.at(f));
    double cm = 0.0;
    for (std::size_t a = 0; a < ops.size(); ++a)
        for (std::size_t b = a + 1; b < ops.size(); ++b)
            cm = std::max(cm, max_abs(*ops[a] * *ops[b] - *ops[b] * *ops[a]));
    if (comm_max) *comm_max = std::max(*comm_max, cm);
    if (cm > 1e-12) return false;
    CMatrix prod = CMatrix::identity(ops.front()->rows);
    for (const CMatrix* o : ops) prod = prod * *o;
    double sign = term.coeff >= 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < prod.rows; ++k) prod(k, k) -= cx{sign, 0.0};
    return max_abs(prod) <= 1e-12;
}

inline std::vector<CMatrix> signed_pauli_pairs() {
    std::vector<CMatrix> out;
    std::array<CMatrix, 4> basis{pauli_i2(), pauli_x(), pauli_y(), pauli_z()};
    for (const CMatrix& a : basis)
        for (const CMatrix& b : basis)
            for (double s : {1.0, -1.0}) out.push_back(two_qubit(a, b, s));
    return out;
}

}  // namespace detail

// Square-style construction on two qubits: row k holds non-identity
// observables at parties k, k+1 and k-1 (cyclic); the generated rows are
// machine-verified term by term, and any row failing verification is
// re-searched over signed two-qubit Pauli patterns rather than trusted.
inline SequentialModel build_sn_sequential(int n, const Config& cfg = Config::defaults()) {
    if (n < 2) throw DomainError("sn sequential construction requires n >= 2");
    CorrelationOperator op = build_sn(n);
    if (n == 2) {
        // No gap at n = 2: the optimal commuting model is the two-qubit
        // tensor strategy with rotated second-party observables.
        SequentialModel m2;
        m2.dim = 4;
        m2.state.assign(4, cx{0.0, 0.0});
        m2.state[0] = cx{M_SQRT1_2, 0.0};
        m2.state[3] = cx{M_SQRT1_2, 0.0};
        CMatrix i2 = detail::pauli_i2();
        CMatrix plus = cx{M_SQRT1_2, 0.0} * (pauli_z() + pauli_x());
        CMatrix minus = cx{M_SQRT1_2, 0.0} * (pauli_z() - pauli_x());
        m2.observables.emplace(Factor{1, 1}, kron(pauli_z(), i2));
        m2.observables.emplace(Factor{1, 2}, kron(pauli_x(), i2));
        m2.observables.emplace(Factor{2, 1}, kron(i2, plus));
        m2.observables.emplace(Factor{2, 2}, kron(i2, minus));
        validate_sequential_model(op, m2, cfg);
        return m2;
    }
    SequentialModel m;
    m.dim = 4;
    m.state.assign(4, cx{0.0, 0.0});
    m.state[0] = cx{1.0, 0.0};

    auto at = [&](int party, int setting) {
        return Factor{((party - 1) % n + n) % n + 1, setting};
    };
    for (int p = 1; p <= n; ++p)
        for (int s = 1; s <= n; ++s) m.observables.emplace(Factor{p, s}, CMatrix::identity(4));
    for (int k = 1; k <= n; ++k) {
        detail::RowTriple row = detail::sn_row_pattern(k, n);
        m.observables.at(at(k, k)) = row.single1;
        m.observables.at(at(k + 1, k)) = row.single2;
        m.observables.at(at(k - 1, k)) = row.product;
    }

    auto all_pass = [&]() {
        for (const auto& term : op.terms)
            if (!detail::verify_term(term, m.observables)) return false;
        return true;
    };
    if (!all_pass()) {
        std::vector<CMatrix> pool = detail::signed_pauli_pairs();
        for (int k = 1; k <= n; ++k) {
            bool row_ok = true;
            for (const auto& term : op.terms) {
                bool uses = false;
                for (const auto& f : term.factors)
                    uses = uses || f == at(k, k) || f == at(k + 1, k) || f == at(k - 1, k);
                if (uses && !detail::verify_term(term, m.observables)) row_ok = false;
            }
            if (row_ok) continue;
            CMatrix keep1 = m.observables.at(at(k, k));
            CMatrix keep2 = m.observables.at(at(k + 1, k));
            CMatrix keep3 = m.observables.at(at(k - 1, k));
            bool found = false;
            for (const CMatrix& c1 : pool) {
                for (const CMatrix& c2 : pool) {
                    for (const CMatrix& c3 : pool) {
                        m.observables.at(at(k, k)) = c1;
                        m.observables.at(at(k + 1, k)) = c2;
                        m.observables.at(at(k - 1, k)) = c3;
                        if (all_pass()) {
                            found = true;
                            break;
                        }
                    }
                    if (found) break;
                }
                if (found) break;
            }
            if (!found) {
                m.observables.at(at(k, k)) = keep1;
                m.observables.at(at(k + 1, k)) = keep2;
                m.observables.at(at(k - 1, k)) = keep3;
                throw ContractError("sn sequential construction: row " + std::to_string(k) +
                                    " admits no signed two-qubit Pauli completion");
            }
        }
        if (!all_pass())
            throw ContractError("sn sequential construction: verification failed after search");
    }
    validate_sequential_model(op, m, cfg);
    return m;
}

// Observables 1 - 2|v><v| over the orthonormal representation, state = the
// handle vector.
inline SequentialModel build_t_sequential(int n, const OrthonormalRepresentation& rep,
                                          const Config& cfg = Config::defaults()) {
    if (n < 2) throw DomainError("t sequential construction requires n >= 2");
    CorrelationOperator op = build_t(n);
    CompatibilityGraph g = compatibility_graph(op);
    if (rep.vectors.size() != g.vertices.size())
        throw ContractError("t sequential construction: representation does not match graph");
    if (rep.achieved_sum < n + 0.5 - 1e-3)
        throw ContractError("t sequential construction: representation sum below target");

    SequentialModel m;
    m.dim = rep.dim;
    m.state.resize(rep.dim);
    for (std::size_t k = 0; k < rep.dim; ++k) m.state[k] = cx{rep.handle[k], 0.0};
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        CMatrix o = CMatrix::identity(rep.dim);
        for (std::size_t r = 0; r < rep.dim; ++r)
            for (std::size_t c = 0; c < rep.dim; ++c)
                o(r, c) -= cx{2.0 * rep.vectors[i][r] * rep.vectors[i][c], 0.0};
        m.observables.emplace(g.vertices[i], std::move(o));
    }
    validate_sequential_model(op, m, cfg);
    return m;
}

// ---- explicit tensor models ---- //

// cos(t pi) sigma_x + sin(t pi) sigma_z
inline CMatrix f_theta(double t) {
    CMatrix m(2, 2);
    double c = std::cos(t * M_PI), s = std::sin(t * M_PI);
    m(0, 0) = cx{s, 0.0};
    m(0, 1) = cx{c, 0.0};
    m(1, 0) = cx{c, 0.0};
    m(1, 1) = cx{-s, 0.0};
    return m;
}

inline QuantumModel s3_tensor_model() {
    QuantumModel m;
    m.local_dims = {2, 2, 2};
    double r3 = std::sqrt(3.0);
    std::array<double, 4> pair = {(1.0 + r3) / 4.0, (1.0 - r3) / 4.0, (-1.0 + r3) / 4.0,
                                  (1.0 + r3) / 4.0};
    m.state.assign(8, cx{0.0, 0.0});
    for (std::size_t k = 0; k < 4; ++k) m.state[2 * k] = cx{pair[k], 0.0};
    m.observables.emplace(Factor{1, 1}, f_theta(1.0 / 3.0));
    m.observables.emplace(Factor{1, 2}, f_theta(2.0 / 3.0));
    m.observables.emplace(Factor{1, 3}, f_theta(0.0));
    m.observables.emplace(Factor{2, 1}, f_theta(1.0 / 3.0));
    m.observables.emplace(Factor{2, 2}, f_theta(2.0 / 3.0));
    m.observables.emplace(Factor{2, 3}, f_theta(1.0));
    m.observables.emplace(Factor{3, 1}, f_theta(0.5));
    m.observables.emplace(Factor{3, 2}, f_theta(0.5));
    m.observables.emplace(Factor{3, 3}, f_theta(0.5));
    return m;
}

inline double verify_s3_tensor(const Config& cfg = Config::defaults()) {
    double v = evaluate(build_sn(3), s3_tensor_model(), cfg);
    double target = 3.0 * std::sqrt(3.0);
    if (std::fabs(v - target) > 1e-9)
        throw ContractError("s3 tensor model misses 3*sqrt(3): got " + std::to_string(v));
    return v;
}

inline QuantumModel t5_tensor_model(const Config& cfg = Config::defaults()) {
    QuantumModel m;
    m.local_dims.assign(5, 2);
    CMatrix o1 = pauli_z();
    CMatrix o2 = f_theta(0.25);  // cos(pi/4) sigma_x + sin(pi/4) sigma_z
    for (int p = 1; p <= 5; ++p) {
        m.observables.emplace(Factor{p, 1}, o1);
        m.observables.emplace(Factor{p, 2}, o2);
    }
    m.state.assign(32, cx{0.0, 0.0});
    m.state[0] = cx{1.0, 0.0};
    CMatrix b = bell_operator(build_t(2), m, cfg);
    EigResult e = herm_eig(b, cfg);
    for (std::size_t k = 0; k < 32; ++k) m.state[k] = e.vectors(k, 31);
    normalize(m.state);
    return m;
}

inline double verify_t5_tensor(const Config& cfg = Config::defaults()) {
    QuantumModel m = t5_tensor_model(cfg);
    double v = evaluate(build_t(2), m, cfg);
    if (std::fabs(v - 3.340) > 2e-3)
        throw ContractError("t5 tensor model misses 3.340: got " + std::to_string(v));
    return v;
}

// ---- shared helpers ---- //

inline StateVector random_state(std::size_t dim, std::uint64_t seed) {
    detail::Gauss rng(seed);
    StateVector v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = cx{rng(), rng()};
    normalize(v);
    return v;
}

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string sequential_model_hash(const SequentialModel& m) {
    std::ostringstream out;
    out.precision(17);
    out << m.dim << ";";
    for (const cx& a : m.state) out << a.real() << "," << a.imag() << ";";
    for (const auto& [f, o] : m.observables) {
        out << f.party << ":" << f.setting << "|";
        for (const cx& a : o.a) out << a.real() << "," << a.imag() << ",";
    }
    std::ostringstream hex;
    hex << std::hex << fnv1a(out.str());
    return "fnv1a:" + hex.str();
}

struct Certificate {
    std::string fixture;
    std::string model_hash;
    double value = 0.0;
    double target = 0.0;
    double commutation_max = 0.0;
    bool pass = false;
};

inline nlohmann::json certificate_to_json(const Certificate& c) {
    return {{"fixture", c.fixture},       {"model_hash", c.model_hash},
            {"value", c.value},           {"target", c.target},
            {"commutation_max", c.commutation_max}, {"pass", c.pass}};
}

inline Certificate certify_sn_sequential(int n, const Config& cfg = Config::defaults()) {
    CorrelationOperator op = build_sn(n);
    SequentialModel m = build_sn_sequential(n, cfg);
    SequentialCheck chk = check_sequential_value(op, m, cfg);
    Certificate cert;
    cert.fixture = op.name;
    cert.model_hash = sequential_model_hash(m);
    cert.value = chk.value;
    cert.target = n == 2 ? 2.0 * std::sqrt(2.0) : 2.0 * n;
    cert.commutation_max = chk.commutation_max;
    cert.pass = chk.commutation_ok && std::fabs(chk.value - cert.target) <= 1e-10;
    return cert;
}

inline Certificate certify_t_sequential(int n, const Config& cfg = Config::defaults()) {
    CorrelationOperator op = build_t(n);
    OrthonormalRepresentation rep =
        theta_representation(compatibility_graph(op), cfg.sdp_tol, cfg);
    SequentialModel m = build_t_sequential(n, rep, cfg);
    SequentialCheck chk = check_sequential_value(op, m, cfg);
    Certificate cert;
    cert.fixture = op.name;
    cert.model_hash = sequential_model_hash(m);
    cert.value = chk.value;
    cert.target = 2.0 * n + 1.0;
    cert.commutation_max = chk.commutation_max;
    cert.pass = chk.commutation_ok && std::fabs(chk.value - cert.target) <= 1e-2;
    return cert;
}

// Negative control: overwrite one observable with a Hermitian involution
// that fails to commute with another member of the same term. A checker
// that still reports commutation_ok afterwards is broken.
inline void inject_noncommuting(const CorrelationOperator& op, SequentialModel& m) {
    const std::size_t d = m.dim;
    for (const auto& term : op.terms) {
        if (term.factors.size() < 2) continue;
        const Factor f1 = term.factors[0];
        const Factor f2 = term.factors[1];
        const CMatrix& o2 = m.observables.at(f2);
        for (std::size_t k = 0; k < d; ++k) {
            StateVector u(d);
            for (std::size_t r = 0; r < d; ++r) u[r] = o2(r, k);
            u[k] += cx{1.7, 0.3};
            double nn = 0.0;
            for (const cx& c : u) nn += std::norm(c);
            if (nn < 1e-9) continue;
            CMatrix cand = CMatrix::identity(d);
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    cand(r, c) -= 2.0 / nn * u[r] * std::conj(u[c]);
            CMatrix comm = cand * o2 - o2 * cand;
            if (max_abs(comm) > 1e-3) {
                m.observables.at(f1) = cand;
                return;
            }
        }
    }
    throw ContractError("tamper: no non-commuting replacement found");
}

inline std::string quantum_model_hash(const QuantumModel& m) {
    std::ostringstream hex;
    hex << std::hex << fnv1a(serialize_model(m));
    return "fnv1a:" + hex.str();
}

inline Certificate certify_s3_tensor(const Config& cfg = Config::defaults()) {
    Certificate cert;
    cert.fixture = "s3-tensor";
    cert.model_hash = quantum_model_hash(s3_tensor_model());
    cert.value = verify_s3_tensor(cfg);
    cert.target = 3.0 * std::sqrt(3.0);
    cert.pass = std::fabs(cert.value - cert.target) <= 1e-9;
    return cert;
}

inline Certificate certify_t5_tensor(const Config& cfg = Config::defaults()) {
    Certificate cert;
    cert.fixture = "t5-tensor";
    cert.model_hash = quantum_model_hash(t5_tensor_model(cfg));
    cert.value = verify_t5_tensor(cfg);
    cert.target = 3.340;
    cert.pass = std::fabs(cert.value - cert.target) <= 2e-3;
    return cert;
}

inline Certificate certify_chsh(const Config& cfg = Config::defaults()) {
    CorrelationOperator op = build_sn(2);
    ClassicalResult cl = classical_max(op, cfg);
    SeesawReport sr = seesaw(op, 2, 20, 7, Config::defaults().seesaw_improve_tol, cfg);
    Certificate cert;
    cert.fixture = "chsh";
    cert.model_hash = quantum_model_hash(sr.model);
    cert.value = sr.value;
    cert.target = 2.0 * std::sqrt(2.0);
    cert.pass = cl.value == 2.0 && std::fabs(cert.value - cert.target) <= 1e-4;
    return cert;
}

}  // namespace qgap
