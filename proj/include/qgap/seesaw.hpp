#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qgap/config.hpp"
#include "qgap/eig.hpp"
#include "qgap/errors.hpp"
#include "qgap/matrix.hpp"
#include "qgap/operators.hpp"
#include "qgap/parallel.hpp"

#include "json.hpp"

namespace qgap {

// Tensor-product model: one local space per party, observables acting on
// their party's factor, a shared global state.
struct QuantumModel {
    std::vector<std::size_t> local_dims;
    StateVector state;
    std::map<Factor, CMatrix> observables;
};

inline std::size_t model_dim(const QuantumModel& m) {
    std::size_t d = 1;
    for (std::size_t ld : m.local_dims) d *= ld;
    return d;
}

namespace detail {

inline std::size_t site_stride(const std::vector<std::size_t>& dims, std::size_t p) {
    std::size_t s = 1;
    for (std::size_t q = p + 1; q < dims.size(); ++q) s *= dims[q];
    return s;
}

// out = (M acting on site p) in, leftmost party slowest.
inline void apply_site(const CMatrix& m, std::size_t p, const std::vector<std::size_t>& dims,
                       const StateVector& in, StateVector& out) {
    std::size_t d = dims[p];
    std::size_t stride = site_stride(dims, p);
    std::size_t block = d * stride;
    std::size_t nblocks = in.size() / block;
    out.assign(in.size(), cx{0.0, 0.0});
    for (std::size_t ob = 0; ob < nblocks; ++ob) {
        std::size_t base = ob * block;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                cx w = m(a, b);
                if (w == cx{0.0, 0.0}) continue;
                const cx* src = &in[base + b * stride];
                cx* dst = &out[base + a * stride];
                for (std::size_t k = 0; k < stride; ++k) dst[k] += w * src[k];
            }
    }
}

// rho[a, b] = sum over other sites of phi[(a, env)] * conj(psi[(b, env)]).
inline CMatrix site_density(const StateVector& phi, const StateVector& psi,
                            const std::vector<std::size_t>& dims, std::size_t p) {
    std::size_t d = dims[p];
    std::size_t stride = site_stride(dims, p);
    std::size_t block = d * stride;
    std::size_t nblocks = phi.size() / block;
    CMatrix rho(d, d);
    for (std::size_t ob = 0; ob < nblocks; ++ob) {
        std::size_t base = ob * block;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                cx s{0.0, 0.0};
                const cx* u = &phi[base + a * stride];
                const cx* v = &psi[base + b * stride];
                for (std::size_t k = 0; k < stride; ++k) s += u[k] * std::conj(v[k]);
                rho(a, b) += s;
            }
    }
    return rho;
}

// Deterministic gaussian source; the distribution adapters in <random> are
// not pinned by the standard, Box-Muller over raw bits is.
struct Gauss {
    std::mt19937_64 gen;
    explicit Gauss(std::uint64_t seed) : gen(seed) {}
    double uniform() {
        return (double(gen() >> 11) + 0.5) * 0x1p-53;
    }
    double operator()() {
        double u = uniform(), v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    }
};

}  // namespace detail

inline void validate_model(const CorrelationOperator& op, const QuantumModel& m,
                           const Config& cfg = Config::defaults()) {
    if (m.local_dims.size() != std::size_t(op.parties))
        throw DimensionError("model: local_dims size does not match party count");
    std::size_t dim = model_dim(m);
    if (m.state.size() != dim)
        throw DimensionError("model: state length does not match product dimension");
    for (const Factor& f : observables(op)) {
        auto it = m.observables.find(f);
        if (it == m.observables.end())
            throw ContractError("model: missing observable for party " +
                                std::to_string(f.party) + " setting " +
                                std::to_string(f.setting));
        const CMatrix& o = it->second;
        std::size_t d = m.local_dims[std::size_t(f.party) - 1];
        if (o.rows != d || o.cols != d)
            throw DimensionError("model: observable dimension mismatch at party " +
                                 std::to_string(f.party));
        if (hermiticity_defect(o) > cfg.hermiticity_tol * (1.0 + max_abs(o)))
            throw ContractError("model: observable not Hermitian at party " +
                                std::to_string(f.party));
    }
}

// Sum of embedded term products, identity on absent parties.
inline CMatrix bell_operator(const CorrelationOperator& op, const QuantumModel& m,
                             const Config& cfg = Config::defaults()) {
    validate_model(op, m, cfg);
    std::size_t dim = model_dim(m);
    if (dim > cfg.kron_dim_cap) throw ResourceError("bell_operator: dimension too large");
    CMatrix b(dim, dim);
    for (const auto& term : op.terms) {
        std::vector<Factor> fs = term.factors;
        std::sort(fs.begin(), fs.end(),
                  [](const Factor& a, const Factor& b2) { return a.party < b2.party; });
        CMatrix acc = CMatrix::identity(1);
        std::size_t next = 1;
        for (const auto& f : fs) {
            for (std::size_t p = next; p < std::size_t(f.party); ++p)
                acc = kron(acc, CMatrix::identity(m.local_dims[p - 1]), cfg);
            acc = kron(acc, m.observables.at(f), cfg);
            next = std::size_t(f.party) + 1;
        }
        for (std::size_t p = next; p <= std::size_t(op.parties); ++p)
            acc = kron(acc, CMatrix::identity(m.local_dims[p - 1]), cfg);
        for (std::size_t k = 0; k < b.a.size(); ++k) b.a[k] += term.coeff * acc.a[k];
    }
    return b;
}

// out = (bell operator) in, without materializing the dense operator.
inline void apply_bell(const CorrelationOperator& op, const QuantumModel& m,
                       const StateVector& in, StateVector& out) {
    out.assign(in.size(), cx{0.0, 0.0});
    StateVector cur, tmp;
    for (const auto& term : op.terms) {
        cur = in;
        for (const auto& f : term.factors) {
            detail::apply_site(m.observables.at(f), std::size_t(f.party) - 1, m.local_dims,
                               cur, tmp);
            std::swap(cur, tmp);
        }
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += term.coeff * cur[k];
    }
}

inline double evaluate(const CorrelationOperator& op, const QuantumModel& m,
                       const Config& cfg = Config::defaults()) {
    validate_model(op, m, cfg);
    StateVector bpsi;
    apply_bell(op, m, m.state, bpsi);
    return inner(m.state, bpsi).real();
}

struct SeesawReport {
    double value = 0.0;
    QuantumModel model;
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    std::vector<double> sweep_values;  // winning restart trajectory
};

namespace detail {

// Environment operator: the Hermitian local G with d<value>/dO(p,s) = G, so
// the objective contribution of O(p,s) is Tr(O G).
inline CMatrix environment(const CorrelationOperator& op, const QuantumModel& m,
                           const Factor& f) {
    std::size_t p = std::size_t(f.party) - 1;
    std::size_t d = m.local_dims[p];
    CMatrix g(d, d);
    StateVector cur, tmp;
    for (const auto& term : op.terms) {
        bool has = false;
        for (const auto& tf : term.factors) has = has || tf == f;
        if (!has) continue;
        cur = m.state;
        for (const auto& tf : term.factors) {
            if (tf == f) continue;
            apply_site(m.observables.at(tf), std::size_t(tf.party) - 1, m.local_dims, cur,
                       tmp);
            std::swap(cur, tmp);
        }
        CMatrix rho = site_density(cur, m.state, m.local_dims, p);
        for (std::size_t k = 0; k < g.a.size(); ++k) g.a[k] += term.coeff * rho.a[k];
    }
    // Real-valuedness of Tr(O G) over Hermitian O forces G Hermitian; enforce
    // exactly against rounding.
    return hermitize(g);
}

// Deterministic choice among degenerate top eigenvectors: phase-fix each so
// its first nonzero amplitude is real positive, then take the column that is
// lexicographically largest by (real, imag) pairs.
inline StateVector top_vector_dense(const CMatrix& b, const Config& cfg) {
    EigResult e = herm_eig(b, cfg);
    std::size_t n = b.rows;
    double top = e.values.back();
    double band = 1e-9 * (1.0 + std::fabs(top));
    StateVector best;
    for (std::size_t k = n; k-- > 0;) {
        if (top - e.values[k] > band) break;
        StateVector v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
        cx lead{0.0, 0.0};
        for (const cx& a : v)
            if (std::abs(a) > 1e-12) {
                lead = a;
                break;
            }
        if (lead != cx{0.0, 0.0}) {
            cx phase = std::conj(lead) / std::abs(lead);
            for (cx& a : v) a *= phase;
        }
        if (best.empty()) {
            best = v;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double dr = v[i].real() - best[i].real();
            double di = v[i].imag() - best[i].imag();
            if (std::fabs(dr) > 1e-12) {
                if (dr > 0) best = v;
                break;
            }
            if (std::fabs(di) > 1e-12) {
                if (di > 0) best = v;
                break;
            }
        }
    }
    normalize(best);
    return best;
}

struct RestartOutcome {
    double value = -1e300;
    QuantumModel model;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> trajectory;
};

inline RestartOutcome seesaw_once(const CorrelationOperator& op, std::size_t local_dim,
                                  std::uint64_t seed, double tol, const Config& cfg) {
    std::size_t parties = std::size_t(op.parties);
    QuantumModel m;
    m.local_dims.assign(parties, local_dim);
    std::size_t dim = model_dim(m);
    if (dim > cfg.kron_dim_cap) throw ResourceError("seesaw: product dimension too large");

    Gauss rng(seed);
    for (const Factor& f : observables(op)) {
        CMatrix h(local_dim, local_dim);
        for (std::size_t i = 0; i < local_dim; ++i)
            for (std::size_t j = 0; j < local_dim; ++j) h(i, j) = cx{rng(), rng()};
        m.observables.emplace(f, sign_operator(hermitize(h), cfg));
    }

    m.state.assign(dim, cx{0.0, 0.0});
    m.state[0] = cx{1.0, 0.0};
    bool dense_state = dim <= 64;
    auto apply = [&](const StateVector& in, StateVector& out) { apply_bell(op, m, in, out); };
    if (dense_state) {
        m.state = top_vector_dense(bell_operator(op, m, cfg), cfg);
    } else {
        StateVector start(dim);
        for (std::size_t k = 0; k < dim; ++k) start[k] = cx{rng(), rng()};
        m.state = top_eigenpair(dim, apply, std::move(start), cfg).vector;
    }

    RestartOutcome out;
    double value = evaluate(op, m, cfg);
    out.trajectory.push_back(value);
    std::vector<Factor> obs = observables(op);
    for (int sweep = 0; sweep < cfg.seesaw_max_sweeps; ++sweep) {
        for (const Factor& f : obs) {
            CMatrix g = environment(op, m, f);
            if (max_abs(g) < 1e-14) continue;  // unconstrained, keep previous
            m.observables.at(f) = sign_operator(g, cfg);
        }
        if (dense_state) {
            m.state = top_vector_dense(bell_operator(op, m, cfg), cfg);
        } else {
            StateVector start = m.state;
            m.state = top_eigenpair(dim, apply, std::move(start), cfg).vector;
        }
        double next = evaluate(op, m, cfg);
        out.trajectory.push_back(next);
        double gain = next - value;
        value = next;
        ++out.sweeps;
        if (gain < tol) {
            out.converged = true;
            break;
        }
    }
    out.value = value;
    out.model = std::move(m);
    return out;
}

}  // namespace detail

inline SeesawReport seesaw(const CorrelationOperator& op, std::size_t local_dim,
                           int restarts, std::uint64_t seed,
                           double tol = Config::defaults().seesaw_improve_tol,
                           const Config& cfg = Config::defaults()) {
    validate_operator(op);
    if (local_dim < 2) throw DomainError("seesaw: local_dim must be at least 2");
    if (restarts < 1) throw DomainError("seesaw: restarts must be at least 1");

    std::vector<detail::RestartOutcome> outs(static_cast<std::size_t>(restarts));
    parallel_for(std::size_t(restarts), [&](std::size_t r) {
        outs[r] = detail::seesaw_once(op, local_dim, seed + r, tol, cfg);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < outs.size(); ++r)
        if (outs[r].value > outs[best].value) best = r;

    SeesawReport rep;
    rep.value = evaluate(op, outs[best].model, cfg);
    rep.model = std::move(outs[best].model);
    rep.iterations = outs[best].sweeps;
    rep.restarts_used = restarts;
    rep.converged = outs[best].converged;
    rep.sweep_values = std::move(outs[best].trajectory);
    return rep;
}

// ---- model serialization ---- //

inline nlohmann::json model_to_json(const QuantumModel& m) {
    nlohmann::json j;
    j["local_dims"] = m.local_dims;
    nlohmann::json st = nlohmann::json::array();
    for (const cx& a : m.state) st.push_back({a.real(), a.imag()});
    j["state"] = std::move(st);
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& [f, o] : m.observables) {
        nlohmann::json entries = nlohmann::json::array();
        for (const cx& a : o.a) entries.push_back({a.real(), a.imag()});
        obs.push_back({{"party", f.party},
                       {"setting", f.setting},
                       {"rows", o.rows},
                       {"entries", std::move(entries)}});
    }
    j["observables"] = std::move(obs);
    return j;
}

inline std::string serialize_model(const QuantumModel& m) { return model_to_json(m).dump(2) + "\n"; }

inline QuantumModel model_from_json(const nlohmann::json& j) {
    try {
        QuantumModel m;
        m.local_dims = j.at("local_dims").get<std::vector<std::size_t>>();
        for (const auto& a : j.at("state"))
            m.state.push_back(cx{a.at(0).get<double>(), a.at(1).get<double>()});
        for (const auto& o : j.at("observables")) {
            std::size_t rows = o.at("rows").get<std::size_t>();
            CMatrix mat(rows, rows);
            const auto& entries = o.at("entries");
            if (entries.size() != rows * rows)
                throw ParseError("model: observable entry count mismatch");
            for (std::size_t k = 0; k < mat.a.size(); ++k)
                mat.a[k] = cx{entries[k].at(0).get<double>(), entries[k].at(1).get<double>()};
            m.observables.emplace(
                Factor{o.at("party").get<int>(), o.at("setting").get<int>()}, std::move(mat));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model document: ") + e.what());
    }
}

inline QuantumModel parse_model(const std::string& text) {
    try {
        return model_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model document: ") + e.what());
    }
}

}  // namespace qgap
