#pragma once

#include <cstdint>

namespace qgap {

// Every numeric tolerance and budget used across the toolkit, in one record.
// Call sites take a const reference and default to `defaults()` so tests can
// tighten or loosen individual knobs without touching code.
struct Config {
    // linalg
    double hermiticity_tol = 1e-10;   // max |M[i][j] - conj(M[j][i])| accepted as Hermitian
    double eig_offdiag_tol = 1e-13;   // Jacobi sweep stop, relative to Frobenius norm
    double sign_zero_band = 1e-10;    // eigenvalues within this of 0 count as +1
    double lanczos_tol = 1e-11;       // top eigenpair residual, relative to matrix scale
    std::uint64_t kron_dim_cap = 1ull << 20;  // refuse Kronecker products beyond this

    // classical enumeration
    std::uint64_t enumeration_budget = 1ull << 34;

    // sdp
    double sdp_tol = 1e-6;
    int sdp_max_iters = 200000;
    int sdp_stable_iters = 10;        // consecutive iterations under tol before stopping
    double sdp_relaxation = 1.8;      // Douglas-Rachford over-relaxation factor

    // seesaw
    int seesaw_max_sweeps = 500;
    double seesaw_improve_tol = 1e-12;
    double seesaw_monotone_slack = 1e-10;

    // theta / representations
    double rep_truncate_tol = 1e-9;   // eigenvalue cutoff when factorizing the optimum
    double rep_zero_vector_tol = 1e-9;
    int rep_polish_sweeps = 64;       // symmetric re-orthogonalization passes

    // verify
    double commutator_tol = 1e-10;

    static const Config& defaults() {
        static const Config c{};
        return c;
    }
};

}  // namespace qgap
