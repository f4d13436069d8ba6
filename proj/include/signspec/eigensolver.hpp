#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "signspec/assembly.hpp"
#include "signspec/ldlt.hpp"

namespace signspec {

struct LanczosConfig {
    int n_positive = 6;          // smallest positive eigenvalues wanted
    int n_negative = 6;          // negative eigenvalues closest to zero wanted
    int max_subspace = 0;        // 0: chosen automatically from the request
    double tol = 1e-10;          // relative residual target per eigenpair
    std::uint64_t seed = 0x5157ab1eu;
    int max_restarts = 8;
};

struct EigenPair {
    double value = 0;
    double residual = 0;  // ||K v - lambda M v||_{M^{-1}} / |lambda|, v M-normalized
    Eigen::VectorXd vector;
};

struct EigenResult {
    std::vector<EigenPair> positive;  // ascending, nearest zero first
    std::vector<EigenPair> negative;  // descending in value, nearest zero first
    double shift_used = 0;
    int iterations = 0;
};

// Smallest-in-modulus eigenvalues of K v = lambda M v (M SPD, K indefinite)
// via shift-invert Lanczos in the M-inner product with full
// reorthogonalization. Deterministic for a fixed seed. If the shift hits an
// eigenvalue the solver retries on a small shift ladder.
EigenResult solve_smallest_modulus(const AssembledPencil& pencil, const LanczosConfig& cfg = {});

// A posteriori certificate: the distance from lambda to the spectrum of the
// discrete pencil is at most the returned bound (an M^{-1}-weighted residual).
double residual_distance_bound(const AssembledPencil& pencil, double lambda,
                               const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace signspec
