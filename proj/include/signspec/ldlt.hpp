#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

#include "signspec/assembly.hpp"

namespace signspec {

struct ZeroPivotError : std::runtime_error {
    int pivot_index;
    explicit ZeroPivotError(int idx)
        : std::runtime_error("singular pivot chain at index " + std::to_string(idx)),
          pivot_index(idx) {}
};

struct Inertia {
    int neg = 0, zero = 0, pos = 0;
};

// Reverse Cuthill-McKee on the symmetric pattern; order[k] = old index of
// the k-th permuted row.
std::vector<int> reverse_cuthill_mckee(const SparseSym& a);

// Profile (skyline) LDL^T of a symmetric indefinite matrix, with 1x1 pivots
// and adjacent 2x2 pivots when a diagonal entry collapses. Pivot order is
// fixed by the RCM permutation, so the factorization is deterministic.
class IndefiniteFactorization {
  public:
    // A = K - shift*M (M may be empty for a plain matrix factorization).
    IndefiniteFactorization(const SparseSym& K, const SparseSym& M, double shift);
    explicit IndefiniteFactorization(const SparseSym& K) : IndefiniteFactorization(K, {}, 0.0) {}

    Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& b) const;
    const Inertia& inertia() const { return inertia_; }
    int dimension() const { return n_; }
    double shift() const { return shift_; }

    // Max-norm reconstruction error of P(K - shift M)P^T = L D L^T on the
    // stored pattern entries, relative to the largest entry.
    double reconstruction_error(const SparseSym& K, const SparseSym& M) const;

  private:
    void factorize(const std::vector<double>& diag_a);

    int n_ = 0;
    double shift_ = 0;
    std::vector<int> order_, rank_;        // new->old, old->new
    std::vector<long> row_start_;          // offsets into packed row storage
    std::vector<int> first_col_;           // profile start per permuted row
    std::vector<double> lo_, y_;           // strictly-lower L and Y = L*D rows
    std::vector<double> d_, e_;            // block diagonal: diag and coupling to next
    std::vector<int> block_start_;         // self, or first column of the 2x2 pair
    Inertia inertia_;
};

inline IndefiniteFactorization factorize(const SparseSym& K, const SparseSym& M, double shift) {
    return IndefiniteFactorization(K, M, shift);
}

// Number of pencil eigenvalues strictly below sigma (Sylvester slicing).
int count_below(const AssembledPencil& pencil, double sigma);

}  // namespace signspec
