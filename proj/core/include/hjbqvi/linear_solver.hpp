#ifndef HJBQVI_LINEAR_SOLVER_HPP
#define HJBQVI_LINEAR_SOLVER_HPP

#include <memory>
#include <span>
#include <vector>

#include "hjbqvi/sparse.hpp"

namespace hjbqvi {

enum class SolveFailure {
    None,
    Singular,
    NotDiagonallyDominant,
    DimensionMismatch,
};

const char* to_string(SolveFailure f);

struct SolverOptions {
    double solver_tol = 1e-12;  // residual acceptance threshold (backward-error scaled)
    double pivot_tol = 1e-14;   // pivot declared zero below pivot_tol * |A|_inf
    bool require_diagonal_dominance = false;
};

/// Result of a linear solve. Singularity is an outcome, not an exception:
/// the direct control scheme observes it and must keep running.
struct LinearSolveOutcome {
    std::vector<double> solution;  // empty unless failure == None
    SolveFailure failure = SolveFailure::None;
    double residual_norm = 0.0;

    bool ok() const { return failure == SolveFailure::None; }
};

/**
 * Banded LU factorization with partial pivoting (LAPACK gbtrf-style band
 * storage). The systems produced by policy iteration on interleaved grids are
 * near-tridiagonal, so this is the default O(n * bw^2) kernel.
 */
class BandedLU {
  public:
    BandedLU() = default;

    /// Prepare storage for an n x n system with lower/upper bandwidth kl/ku.
    void reset(std::size_t n, std::size_t kl, std::size_t ku);

    /// Accumulate A(i, j) += v. |i - j| must respect the declared bandwidths.
    void add(std::size_t i, std::size_t j, double v);

    /// Factor in place. Returns false when a pivot falls below
    /// pivot_tol * scale (structural or numerical singularity).
    bool factor(double pivot_tol, double scale);

    /// Back-substitute after a successful factor().
    void solve(std::span<double> b) const;

    std::size_t size() const { return n_; }

  private:
    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::size_t ld_ = 0;             // rows of band storage = 2*kl + ku + 1
    std::vector<double> ab_;         // column-major band storage
    std::vector<std::uint32_t> ipiv_;
    bool factored_ = false;
};

/**
 * Reusable factorization of a general sparse matrix. Chooses the banded
 * kernel when the bandwidth is small and falls back to a general sparse LU
 * for wide (impulse-coupled) systems.
 */
class Factorization {
  public:
    explicit Factorization(const SparseMatrix& a, const SolverOptions& opts = {});

    SolveFailure status() const { return status_; }
    bool ok() const { return status_ == SolveFailure::None; }

    LinearSolveOutcome solve(std::span<const double> b) const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    SolveFailure status_ = SolveFailure::None;
};

/// One-shot solve of A x = b.
LinearSolveOutcome solve(const SparseMatrix& a, std::span<const double> b,
                         const SolverOptions& opts = {});

struct ReorderedSystem {
    SparseMatrix matrix;                     // P A P^T
    std::vector<std::uint32_t> perm;         // new index -> old index
};

/**
 * Permute a regime-major system (unknown (i, l) at i*nodes + l) into
 * node-major ordering (l*regimes + i). Reduces the bandwidth of co-located
 * regime couplings to O(regime_count) so the banded kernel applies.
 */
ReorderedSystem reorder_interleaved(const SparseMatrix& a, std::size_t regime_count,
                                    std::size_t nodes_per_regime);

std::vector<std::uint32_t> interleave_permutation(std::size_t regime_count,
                                                  std::size_t nodes_per_regime);

/// Apply perm (new -> old): y[k] = x[perm[k]].
std::vector<double> apply_permutation(std::span<const double> x,
                                      std::span<const std::uint32_t> perm);

/// Invert y = apply_permutation(x, perm): x[perm[k]] = y[k].
std::vector<double> undo_permutation(std::span<const double> y,
                                     std::span<const std::uint32_t> perm);

}  // namespace hjbqvi

#endif  // HJBQVI_LINEAR_SOLVER_HPP
