#ifndef HJBQVI_SPARSE_HPP
#define HJBQVI_SPARSE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hjbqvi {

/// One (row, col, value) entry of a sparse matrix.
struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

/**
 * Compressed-sparse-row matrix.
 *
 * Invariants: column indices are sorted and unique within each row,
 * row offsets are monotone. Duplicate triplets are summed on construction.
 */
class SparseMatrix {
  public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_index_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }

    void multiply(std::span<const double> x, std::span<double> y) const;

    /// max_i sum_j |a_ij|
    double inf_norm() const;

    /// Lower and upper bandwidth (kl, ku).
    std::pair<std::size_t, std::size_t> band_limits() const;

    /// Strict row diagonal dominance margin: min_i (a_ii - sum_{j!=i} |a_ij|).
    double dominance_margin() const;

    /// True if all off-diagonal entries are <= 0 and diagonals are > 0.
    bool is_z_matrix() const;

    /// Symmetric permutation B = P A P^T with B(new_i, new_j) = A(perm[new_i], perm[new_j]).
    SparseMatrix permute_symmetric(std::span<const std::uint32_t> perm_new_to_old) const;

    /// ASCII triplet export: one "row col value" line per entry, '%.17g' values.
    void write_triplets(std::ostream& os) const;

    std::vector<Triplet> to_triplets() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> col_index_;
    std::vector<double> values_;
};

}  // namespace hjbqvi

#endif  // HJBQVI_SPARSE_HPP
