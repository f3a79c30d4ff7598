#include "hjbqvi/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hjbqvi {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw std::out_of_range("sparse triplet outside matrix shape");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.offsets_.assign(rows + 1, 0);
    m.col_index_.reserve(triplets.size());
    m.values_.reserve(triplets.size());

    std::size_t k = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (k < triplets.size() && triplets[k].row == r) {
            // duplicates are summed
            if (m.col_index_.size() > m.offsets_[r] && m.col_index_.back() == triplets[k].col) {
                m.values_.back() += triplets[k].value;
            } else {
                m.col_index_.push_back(triplets[k].col);
                m.values_.push_back(triplets[k].value);
            }
            ++k;
        }
        m.offsets_[r + 1] = m.col_index_.size();
    }
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1.0});
    }
    return from_triplets(n, n, std::move(t));
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    assert(x.size() == cols_ && y.size() == rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            acc += values_[k] * x[col_index_[k]];
        }
        y[r] = acc;
    }
}

double SparseMatrix::inf_norm() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += std::abs(values_[k]);
        best = std::max(best, acc);
    }
    return best;
}

std::pair<std::size_t, std::size_t> SparseMatrix::band_limits() const {
    std::size_t kl = 0, ku = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            if (values_[k] == 0.0) continue;
            const std::size_t c = col_index_[k];
            if (c < r) kl = std::max(kl, r - c);
            if (c > r) ku = std::max(ku, c - r);
        }
    }
    return {kl, ku};
}

double SparseMatrix::dominance_margin() const {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows_; ++r) {
        double diag = 0.0, off = 0.0;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            if (col_index_[k] == r) {
                diag = values_[k];
            } else {
                off += std::abs(values_[k]);
            }
        }
        margin = std::min(margin, diag - off);
    }
    return margin;
}

bool SparseMatrix::is_z_matrix() const {
    for (std::size_t r = 0; r < rows_; ++r) {
        bool has_positive_diag = false;
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            if (col_index_[k] == r) {
                has_positive_diag = values_[k] > 0.0;
            } else if (values_[k] > 0.0) {
                return false;
            }
        }
        if (!has_positive_diag) return false;
    }
    return true;
}

SparseMatrix SparseMatrix::permute_symmetric(std::span<const std::uint32_t> perm_new_to_old) const {
    if (perm_new_to_old.size() != rows_ || rows_ != cols_) {
        throw std::invalid_argument("permutation size mismatch");
    }
    std::vector<std::uint32_t> old_to_new(rows_);
    for (std::size_t k = 0; k < rows_; ++k) old_to_new[perm_new_to_old[k]] = k;

    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            t.push_back({old_to_new[r], old_to_new[col_index_[k]], values_[k]});
        }
    }
    return from_triplets(rows_, cols_, std::move(t));
}

void SparseMatrix::write_triplets(std::ostream& os) const {
    char buf[64];
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%zu %u %.17g\n", r, col_index_[k], values_[k]);
            os << buf;
        }
    }
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            t.push_back({static_cast<std::uint32_t>(r), col_index_[k], values_[k]});
        }
    }
    return t;
}

}  // namespace hjbqvi
