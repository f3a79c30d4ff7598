#include "hjbqvi/linear_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace hjbqvi {

const char* to_string(SolveFailure f) {
    switch (f) {
        case SolveFailure::None: return "None";
        case SolveFailure::Singular: return "Singular";
        case SolveFailure::NotDiagonallyDominant: return "NotDiagonallyDominant";
        case SolveFailure::DimensionMismatch: return "DimensionMismatch";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Banded LU, LAPACK gbtrf-style storage: entry (i, j) lives at
// ab_[kl + ku + i - j + j*ld_], with kl extra superdiagonals for pivot fill.

void BandedLU::reset(std::size_t n, std::size_t kl, std::size_t ku) {
    n_ = n;
    kl_ = kl;
    ku_ = ku;
    ld_ = 2 * kl + ku + 1;
    ab_.assign(ld_ * n, 0.0);
    ipiv_.assign(n, 0);
    factored_ = false;
}

void BandedLU::add(std::size_t i, std::size_t j, double v) {
    assert(i < n_ && j < n_);
    assert(j + kl_ >= i && i + ku_ >= j);
    ab_[kl_ + ku_ + i - j + j * ld_] += v;
}

bool BandedLU::factor(double pivot_tol, double scale) {
    const std::size_t band = kl_ + ku_;  // working upper bandwidth during elimination
    const double threshold = pivot_tol * std::max(scale, 1e-300);
    // entry (i, j) lives at slot(i, j) = kl + ku + i - j + j*ld
    const auto slot = [this](std::size_t i, std::size_t j) { return kl_ + ku_ + i - j + j * ld_; };
    for (std::size_t col = 0; col < n_; ++col) {
        // partial pivot among rows col..col+kl
        const std::size_t reach = std::min(kl_, n_ - 1 - col);
        std::size_t piv = col;
        double best = std::abs(ab_[slot(col, col)]);
        for (std::size_t r = 1; r <= reach; ++r) {
            const double v = std::abs(ab_[slot(col + r, col)]);
            if (v > best) {
                best = v;
                piv = col + r;
            }
        }
        ipiv_[col] = static_cast<std::uint32_t>(piv);
        if (best <= threshold) {
            factored_ = false;
            return false;
        }
        const std::size_t width = std::min(band, n_ - 1 - col);
        if (piv != col) {
            for (std::size_t j = col; j <= col + width; ++j) {
                std::swap(ab_[slot(piv, j)], ab_[slot(col, j)]);
            }
        }
        const double pivot = ab_[slot(col, col)];
        for (std::size_t r = 1; r <= reach; ++r) {
            double& entry = ab_[slot(col + r, col)];
            const double mult = entry / pivot;
            entry = mult;  // store L factor in place
            for (std::size_t j = 1; j <= width; ++j) {
                ab_[slot(col + r, col + j)] -= mult * ab_[slot(col, col + j)];
            }
        }
    }
    factored_ = true;
    return true;
}

void BandedLU::solve(std::span<double> b) const {
    assert(factored_ && b.size() == n_);
    const std::size_t band = kl_ + ku_;
    // forward: apply pivots and L
    for (std::size_t col = 0; col < n_; ++col) {
        const std::size_t piv = ipiv_[col];
        if (piv != col) std::swap(b[col], b[piv]);
        const std::size_t rows_below = std::min(kl_, n_ - 1 - col);
        for (std::size_t r = 1; r <= rows_below; ++r) {
            b[col + r] -= ab_[kl_ + ku_ + r + col * ld_] * b[col];
        }
    }
    // backward: U
    for (std::size_t col = n_; col-- > 0;) {
        const std::size_t width = std::min(band, n_ - 1 - col);
        double acc = b[col];
        for (std::size_t j = 1; j <= width; ++j) {
            acc -= ab_[kl_ + ku_ - j + (col + j) * ld_] * b[col + j];
        }
        b[col] = acc / ab_[kl_ + ku_ + col * ld_];
    }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBandedWidthLimit = 64;  // beyond this, general sparse LU

double vec_inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

struct Factorization::Impl {
    SparseMatrix a;  // retained for residual reporting
    double a_norm = 0.0;
    SolverOptions opts;

    bool banded = false;
    BandedLU lu;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
    bool sparse_ok = false;
};

Factorization::Factorization(const SparseMatrix& a, const SolverOptions& opts) {
    auto impl = std::make_shared<Impl>();
    impl->a = a;
    impl->opts = opts;
    impl->a_norm = a.inf_norm();

    if (a.rows() != a.cols()) {
        status_ = SolveFailure::DimensionMismatch;
        return;
    }
    if (opts.require_diagonal_dominance && a.dominance_margin() <= 0.0) {
        status_ = SolveFailure::NotDiagonallyDominant;
        impl_ = std::move(impl);
        return;
    }

    const auto [kl, ku] = a.band_limits();
    if (kl + ku <= kBandedWidthLimit) {
        impl->banded = true;
        impl->lu.reset(a.rows(), kl, ku);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const auto cols = a.row_cols(r);
            const auto vals = a.row_values(r);
            for (std::size_t k = 0; k < cols.size(); ++k) impl->lu.add(r, cols[k], vals[k]);
        }
        if (!impl->lu.factor(opts.pivot_tol, impl->a_norm)) {
            status_ = SolveFailure::Singular;
        }
    } else {
        Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(a.rows()),
                                      static_cast<Eigen::Index>(a.cols()));
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(a.nnz());
        for (const auto& t : a.to_triplets()) {
            trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
        }
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        impl->sparse_lu.isSymmetric(false);
        impl->sparse_lu.compute(m);
        impl->sparse_ok = impl->sparse_lu.info() == Eigen::Success;
        if (!impl->sparse_ok) status_ = SolveFailure::Singular;
    }
    impl_ = std::move(impl);
}

LinearSolveOutcome Factorization::solve(std::span<const double> b) const {
    LinearSolveOutcome out;
    if (status_ != SolveFailure::None) {
        out.failure = status_;
        return out;
    }
    const Impl& impl = *impl_;
    if (b.size() != impl.a.rows()) {
        out.failure = SolveFailure::DimensionMismatch;
        return out;
    }

    std::vector<double> x(b.begin(), b.end());
    if (impl.banded) {
        impl.lu.solve(x);
    } else {
        Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
        Eigen::VectorXd sol = impl.sparse_lu.solve(rhs);
        if (impl.sparse_lu.info() != Eigen::Success) {
            out.failure = SolveFailure::Singular;
            return out;
        }
        x.assign(sol.data(), sol.data() + sol.size());
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            out.failure = SolveFailure::Singular;
            return out;
        }
    }

    std::vector<double> ax(b.size());
    impl.a.multiply(x, ax);
    double res = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) res = std::max(res, std::abs(ax[i] - b[i]));
    out.residual_norm = res;

    // backward-error acceptance: ||Ax-b|| <= tol * (1 + ||b|| + ||A||*||x||)
    const double bound =
        impl.opts.solver_tol * (1.0 + vec_inf_norm(b) + impl.a_norm * vec_inf_norm(x));
    if (res > bound) {
        out.failure = SolveFailure::Singular;
        return out;
    }
    out.solution = std::move(x);
    return out;
}

LinearSolveOutcome solve(const SparseMatrix& a, std::span<const double> b,
                         const SolverOptions& opts) {
    Factorization f(a, opts);
    return f.solve(b);
}

std::vector<std::uint32_t> interleave_permutation(std::size_t regime_count,
                                                  std::size_t nodes_per_regime) {
    std::vector<std::uint32_t> perm(regime_count * nodes_per_regime);
    std::size_t k = 0;
    for (std::size_t l = 0; l < nodes_per_regime; ++l) {
        for (std::size_t i = 0; i < regime_count; ++i) {
            perm[k++] = static_cast<std::uint32_t>(i * nodes_per_regime + l);
        }
    }
    return perm;
}

ReorderedSystem reorder_interleaved(const SparseMatrix& a, std::size_t regime_count,
                                    std::size_t nodes_per_regime) {
    if (a.rows() != regime_count * nodes_per_regime || a.rows() != a.cols()) {
        throw std::invalid_argument("reorder_interleaved: dimension mismatch");
    }
    ReorderedSystem out;
    out.perm = interleave_permutation(regime_count, nodes_per_regime);
    out.matrix = a.permute_symmetric(out.perm);
    return out;
}

std::vector<double> apply_permutation(std::span<const double> x,
                                      std::span<const std::uint32_t> perm) {
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < perm.size(); ++k) y[k] = x[perm[k]];
    return y;
}

std::vector<double> undo_permutation(std::span<const double> y,
                                     std::span<const std::uint32_t> perm) {
    std::vector<double> x(y.size());
    for (std::size_t k = 0; k < perm.size(); ++k) x[perm[k]] = y[k];
    return x;
}

}  // namespace hjbqvi
