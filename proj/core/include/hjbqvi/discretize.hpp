#ifndef HJBQVI_DISCRETIZE_HPP
#define HJBQVI_DISCRETIZE_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hjbqvi/grid.hpp"
#include "hjbqvi/model.hpp"
#include "hjbqvi/sparse.hpp"

namespace hjbqvi {

/// Monotonicity or domain violation found while building the discrete system.
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One finite-difference row for a fixed control sample:
/// sum of entries * u = rhs encodes the operator at (regime, node).
struct PdeRowCandidate {
    std::vector<std::pair<std::uint32_t, double>> entries;  // sorted by column
    double rhs = 0.0;  // reward + Dirichlet fold
};

/// One intervention candidate for a row. The residual in problem orientation
/// is u_row - sum_m weight_m * u_m - cost, where cost already carries the
/// orientation sign of the switching/impulse cost and any boundary fold.
/// Interpolation weights lie in [0, 1] and sum to at most 1 (sub-stochastic
/// after Dirichlet folding); switching rows have the single weight 1.
struct InterventionRow {
    std::vector<std::pair<std::uint32_t, double>> targets;
    double cost = 0.0;
    std::int32_t label = -1;  // target regime (switching) or candidate index (impulse)
};

enum class InterventionKind { None, Switching, Impulse };

/**
 * Assembled monotone discretization. Unknowns are regime-major:
 * row(i, l) = i * nodes + l. Immutable after assembly, shareable read-only.
 *
 * Every PDE candidate row is a strictly diagonally dominant M-matrix row
 * (off-diagonals <= 0, row sum >= lambda0 > 0); this is asserted on assembly.
 */
struct DiscreteSystem {
    Orientation orientation = Orientation::Max;
    std::size_t regime_count = 0;
    Grid1D grid;
    std::vector<double> boundary_values;
    double lambda0 = 0.0;  // certified dominance margin min over rows of the row sum
    InterventionKind intervention_kind = InterventionKind::None;

    std::vector<std::vector<PdeRowCandidate>> pde_rows;   // [row][control sample]
    std::vector<std::vector<InterventionRow>> intervention;  // [row][candidate]

    std::size_t nodes_per_regime() const { return grid.nodes(); }
    std::size_t unknowns() const { return regime_count * grid.nodes(); }
    std::size_t row_index(std::size_t regime, std::size_t node) const {
        return regime * grid.nodes() + node;
    }
    std::size_t regime_of_row(std::size_t row) const { return row / grid.nodes(); }
    std::size_t node_of_row(std::size_t row) const { return row % grid.nodes(); }

    bool singleton_controls() const;

    /// Matrix/rhs of one control-sample slice (rows with fewer samples use
    /// their last). Slice 0 backs the continuation-value initial guess.
    SparseMatrix control_sample_matrix(std::size_t sample) const;
    std::vector<double> control_sample_rhs(std::size_t sample) const;
    std::size_t max_control_samples() const;
};

/// Builds the upwind finite-difference discretization on the grid:
/// central second differences, forward/backward first differences following
/// the drift sign, Dirichlet datum eliminated into the right-hand side, and
/// degenerate rows (all derivative coefficients vanishing) kept as discount
/// rows c*u = reward.
DiscreteSystem assemble(const SwitchingProblem& problem, const Grid1D& grid);

/// Switching intervention rows u_{i,l} - u_{j,l} with the orientation-signed
/// cost entry, one family per ordered regime pair.
std::vector<std::vector<InterventionRow>> assemble_switching_penalty_rows(
    const DiscreteSystem& sys, const SwitchingCosts& costs, Orientation orientation);

/// How assemble_impulse_rows treats destinations outside [x_lo, x_hi].
enum class OutOfDomainPolicy { Reject, Clamp };

/// Linear-interpolation intervention rows for impulse candidates; a
/// destination at or beyond the Dirichlet node folds the boundary value into
/// the cost entry.
std::vector<std::vector<InterventionRow>> assemble_impulse_rows(
    const DiscreteSystem& sys, const SwitchingProblem& problem,
    OutOfDomainPolicy oob = OutOfDomainPolicy::Reject);

/// All intervention rows stacked into one sparse matrix (for the two-regime
/// switching model this is the paper-form block matrix (I, -I; -I, I)).
struct StackedIntervention {
    SparseMatrix matrix;               // one row per (owner row, candidate)
    std::vector<double> cost;          // matching cost entries
    std::vector<std::uint32_t> owner;  // owning unknown of each stacked row
};
StackedIntervention stack_intervention_rows(const DiscreteSystem& sys);

/// Plain-text export of the assembled system (documented in docs/formats.md):
/// ASCII sections, one "row col value" triplet per line, '%.17g' values.
void export_system(const DiscreteSystem& sys, std::ostream& os);

}  // namespace hjbqvi

#endif  // HJBQVI_DISCRETIZE_HPP
