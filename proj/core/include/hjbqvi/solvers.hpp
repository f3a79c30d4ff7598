#ifndef HJBQVI_SOLVERS_HPP
#define HJBQVI_SOLVERS_HPP

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hjbqvi/discretize.hpp"

namespace hjbqvi {

/// Relative sup-norm termination test ||u_k - u_{k-1}|| / max(||u_k||, scale) < tol.
struct StoppingCriterion {
    double tol = 1e-9;
    double scale = 1.0;
    std::size_t max_iterations = 100000;
};

/// Per-unknown control choice: continuous control sample index, intervention
/// flag, and the intervention target (switch regime or impulse candidate).
struct Policy {
    struct Entry {
        std::uint16_t control = 0;
        std::uint8_t intervene = 0;
        std::int32_t target = -1;  // defined whenever intervene == 1
    };
    std::vector<Entry> rows;

    bool operator==(const Policy&) const = default;
};

enum class SolveStatus { Converged, MaxIterations, SingularPolicy };

const char* to_string(SolveStatus s);

struct SolveReport {
    std::vector<double> solution;          // problem orientation; empty on SingularPolicy
    std::size_t iterations = 0;
    std::vector<double> residual_history;  // termination-criterion value per iteration
    SolveStatus status = SolveStatus::MaxIterations;
    double wall_time_seconds = 0.0;
    double penalty_parameter = 0.0;
    Policy final_policy;

    // diagnostics
    double max_monotonicity_violation = 0.0;  // policy-iteration iterates must decrease (canonical form)
    double complementarity_residual = 0.0;
    std::size_t singular_iteration = 0;  // iteration at which the policy matrix was singular
    std::vector<std::pair<double, std::size_t>> continuation_stages;  // (rho, iterations)
};

struct InitialVector {
    std::vector<double> values;
};
struct InitialPolicy {
    Policy policy;
};
using InitialGuess = std::variant<InitialVector, InitialPolicy>;

/// Continuation value u0 with A u0 = reward (intervention ignored); uses the
/// first control sample's matrix.
std::vector<double> initial_guess_continuation_value(const DiscreteSystem& sys);

/// The all-intervention policy (the initial guess for which direct-scheme
/// policy iteration is not well-defined).
Policy all_intervention_policy(const DiscreteSystem& sys);

/**
 * Policy iteration for the penalized discrete system
 *   A u - f +/- rho (M u - g)^{+/-} = 0
 * in the orientation of the problem. Penalized policy matrices are strictly
 * diagonally dominant, so every iterate is well-defined for any initial
 * guess; a singular matrix here is a bug, not an outcome.
 */
SolveReport solve_penalized(const DiscreteSystem& sys, double rho, const InitialGuess& init,
                            const StoppingCriterion& crit);

/// Policy iteration applied directly to the unpenalized discrete QVI. The
/// intervention rows are only weakly dominant, so the policy matrix can be
/// singular (e.g. under the all-intervention policy); this is reported as
/// SolveStatus::SingularPolicy, never thrown.
SolveReport solve_direct(const DiscreteSystem& sys, const InitialGuess& init,
                         const StoppingCriterion& crit);

/// Per-strategy penalty scheme: the penalty sums over every intervention
/// target with positive violation instead of the pointwise extremum.
/// Switching variant only.
SolveReport solve_per_strategy_penalty(const DiscreteSystem& sys, double rho,
                                       const InitialGuess& init, const StoppingCriterion& crit);

/// rho-continuation: when rho_target > 200, first solve at rho = 100 from the
/// continuation value, then warm-start the rho_target solve from that
/// solution. Iteration counts of both stages are aggregated in the report.
SolveReport solve_continuation(const DiscreteSystem& sys, double rho_target,
                               const StoppingCriterion& crit);

enum class ObstacleInnerSolver { Direct, Penalized };

struct IterationStages {
    std::vector<SolveReport> stages;      // stage 0 = continuation value
    std::vector<double> sup_decrements;   // ||u^{n-1} - u^n||_inf, one per stage n >= 1
};

/// Iterated optimal stopping: stage n solves the obstacle problem with the
/// intervention values frozen at the previous iterate. Obstacle rows are
/// diagonal, so the inner policy iteration has no singularity issue.
IterationStages iterated_optimal_stopping(const DiscreteSystem& sys, std::size_t n_max,
                                          ObstacleInnerSolver inner, const StoppingCriterion& crit,
                                          double inner_rho = 1e6);

/// Best intervention value M_i u at a row, in problem orientation
/// (min over candidates of value+cost for Max problems, max for Min).
/// Rows without intervention candidates return +/-infinity accordingly.
double intervention_value(const DiscreteSystem& sys, std::size_t row, std::span<const double> u);

/// Rowwise QVI residual max(Au-f, Mu-g) (respectively min for Min problems);
/// its sup-norm is the complementarity residual of a direct solution.
std::vector<double> qvi_residual(const DiscreteSystem& sys, std::span<const double> u);

}  // namespace hjbqvi

#endif  // HJBQVI_SOLVERS_HPP
