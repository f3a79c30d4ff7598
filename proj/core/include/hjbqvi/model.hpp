#ifndef HJBQVI_MODEL_HPP
#define HJBQVI_MODEL_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hjbqvi {

/// Problem definition or coefficient evaluation error.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation called on the wrong intervention variant or with bad arguments.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Numeric parameter outside its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using ScalarField = std::function<double(double)>;

/// Whether the problem is posed as max(Lu, u - Mu) = 0 or min(Lu, u - Mu) = 0.
/// Cost-minimization models use Max; reward-maximization models (the
/// two-regime switching experiment) use Min. Solvers canonicalize internally.
enum class Orientation { Max, Min };

/// Coefficients of the linear operator for one (regime, control-sample) pair:
/// L u = -1/2 sigma^2 u'' - drift u' + discount u_i - reward - sum_j coupling_j u_j.
struct RegimeControlCoefficients {
    ScalarField sigma;     // volatility
    ScalarField drift;
    ScalarField discount;  // rate, 1/time
    ScalarField reward;    // utility/time
    // coupling[j] is d_ij for target regime j; entry i itself must be empty.
    std::vector<ScalarField> coupling;
};

/// Per-regime, per-control-sample coefficient functions. Compact control sets
/// are represented by their finite sample grids; the discrete scheme takes
/// the pointwise extremum over samples.
struct CoefficientSet {
    // entries[i][a]: regime i, control sample a
    std::vector<std::vector<RegimeControlCoefficients>> entries;

    std::size_t regime_count() const { return entries.size(); }
    std::size_t control_count(std::size_t regime) const { return entries[regime].size(); }
};

/// Switching intervention: jump to another regime at cost k_ij(x), k_ii = 0.
struct SwitchingCosts {
    // cost[i][j] for j != i; cost[i][i] may be null (treated as identically 0)
    std::vector<std::vector<ScalarField>> cost;

    std::size_t regime_count() const { return cost.size(); }
    double eval(std::size_t i, std::size_t j, double x) const;
};

/// Impulse intervention: finitely sampled control set per regime, with
/// destination map and cost per candidate.
struct ImpulseSpec {
    struct Candidate {
        ScalarField destination;  // Gamma_i(x, z)
        ScalarField cost;         // K_i(x, z)
    };
    std::vector<std::vector<Candidate>> regimes;  // [i][z]
    bool positive_cost_mode = true;               // enforce K >= kappa0 > 0 when validating
    bool clamp_destinations = false;  // clamp out-of-domain destinations instead of rejecting
};

using InterventionSpec = std::variant<SwitchingCosts, ImpulseSpec>;

/// Continuous HJBQVI model: per-regime coefficient functions on [x_lo, x_hi]
/// with a Dirichlet condition at x_hi, plus the intervention operator.
/// Immutable after construction; shareable read-only across threads.
struct SwitchingProblem {
    std::size_t regime_count = 0;
    CoefficientSet coefficients;
    InterventionSpec intervention;
    std::vector<std::vector<double>> control_grid;  // control sample labels per regime
    double x_lo = 0.0;
    double x_hi = 1.0;
    std::vector<double> boundary_values;  // Dirichlet datum at x_hi, per regime
    Orientation orientation = Orientation::Max;
    std::string name;

    void check_consistent() const;  // shape invariants (M >= 1, grids nonempty, x_lo < x_hi)
};

/// Outcome of a structural-assumption check over sampled points.
struct ValidationReport {
    bool passed = false;
    double certified_constant = 0.0;  // lambda0 or kappa0
    double min_coupling = 0.0;        // min over samples of each d_ij (monotonicity check)
    std::string detail;
};

/// Checks d_ij >= 0 and c_i - sum_j d_ij >= lambda0 > 0 over the samples.
/// Passing certifies the monotonicity constant lambda0 used by the discretizer.
ValidationReport validate_monotonicity(const SwitchingProblem& problem,
                                       std::span<const double> sample_points,
                                       double eps_pos = 1e-12);

/// Checks the triangular (no-loop) condition k_ij + k_jl - k_il >= kappa0 > 0
/// over all sampled x and triples (i, j != i, l != j). Switching variant only.
ValidationReport validate_triangular_costs(const InterventionSpec& spec,
                                           std::span<const double> sample_points,
                                           double eps_pos = 1e-12);

/// Explicit strict subsolution w_i = -min{min_{j!=i}(k_ji - eps), 0} - C for
/// switching problems with (possibly signed) costs satisfying the triangular
/// condition. The constant C is estimated from the discretized operator.
struct StrictSubsolution {
    std::vector<std::vector<double>> values;  // [regime][sample]
    double margin = 0.0;       // max over samples of (w_i - M_i w); must be <= -min(eps, kappa0-eps)
    double required_margin = 0.0;  // -min(eps, kappa0 - eps)
    double constant = 0.0;     // C
    double operator_bound = 0.0;  // numerically estimated C'
    bool passed = false;
};

StrictSubsolution strict_subsolution(const SwitchingProblem& problem, double eps,
                                     std::span<const double> sample_points);

}  // namespace hjbqvi

#endif  // HJBQVI_MODEL_HPP
