#ifndef HJBQVI_PROBLEMS_HPP
#define HJBQVI_PROBLEMS_HPP

#include <string>

#include "hjbqvi/model.hpp"

namespace hjbqvi {

/// Malformed problem/config document; the message carries the JSON path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * The two-regime infinite-horizon optimal switching model: regime 1 holds the
 * riskless asset (fully degenerate first-order operator), regime 2 the risky
 * one, with constant switching cost and hat-function running reward
 * 0.5 - |x - 1| on [0.5, 1.5]. Posed on (0, 2) with zero Dirichlet datum in
 * min-orientation.
 */
struct TwoRegimeParams {
    double r = 0.02;          // riskless rate / discount
    double mu = 0.06;         // risky drift
    double sigma = 0.2;       // risky volatility
    double switch_cost = 0.125;
    double x_hi = 2.0;        // truncation point (Dirichlet datum 0)
};
SwitchingProblem two_regime_switching_problem(const TwoRegimeParams& params = {});

/// Constant-coefficient switching model, mainly for tests and small studies:
/// sigma_i(x) = sigma_i * x and drift_i(x) = drift_i * x (degenerate at
/// x_lo = 0), constant discount/coupling/costs, polynomial rewards.
struct ConstantProblemParams {
    std::size_t regimes = 2;
    std::vector<double> sigma;            // per regime
    std::vector<double> drift;            // per regime (either sign)
    std::vector<double> discount;         // per regime
    std::vector<std::vector<double>> coupling;      // [i][j], zero diagonal
    std::vector<std::vector<double>> reward_coeffs; // polynomial in x per regime
    std::vector<std::vector<double>> switch_cost;   // [i][j]
    std::vector<double> boundary_values;
    double x_hi = 1.0;
    Orientation orientation = Orientation::Max;
};
SwitchingProblem constant_coefficient_problem(const ConstantProblemParams& params);

/// Problem loading from the JSON schema documented in docs/formats.md.
SwitchingProblem load_problem_json_text(const std::string& text);
SwitchingProblem load_problem_file(const std::string& path);

}  // namespace hjbqvi

#endif  // HJBQVI_PROBLEMS_HPP
