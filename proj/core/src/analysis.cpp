#include "hjbqvi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjbqvi {

std::size_t ActionRegion::total_nodes() const {
    std::size_t n = 0;
    for (const auto& r : region) n += r.size();
    return n;
}

ActionRegion action_region(std::span<const double> u, const DiscreteSystem& sys, double omega) {
    if (omega < 0.0) throw ParameterError("region modulus must be >= 0");
    ActionRegion out;
    out.omega = omega;
    out.region.resize(sys.regime_count);
    out.naive.resize(sys.regime_count);
    // the zero set cannot be resolved below the exact-test tolerance, so the
    // inflated region never falls inside the naive one
    const double effective = std::max(omega, out.naive_tol);
    for (std::size_t i = 0; i < sys.regime_count; ++i) {
        for (std::size_t l = 0; l < sys.nodes_per_regime(); ++l) {
            const std::size_t row = sys.row_index(i, l);
            if (sys.intervention[row].empty()) continue;
            const double resid = std::abs(u[row] - intervention_value(sys, row, u));
            if (resid <= effective) out.region[i].push_back(static_cast<std::uint32_t>(l));
            if (resid <= out.naive_tol) out.naive[i].push_back(static_cast<std::uint32_t>(l));
        }
    }
    return out;
}

namespace {

double one_sided_hausdorff(const std::vector<std::uint32_t>& from,
                           const std::vector<std::uint32_t>& to, const Grid1D& grid) {
    if (from.empty()) return 0.0;
    if (to.empty()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto b : to) {
            best = std::min(best, std::abs(grid.node(a) - grid.node(b)));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double hausdorff_distance(const ActionRegion& a, const ActionRegion& b, const Grid1D& grid) {
    if (a.region.size() != b.region.size()) {
        throw DataError("regions cover a different number of regimes");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.region.size(); ++i) {
        d = std::max(d, one_sided_hausdorff(a.region[i], b.region[i], grid));
        d = std::max(d, one_sided_hausdorff(b.region[i], a.region[i], grid));
    }
    return d;
}

ModulusEstimate calibrate_modulus(std::span<const double> u_rho, std::span<const double> u_2rho) {
    if (u_rho.size() != u_2rho.size()) throw DataError("solution vectors differ in size");
    double diff = 0.0;
    for (std::size_t k = 0; k < u_rho.size(); ++k) {
        diff = std::max(diff, std::abs(u_rho[k] - u_2rho[k]));
    }
    // geometric tail under first-order decay: ||u_rho - u|| <= 2 ||u_rho - u_2rho||
    return {2.0 * diff, diff};
}

std::vector<ImpulsePolicyChoice> extract_impulse_policy(std::span<const double> u,
                                                        const DiscreteSystem& sys,
                                                        const ActionRegion& region,
                                                        std::optional<double> omega_hat) {
    const bool maximize = sys.orientation == Orientation::Min;
    std::vector<ImpulsePolicyChoice> out;
    for (std::size_t i = 0; i < region.region.size(); ++i) {
        for (const auto l : region.region[i]) {
            const std::size_t row = sys.row_index(i, l);
            const auto& cands = sys.intervention[row];
            if (cands.empty()) continue;

            ImpulsePolicyChoice choice;
            choice.regime = static_cast<std::uint32_t>(i);
            choice.node = l;

            double best = maximize ? -std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::infinity();
            std::vector<double> values(cands.size());
            for (std::size_t z = 0; z < cands.size(); ++z) {
                double v = cands[z].cost;
                for (const auto& [col, w] : cands[z].targets) v += w * u[col];
                values[z] = v;
                best = maximize ? std::max(best, v) : std::min(best, v);
            }
            double second = maximize ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
            for (std::size_t z = 0; z < cands.size(); ++z) {
                if (std::abs(values[z] - best) <= 1e-14 * (1.0 + std::abs(best))) {
                    choice.minimizers.push_back(cands[z].label);
                } else {
                    second = maximize ? std::max(second, values[z]) : std::min(second, values[z]);
                }
            }
            choice.gap = std::isfinite(second) ? std::abs(second - best)
                                               : std::numeric_limits<double>::infinity();
            if (omega_hat) choice.ambiguous = choice.gap <= 2.0 * *omega_hat;
            out.push_back(std::move(choice));
        }
    }
    return out;
}

RateEstimate estimate_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw DataError("rate estimation requires at least 3 points");
    RateEstimate est;
    est.abscissae.reserve(points.size());
    est.errors.reserve(points.size());
    bool increasing = points[1].first > points[0].first;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& [a, e] = points[k];
        if (!(a > 0.0)) throw DataError("abscissae must be positive");
        if (!(e > 0.0)) throw DataError("errors must be positive");
        if (k > 0) {
            const bool step_up = a > points[k - 1].first;
            if (step_up != increasing || a == points[k - 1].first) {
                throw DataError("abscissae must be strictly monotone");
            }
        }
        est.abscissae.push_back(a);
        est.errors.push_back(e);
    }

    // least squares on log-log
    const std::size_t n = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lx = std::log(est.abscissae[k]);
        const double ly = std::log(est.errors[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    est.slope = (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);

    for (std::size_t k = 0; k + 1 < n; ++k) {
        est.ratios.push_back(est.errors[k] / est.errors[k + 1]);
    }
    return est;
}

CounterexampleReport remark_counterexamples(double b, double c, double rho) {
    if (!(b > c) || !(c > 0.0)) throw ParameterError("counterexamples require b > c > 0");
    if (!(rho > 0.0)) throw ParameterError("counterexamples require rho > 0");

    CounterexampleReport rep;
    rep.b = b;
    rep.c = c;
    rep.rho = rho;
    rep.v1_exact = b;
    rep.v2_exact = b + c;
    rep.v1_penalized = b;
    rep.v2_penalized = b + c + (b - c) / (1.0 + rho);

    // Two-point QVI max(v_i - f_i, v_i - (v_j + c)) = 0 with f = (b, 2b):
    // a two-regime switching problem with unit discount on a single node.
    SwitchingProblem problem;
    problem.regime_count = 2;
    problem.orientation = Orientation::Max;
    problem.x_lo = 0.0;
    problem.x_hi = 1.0;
    problem.boundary_values = {0.0, 0.0};
    problem.control_grid = {{0.0}, {0.0}};
    problem.name = "two-point counterexample";
    const auto constant = [](double v) { return [v](double) { return v; }; };
    RegimeControlCoefficients r1{constant(0.0), constant(0.0), constant(1.0), constant(b), {}};
    RegimeControlCoefficients r2{constant(0.0), constant(0.0), constant(1.0), constant(2.0 * b), {}};
    problem.coefficients.entries = {{r1}, {r2}};
    SwitchingCosts costs;
    costs.cost = {{nullptr, constant(c)}, {constant(c), nullptr}};
    problem.intervention = costs;

    const Grid1D grid = Grid1D::uniform(0.0, 1.0, 1.0);  // single node x = 0
    const DiscreteSystem sys = assemble(problem, grid);

    StoppingCriterion crit;
    crit.tol = 1e-14;

    const SolveReport pen =
        solve_penalized(sys, rho, InitialVector{initial_guess_continuation_value(sys)}, crit);
    rep.penalized_solver_error = std::max(std::abs(pen.solution[0] - rep.v1_penalized),
                                          std::abs(pen.solution[1] - rep.v2_penalized));

    const SolveReport dir =
        solve_direct(sys, InitialVector{initial_guess_continuation_value(sys)}, crit);
    rep.direct_solver_error = std::max(std::abs(dir.solution[0] - rep.v1_exact),
                                       std::abs(dir.solution[1] - rep.v2_exact));

    const ActionRegion naive = action_region(pen.solution, sys, 0.0);
    rep.naive_region_empty = naive.naive[0].empty() && naive.naive[1].empty();
    // modulus exactly at the penalty error, padded for floating-point equality
    const double omega = (b - c) / (1.0 + rho) * (1.0 + 1e-9);
    const ActionRegion inflated = action_region(pen.solution, sys, omega);
    rep.inflated_region_recovers_index2 =
        inflated.region[0].empty() && inflated.region[1].size() == 1;

    // Scalar QVI max(u - g0, u - (u + c)) = 0: impulse to the same state at
    // cost c. Policy iteration from the intervention policy solves
    // u - u = -c, which has no solution.
    SwitchingProblem scalar;
    scalar.regime_count = 1;
    scalar.orientation = Orientation::Max;
    scalar.x_lo = 0.0;
    scalar.x_hi = 1.0;
    scalar.boundary_values = {0.0};
    scalar.control_grid = {{0.0}};
    scalar.name = "self-impulse counterexample";
    RegimeControlCoefficients rc{constant(0.0), constant(0.0), constant(1.0), constant(b), {}};
    scalar.coefficients.entries = {{rc}};
    ImpulseSpec impulse;
    impulse.regimes = {{ImpulseSpec::Candidate{[](double x) { return x; }, constant(c)}}};
    scalar.intervention = impulse;
    const DiscreteSystem scalar_sys = assemble(scalar, grid);

    const SolveReport singular =
        solve_direct(scalar_sys, InitialPolicy{all_intervention_policy(scalar_sys)}, crit);
    rep.all_intervention_policy_singular =
        singular.status == SolveStatus::SingularPolicy && singular.singular_iteration == 0;

    rep.passed = rep.penalized_solver_error <= 1e-12 && rep.direct_solver_error <= 1e-12 &&
                 rep.naive_region_empty && rep.inflated_region_recovers_index2 &&
                 rep.all_intervention_policy_singular;
    return rep;
}

}  // namespace hjbqvi
