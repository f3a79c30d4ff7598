#include <doctest.h>

#include <cmath>
#include <random>

#include "hjbqvi/problems.hpp"
#include "hjbqvi/solvers.hpp"
#include "oracles.hpp"

using namespace hjbqvi;
namespace oracle = hjbqvi::testing;

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

DiscreteSystem two_regime_system(int n) {
    return assemble(two_regime_switching_problem(), Grid1D::dyadic(0.0, 2.0, n));
}

}  // namespace

TEST_CASE("continuation value") {
    SUBCASE("zero reward gives the zero vector") {
        ConstantProblemParams p;
        p.regimes = 2;
        p.sigma = {0.1, 0.2};
        p.drift = {0.5, -0.5};
        p.discount = {1.0, 1.0};
        p.reward_coeffs = {{0.0}, {0.0}};
        p.switch_cost = {{0.0, 0.5}, {0.5, 0.0}};
        p.boundary_values = {0.0, 0.0};
        const auto sys =
            assemble(constant_coefficient_problem(p), Grid1D::uniform(0.0, 1.0, 0.125));
        for (double v : initial_guess_continuation_value(sys)) CHECK(v == 0.0);
    }

    SUBCASE("pure discount problem returns the reward pointwise") {
        ConstantProblemParams p;
        p.regimes = 1;
        p.sigma = {0.0};
        p.drift = {0.0};
        p.discount = {1.0};
        p.reward_coeffs = {{0.3, 2.0}};
        p.switch_cost = {{0.0}};
        p.boundary_values = {0.0};
        const auto sys =
            assemble(constant_coefficient_problem(p), Grid1D::uniform(0.0, 1.0, 0.25));
        const auto u0 = initial_guess_continuation_value(sys);
        for (std::size_t l = 0; l < sys.nodes_per_regime(); ++l) {
            CHECK(u0[l] == doctest::Approx(0.3 + 2.0 * sys.grid.node(l)));
        }
    }

    SUBCASE("riskless regime converges to the transport ODE solution at x = 1") {
        // closed form x int_x^2 reward/(r t^2) dt = 25 - 50 log(3/2) at x = 1
        const double exact = oracle::riskless_regime_value_at_one();
        CHECK(exact == doctest::Approx(4.7267445945917815).epsilon(1e-12));
        CHECK(oracle::riskless_regime_value(1.0, 0.02, 2.0) == doctest::Approx(exact).epsilon(1e-10));

        double prev_err = 0.0;
        for (int n : {8, 10}) {
            const auto sys = two_regime_system(n);
            const auto u0 = initial_guess_continuation_value(sys);
            const std::size_t at_one = sys.row_index(0, std::size_t(1) << n);
            const double err = std::abs(u0[at_one] - exact);
            if (prev_err > 0.0) CHECK(err < 0.35 * prev_err);  // first-order decay
            prev_err = err;
        }
        // frozen value at n = 10 (err/h was measured stable near 8.33)
        const auto sys = two_regime_system(10);
        const auto u0 = initial_guess_continuation_value(sys);
        CHECK(u0[sys.row_index(0, 1024)] == doctest::Approx(4.7348804).epsilon(1e-6));
    }
}

TEST_CASE("penalized solver") {
    SUBCASE("rho = 0 keeps the continuation value as a fixed point") {
        const auto sys = two_regime_system(6);
        const auto u0 = initial_guess_continuation_value(sys);
        const auto rep = solve_penalized(sys, 0.0, InitialVector{u0}, {});
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(rep.iterations <= 2);
        CHECK(sup_diff(rep.solution, u0) <= 1e-12);
    }

    SUBCASE("tiny grid matches the literal damped fixed-point oracle") {
        // h = 1/4 on (0,2): 8 unknowns per regime
        const auto sys = assemble(two_regime_switching_problem(), Grid1D::dyadic(0.0, 2.0, 2));
        const double rho = 1e3;
        const auto expected = oracle::damped_fixed_point_oracle(sys, oracle::OracleScheme::Penalized,
                                                                rho, 0.0, 1e-12);
        REQUIRE(expected.has_value());
        const auto rep = solve_penalized(sys, rho,
                                         InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(sup_diff(rep.solution, *expected) <= 1e-9);
    }

    SUBCASE("policy-iteration iterates decrease and the active set is consistent") {
        const auto sys = two_regime_system(8);
        const auto rep = solve_penalized(sys, 1e4,
                                         InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(rep.max_monotonicity_violation <= 1e-12);
        CHECK(rep.complementarity_residual <= 1e-12);
        CHECK(rep.residual_history.back() < 1e-9);
    }

    SUBCASE("penalty monotone in rho with min-orientation: from below") {
        const auto sys = two_regime_system(8);
        const auto u0 = initial_guess_continuation_value(sys);
        const auto u_lo = solve_penalized(sys, 1e2, InitialVector{u0}, {});
        const auto u_hi = solve_penalized(sys, 1e3, InitialVector{u0}, {});
        for (std::size_t k = 0; k < u_lo.solution.size(); ++k) {
            CHECK(u_lo.solution[k] <= u_hi.solution[k] + 1e-12);
        }
    }
}

TEST_CASE("direct solver") {
    SUBCASE("all-switch initial policy is singular at iteration 0, not a crash") {
        const auto sys = two_regime_system(6);
        const auto rep = solve_direct(sys, InitialPolicy{all_intervention_policy(sys)}, {});
        CHECK(rep.status == SolveStatus::SingularPolicy);
        CHECK(rep.singular_iteration == 0);
        CHECK(rep.solution.empty());
    }

    SUBCASE("from the continuation value the discrete QVI is solved") {
        const auto sys = two_regime_system(8);
        const auto rep =
            solve_direct(sys, InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(rep.max_monotonicity_violation <= 1e-12);
        // complementarity min(Au - f, Mu - g) = 0 rowwise
        const auto resid = qvi_residual(sys, rep.solution);
        double worst = 0.0;
        for (double v : resid) worst = std::max(worst, std::abs(v));
        CHECK(worst <= 1e-8);
    }

    SUBCASE("scalar self-impulse QVI: intervention policy has no solution") {
        // max(u - g0, u - (u + c)) = 0; remark-style failure of the direct scheme
        SwitchingProblem scalar;
        scalar.regime_count = 1;
        scalar.orientation = Orientation::Max;
        scalar.x_lo = 0.0;
        scalar.x_hi = 1.0;
        scalar.boundary_values = {0.0};
        scalar.control_grid = {{0.0}};
        RegimeControlCoefficients cf;
        cf.sigma = [](double) { return 0.0; };
        cf.drift = [](double) { return 0.0; };
        cf.discount = [](double) { return 1.0; };
        cf.reward = [](double) { return 2.0; };
        scalar.coefficients.entries = {{cf}};
        ImpulseSpec impulse;
        impulse.regimes = {{ImpulseSpec::Candidate{[](double x) { return x; },
                                                   [](double) { return 0.25; }}}};
        scalar.intervention = impulse;
        const auto sys = assemble(scalar, Grid1D::uniform(0.0, 1.0, 0.5));

        const auto singular = solve_direct(sys, InitialPolicy{all_intervention_policy(sys)}, {});
        CHECK(singular.status == SolveStatus::SingularPolicy);

        // from the continuation value the solution is u = reward/discount
        const auto ok =
            solve_direct(sys, InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(ok.status == SolveStatus::Converged);
        for (double v : ok.solution) CHECK(v == doctest::Approx(2.0));
    }
}

TEST_CASE("per-strategy penalty") {
    SUBCASE("two regimes: identical to the pointwise penalty") {
        const auto sys = two_regime_system(7);
        const auto u0 = initial_guess_continuation_value(sys);
        const auto pointwise = solve_penalized(sys, 1e4, InitialVector{u0}, {});
        const auto per_strategy = solve_per_strategy_penalty(sys, 1e4, InitialVector{u0}, {});
        CHECK(per_strategy.status == SolveStatus::Converged);
        CHECK(sup_diff(pointwise.solution, per_strategy.solution) <= 1e-10);
    }

    SUBCASE("rho = 0 returns the continuation value") {
        const auto sys = two_regime_system(6);
        const auto u0 = initial_guess_continuation_value(sys);
        const auto rep = solve_per_strategy_penalty(sys, 0.0, InitialVector{u0}, {});
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(sup_diff(rep.solution, u0) <= 1e-12);
    }

    SUBCASE("three regimes: within the penalty gap of the direct solution") {
        ConstantProblemParams p;
        p.regimes = 3;
        p.sigma = {0.0, 0.1, 0.2};
        p.drift = {0.2, -0.3, 0.4};
        p.discount = {1.0, 1.2, 0.9};
        p.reward_coeffs = {{1.0, 0.5}, {-0.2, 1.5}, {0.8}};
        p.switch_cost = {{0.0, 0.3, 0.45}, {0.3, 0.0, 0.35}, {0.4, 0.3, 0.0}};
        p.boundary_values = {0.0, 0.0, 0.0};
        const auto sys =
            assemble(constant_coefficient_problem(p), Grid1D::uniform(0.0, 1.0, 0.125));
        const auto u0 = initial_guess_continuation_value(sys);
        const double rho = 1e5;
        const auto direct = solve_direct(sys, InitialVector{u0}, {});
        const auto per_strategy = solve_per_strategy_penalty(sys, rho, InitialVector{u0}, {});
        REQUIRE(direct.status == SolveStatus::Converged);
        REQUIRE(per_strategy.status == SolveStatus::Converged);
        // max-orientation: penalized from above, within O(1/rho)
        for (std::size_t k = 0; k < direct.solution.size(); ++k) {
            CHECK(per_strategy.solution[k] >= direct.solution[k] - 1e-10);
        }
        CHECK(sup_diff(per_strategy.solution, direct.solution) <= 100.0 / rho);

        // and it matches its own gauss-seidel oracle
        const auto ref = oracle::gauss_seidel_oracle(sys, oracle::OracleScheme::PerStrategy, rho);
        REQUIRE(ref.has_value());
        CHECK(sup_diff(per_strategy.solution, *ref) <= 1e-8);
    }

    SUBCASE("impulse variant is a usage error") {
        SwitchingProblem scalar;
        scalar.regime_count = 1;
        scalar.orientation = Orientation::Max;
        scalar.x_lo = 0.0;
        scalar.x_hi = 1.0;
        scalar.boundary_values = {0.0};
        scalar.control_grid = {{0.0}};
        RegimeControlCoefficients cf;
        cf.discount = [](double) { return 1.0; };
        cf.reward = [](double) { return 1.0; };
        scalar.coefficients.entries = {{cf}};
        ImpulseSpec impulse;
        impulse.regimes = {{ImpulseSpec::Candidate{[](double x) { return 0.5 * x; },
                                                   [](double) { return 0.25; }}}};
        scalar.intervention = impulse;
        const auto sys = assemble(scalar, Grid1D::uniform(0.0, 1.0, 0.5));
        CHECK_THROWS_AS(
            solve_per_strategy_penalty(sys, 1.0, InitialVector{{0.0, 0.0}}, {}),
            UsageError);
    }
}

TEST_CASE("rho continuation") {
    const auto sys = two_regime_system(9);

    SUBCASE("below the threshold a single stage runs") {
        const auto rep = solve_continuation(sys, 50.0, {});
        CHECK(rep.continuation_stages.size() == 1);
        CHECK(rep.status == SolveStatus::Converged);
    }

    SUBCASE("rho = 100 equals plain solve_penalized") {
        const auto rep = solve_continuation(sys, 100.0, {});
        const auto plain = solve_penalized(
            sys, 100.0, InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(rep.continuation_stages.size() == 1);
        CHECK(sup_diff(rep.solution, plain.solution) == 0.0);
        CHECK(rep.iterations == plain.iterations);
    }

    SUBCASE("two stages beat the cold start and agree with it") {
        const double rho_target = static_cast<double>(sys.unknowns()) / 16.0;
        REQUIRE(rho_target > 200.0);
        const auto warm = solve_continuation(sys, rho_target, {});
        const auto cold = solve_penalized(
            sys, rho_target, InitialVector{initial_guess_continuation_value(sys)}, {});
        REQUIRE(warm.status == SolveStatus::Converged);
        CHECK(warm.continuation_stages.size() == 2);
        CHECK(warm.continuation_stages[0].first == doctest::Approx(100.0));
        CHECK(warm.iterations < cold.iterations);
        CHECK(sup_diff(warm.solution, cold.solution) <= 1e-10);
    }
}

TEST_CASE("iterated optimal stopping") {
    const auto sys = two_regime_system(7);

    SUBCASE("stages increase toward the QVI solution (min orientation)") {
        const auto ios = iterated_optimal_stopping(sys, 12, ObstacleInnerSolver::Direct, {});
        REQUIRE(ios.stages.size() >= 2);
        for (std::size_t n = 1; n < ios.stages.size(); ++n) {
            const auto& prev = ios.stages[n - 1].solution;
            const auto& cur = ios.stages[n].solution;
            for (std::size_t k = 0; k < cur.size(); ++k) CHECK(cur[k] >= prev[k] - 1e-12);
        }
        // decrements decay geometrically toward the direct solution
        const auto direct =
            solve_direct(sys, InitialVector{initial_guess_continuation_value(sys)}, {});
        CHECK(sup_diff(ios.stages.back().solution, direct.solution) <
              sup_diff(ios.stages[1].solution, direct.solution));
    }

    SUBCASE("penalized inner solver agrees with the direct inner solver") {
        const auto a = iterated_optimal_stopping(sys, 6, ObstacleInnerSolver::Direct, {});
        const auto b = iterated_optimal_stopping(sys, 6, ObstacleInnerSolver::Penalized, {}, 1e8);
        REQUIRE(a.stages.size() == b.stages.size());
        CHECK(sup_diff(a.stages.back().solution, b.stages.back().solution) <= 1e-6);
    }

    SUBCASE("halving the switching cost does not speed up the outer contraction") {
        const auto fit_mu = [](const IterationStages& ios) {
            // least-squares slope of log decrements
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            std::size_t n = 0;
            for (std::size_t k = 0; k < ios.sup_decrements.size(); ++k) {
                if (ios.sup_decrements[k] <= 0.0) break;
                const double x = static_cast<double>(k + 1);
                const double y = std::log(ios.sup_decrements[k]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += y * x;
                ++n;
            }
            const double nn = static_cast<double>(n);
            const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
            return 1.0 - std::exp(slope);  // per-stage contraction rate mu
        };
        TwoRegimeParams params;
        const auto full = iterated_optimal_stopping(
            assemble(two_regime_switching_problem(params), Grid1D::dyadic(0.0, 2.0, 7)), 15,
            ObstacleInnerSolver::Direct, {});
        params.switch_cost /= 2.0;
        const auto half = iterated_optimal_stopping(
            assemble(two_regime_switching_problem(params), Grid1D::dyadic(0.0, 2.0, 7)), 15,
            ObstacleInnerSolver::Direct, {});
        CHECK(fit_mu(half) <= fit_mu(full) + 0.02);
    }
}

TEST_CASE("small random systems agree with the gauss-seidel oracle") {
    std::mt19937 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto inst = oracle::random_instance(rng, /*allow_impulse=*/true);
        const auto sys = assemble(inst.problem, inst.grid);
        const auto u0 = initial_guess_continuation_value(sys);

        const auto pen = solve_penalized(sys, 1e5, InitialVector{u0}, {});
        REQUIRE(pen.status == SolveStatus::Converged);
        const auto ref = oracle::gauss_seidel_oracle(sys, oracle::OracleScheme::Penalized, 1e5);
        REQUIRE(ref.has_value());
        CHECK(sup_diff(pen.solution, *ref) <= 1e-8);
        ++checked;
    }
    CHECK(checked == 12);
}
