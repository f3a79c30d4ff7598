#include <doctest.h>

#include <cmath>
#include <random>

#include "hjbqvi/model.hpp"
#include "hjbqvi/problems.hpp"

using namespace hjbqvi;

namespace {

std::vector<double> domain_samples(double lo, double hi, std::size_t count) {
    std::vector<double> xs(count);
    for (std::size_t k = 0; k < count; ++k) {
        xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return xs;
}

SwitchingProblem constant_two_regime(double discount, double coupling, double k12, double k21) {
    ConstantProblemParams p;
    p.regimes = 2;
    p.sigma = {0.1, 0.2};
    p.drift = {0.3, -0.2};
    p.discount = {discount, discount};
    p.coupling = {{0.0, coupling}, {coupling, 0.0}};
    p.reward_coeffs = {{1.0}, {0.5}};
    p.switch_cost = {{0.0, k12}, {k21, 0.0}};
    p.boundary_values = {0.0, 0.0};
    return constant_coefficient_problem(p);
}

}  // namespace

TEST_CASE("monotonicity validation") {
    const auto samples = domain_samples(0.0, 2.0, 33);

    SUBCASE("two-regime switching model passes with lambda0 = r") {
        const auto problem = two_regime_switching_problem();
        const auto rep = validate_monotonicity(problem, samples);
        CHECK(rep.passed);
        CHECK(rep.certified_constant == doctest::Approx(0.02));
        CHECK(rep.min_coupling == 0.0);
    }

    SUBCASE("scalar uncoupled problem certifies its discount") {
        ConstantProblemParams p;
        p.regimes = 1;
        p.sigma = {0.0};
        p.drift = {0.0};
        p.discount = {1.0};
        p.reward_coeffs = {{1.0}};
        p.switch_cost = {{0.0}};
        p.boundary_values = {0.0};
        const auto problem = constant_coefficient_problem(p);
        const auto rep = validate_monotonicity(problem, domain_samples(0.0, 1.0, 9));
        CHECK(rep.passed);
        CHECK(rep.certified_constant == doctest::Approx(1.0));
    }

    SUBCASE("dominating coupling fails with the violated margin") {
        const auto problem = constant_two_regime(1.0, 2.0, 0.5, 0.5);
        const auto rep = validate_monotonicity(problem, domain_samples(0.0, 1.0, 9));
        CHECK(!rep.passed);
        CHECK(rep.certified_constant == doctest::Approx(-1.0));
    }

    SUBCASE("throwing coefficient is a model error naming the coefficient") {
        auto problem = constant_two_regime(1.0, 0.1, 0.5, 0.5);
        problem.coefficients.entries[1][0].discount = [](double) -> double {
            throw std::runtime_error("boom");
        };
        CHECK_THROWS_WITH_AS(validate_monotonicity(problem, domain_samples(0.0, 1.0, 3)),
                             doctest::Contains("discount (regime 2"), ModelError);
    }
}

TEST_CASE("triangular cost validation") {
    const auto samples = domain_samples(0.0, 1.0, 5);

    SUBCASE("constant symmetric costs: only round trips, kappa0 = 2c") {
        const auto problem = constant_two_regime(1.0, 0.0, 0.125, 0.125);
        const auto rep = validate_triangular_costs(problem.intervention, samples);
        CHECK(rep.passed);
        CHECK(rep.certified_constant == doctest::Approx(0.25));
    }

    SUBCASE("negative cost allowed when the round trip stays positive") {
        const auto problem = constant_two_regime(1.0, 0.0, 1.0, -0.5);
        const auto rep = validate_triangular_costs(problem.intervention, samples);
        CHECK(rep.passed);
        CHECK(rep.certified_constant == doctest::Approx(0.5));
    }

    SUBCASE("arbitrage loop fails") {
        const auto problem = constant_two_regime(1.0, 0.0, 1.0, -1.0);
        const auto rep = validate_triangular_costs(problem.intervention, samples);
        CHECK(!rep.passed);
        CHECK(rep.certified_constant <= 0.0);
    }

    SUBCASE("impulse variant is a usage error") {
        ImpulseSpec spec;
        spec.regimes = {{}};
        CHECK_THROWS_AS(validate_triangular_costs(InterventionSpec{spec}, samples), UsageError);
    }

    SUBCASE("property: for two regimes the condition is exactly k12 + k21 >= kappa0") {
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> cost(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double k12 = cost(rng), k21 = cost(rng);
            const auto problem = constant_two_regime(1.0, 0.0, k12, k21);
            const auto rep = validate_triangular_costs(problem.intervention, samples);
            CHECK(rep.certified_constant == doctest::Approx(k12 + k21));
            CHECK(rep.passed == (k12 + k21 > 1e-12));
        }
    }
}

TEST_CASE("strict subsolution construction") {
    const auto samples = domain_samples(0.0, 2.0, 65);

    SUBCASE("constant costs: w is constant and the margin is -c") {
        const auto problem = two_regime_switching_problem();  // c = 1/8, kappa0 = 1/4
        const auto sub = strict_subsolution(problem, 1.0 / 16.0, samples);
        CHECK(sub.passed);
        // k~ = min(c - eps, 0) = 0, so w_i = -C everywhere
        for (std::size_t s = 0; s + 1 < samples.size(); ++s) {
            CHECK(sub.values[0][s] == doctest::Approx(sub.values[0][s + 1]));
            CHECK(sub.values[0][s] == doctest::Approx(-sub.constant));
        }
        // margin w_i - (w_j + c) = -c <= -min(eps, kappa0 - eps) = -1/16
        CHECK(sub.margin == doctest::Approx(-0.125));
        CHECK(sub.required_margin == doctest::Approx(-1.0 / 16.0));
    }

    SUBCASE("margin bound holds at eps = kappa0/2 for random constant costs") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> cost(0.05, 1.0);
        for (int trial = 0; trial < 25; ++trial) {
            const auto problem = constant_two_regime(1.0, 0.1, cost(rng), cost(rng));
            const auto tri = validate_triangular_costs(problem.intervention, samples);
            REQUIRE(tri.passed);
            const double kappa0 = tri.certified_constant;
            const auto sub = strict_subsolution(problem, kappa0 / 2.0, samples);
            CHECK(sub.passed);
            CHECK(sub.margin <= -kappa0 / 2.0 + 1e-12);
        }
    }

    SUBCASE("cost below eps shows up in the subsolution pointwise") {
        // k21 = eps/2 < eps: k~_1 = k21 - eps = -eps/2, so w_1 = eps/2 - C
        const double eps = 0.2;
        const auto problem = constant_two_regime(1.0, 0.0, 1.0, eps / 2.0);
        const auto sub = strict_subsolution(problem, eps, samples);
        CHECK(sub.values[0][0] == doctest::Approx(eps / 2.0 - sub.constant));
        CHECK(sub.values[1][0] == doctest::Approx(-sub.constant));
    }

    SUBCASE("eps outside (0, kappa0) is a parameter error") {
        const auto problem = two_regime_switching_problem();
        CHECK_THROWS_AS(strict_subsolution(problem, 0.0, samples), ParameterError);
        CHECK_THROWS_AS(strict_subsolution(problem, 0.3, samples), ParameterError);
    }
}
