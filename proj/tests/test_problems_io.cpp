#include <doctest.h>

#include <sstream>

#include "hjbqvi/problems.hpp"
#include "hjbqvi/report_io.hpp"
#include "hjbqvi/solvers.hpp"

using namespace hjbqvi;

TEST_CASE("problem JSON loading") {
    SUBCASE("two-regime family with experiment parameters") {
        const auto problem = load_problem_json_text(R"({
            "name": "two_regime_switching",
            "params": {"r": 0.02, "mu": 0.06, "sigma": 0.2, "c": 0.125}
        })");
        CHECK(problem.regime_count == 2);
        CHECK(problem.orientation == Orientation::Min);
        CHECK(problem.x_hi == 2.0);
        // reward hat function
        CHECK(problem.coefficients.entries[0][0].reward(1.0) == doctest::Approx(0.5));
        CHECK(problem.coefficients.entries[0][0].reward(0.25) == 0.0);
        const auto* costs = std::get_if<SwitchingCosts>(&problem.intervention);
        REQUIRE(costs != nullptr);
        CHECK(costs->eval(0, 1, 1.3) == doctest::Approx(0.125));
    }

    SUBCASE("constant-coefficient family") {
        const auto problem = load_problem_json_text(R"({
            "name": "constant_coefficients",
            "params": {
                "regimes": 2,
                "sigma": [0.1, 0.2],
                "drift": [0.5, -0.5],
                "discount": [1.0, 1.0],
                "reward_coeffs": [[1.0], [0.0, 2.0]],
                "switch_cost": [[0.0, 0.5], [0.5, 0.0]],
                "boundary_values": [0.0, 0.0],
                "x_hi": 1.0,
                "orientation": "max"
            }
        })");
        CHECK(problem.regime_count == 2);
        CHECK(problem.coefficients.entries[1][0].reward(3.0) == doctest::Approx(6.0));
    }

    SUBCASE("errors carry the JSON path") {
        CHECK_THROWS_WITH_AS(load_problem_json_text("{}"), doctest::Contains("/name"),
                             ConfigError);
        CHECK_THROWS_WITH_AS(load_problem_json_text(R"({"name": "nope"})"),
                             doctest::Contains("unknown problem family"), ConfigError);
        CHECK_THROWS_WITH_AS(
            load_problem_json_text(
                R"({"name": "constant_coefficients", "params": {"regimes": 2, "sigma": [0.1]}})"),
            doctest::Contains("/params/sigma"), ConfigError);
        CHECK_THROWS_AS(load_problem_json_text("{not json"), ConfigError);
    }
}

TEST_CASE("report serialization") {
    const auto sys = assemble(two_regime_switching_problem(), Grid1D::dyadic(0.0, 2.0, 4));
    const auto rep =
        solve_penalized(sys, 100.0, InitialVector{initial_guess_continuation_value(sys)}, {});

    SUBCASE("JSON carries status, iterations and the strided solution") {
        const auto text = solve_report_to_json(rep, 8);
        CHECK(text.find("\"status\": \"Converged\"") != std::string::npos);
        CHECK(text.find("\"iterations\"") != std::string::npos);
        CHECK(text.find("\"solution_stride\": 8") != std::string::npos);
        const auto none = solve_report_to_json(rep, 0);
        CHECK(none.find("\"solution\"") == std::string::npos);
    }

    SUBCASE("residual history CSV has one row per iteration") {
        std::ostringstream os;
        write_residual_history_csv(rep, os);
        std::size_t lines = 0;
        for (char ch : os.str()) lines += ch == '\n';
        CHECK(lines == rep.iterations + 1);  // header + rows
    }
}

TEST_CASE("formatting helpers") {
    CHECK(format_value(6.9339733111) == "6.93397331");
    CHECK(format_error(2.468e-5) == "2.468e-05");
    CHECK(format_exact(0.1) == "0.10000000000000001");
    CHECK(fnv1a_hash("abc") == fnv1a_hash("abc"));
    CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
}
