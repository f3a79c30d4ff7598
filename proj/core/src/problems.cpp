#include "hjbqvi/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hjbqvi {

SwitchingProblem two_regime_switching_problem(const TwoRegimeParams& p) {
    if (!(p.r > 0.0)) throw ParameterError("two-regime model requires r > 0");
    SwitchingProblem problem;
    problem.regime_count = 2;
    problem.orientation = Orientation::Min;
    problem.x_lo = 0.0;
    problem.x_hi = p.x_hi;
    problem.boundary_values = {0.0, 0.0};
    problem.control_grid = {{0.0}, {0.0}};  // no continuous control
    problem.name = "two_regime_switching";

    const double r = p.r, mu = p.mu, sigma = p.sigma;
    const auto reward = [](double x) {
        return std::abs(x - 1.0) <= 0.5 ? 0.5 - std::abs(x - 1.0) : 0.0;
    };

    // regime 1 holds the riskless asset (nu = 0): fully degenerate first-order
    RegimeControlCoefficients regime1;
    regime1.sigma = [](double) { return 0.0; };
    regime1.drift = [r](double x) { return r * x; };
    regime1.discount = [r](double) { return r; };
    regime1.reward = reward;

    // regime 2 holds the risky asset (nu = 1)
    RegimeControlCoefficients regime2;
    regime2.sigma = [sigma](double x) { return sigma * x; };
    regime2.drift = [mu](double x) { return mu * x; };
    regime2.discount = [r](double) { return r; };
    regime2.reward = reward;

    problem.coefficients.entries = {{regime1}, {regime2}};

    const double c = p.switch_cost;
    SwitchingCosts costs;
    costs.cost = {{nullptr, [c](double) { return c; }},
                  {[c](double) { return c; }, nullptr}};
    problem.intervention = costs;
    return problem;
}

SwitchingProblem constant_coefficient_problem(const ConstantProblemParams& p) {
    SwitchingProblem problem;
    problem.regime_count = p.regimes;
    problem.orientation = p.orientation;
    problem.x_lo = 0.0;
    problem.x_hi = p.x_hi;
    problem.boundary_values = p.boundary_values;
    problem.name = "constant_coefficients";

    problem.coefficients.entries.resize(p.regimes);
    problem.control_grid.assign(p.regimes, {0.0});
    for (std::size_t i = 0; i < p.regimes; ++i) {
        const double s = p.sigma.at(i);
        const double b = p.drift.at(i);
        const double c = p.discount.at(i);
        const auto poly = p.reward_coeffs.at(i);
        RegimeControlCoefficients cf;
        cf.sigma = [s](double x) { return s * x; };
        cf.drift = [b](double x) { return b * x; };
        cf.discount = [c](double) { return c; };
        cf.reward = [poly](double x) {
            double acc = 0.0;
            for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
            return acc;
        };
        cf.coupling.resize(p.regimes);
        for (std::size_t j = 0; j < p.regimes; ++j) {
            if (j == i) continue;
            const double d = p.coupling.empty() ? 0.0 : p.coupling.at(i).at(j);
            if (d != 0.0) cf.coupling[j] = [d](double) { return d; };
        }
        problem.coefficients.entries[i] = {std::move(cf)};
    }

    SwitchingCosts costs;
    costs.cost.assign(p.regimes, std::vector<ScalarField>(p.regimes));
    for (std::size_t i = 0; i < p.regimes; ++i) {
        for (std::size_t j = 0; j < p.regimes; ++j) {
            if (i == j) continue;
            const double k = p.switch_cost.at(i).at(j);
            costs.cost[i][j] = [k](double) { return k; };
        }
    }
    problem.intervention = costs;
    return problem;
}

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw ConfigError("problem config: " + path + ": " + what);
}

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) config_fail(path + "/" + key, "missing required number");
    if (!j[key].is_number()) config_fail(path + "/" + key, "expected a number");
    return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j[key].get<double>() : fallback;
}

SwitchingProblem load_from_json(const json& j) {
    if (!j.is_object()) config_fail("/", "expected an object");
    if (!j.contains("name") || !j["name"].is_string()) {
        config_fail("/name", "missing built-in problem family name");
    }
    const std::string name = j["name"].get<std::string>();
    const json params = j.value("params", json::object());

    if (name == "two_regime_switching") {
        TwoRegimeParams p;
        p.r = number_or(params, "r", p.r);
        p.mu = number_or(params, "mu", p.mu);
        p.sigma = number_or(params, "sigma", p.sigma);
        p.switch_cost = number_or(params, "c", p.switch_cost);
        p.x_hi = number_or(params, "x_hi", p.x_hi);
        return two_regime_switching_problem(p);
    }
    if (name == "constant_coefficients") {
        ConstantProblemParams p;
        if (!params.contains("regimes")) config_fail("/params/regimes", "missing regime count");
        p.regimes = params["regimes"].get<std::size_t>();
        if (p.regimes < 1) config_fail("/params/regimes", "must be >= 1");
        const auto get_vec = [&](const char* key, std::vector<double>& out) {
            if (!params.contains(key) || !params[key].is_array() ||
                params[key].size() != p.regimes) {
                config_fail(std::string("/params/") + key,
                            "expected an array with one entry per regime");
            }
            out = params[key].get<std::vector<double>>();
        };
        get_vec("sigma", p.sigma);
        get_vec("drift", p.drift);
        get_vec("discount", p.discount);
        get_vec("boundary_values", p.boundary_values);
        p.x_hi = require_number(params, "/params", "x_hi");
        if (params.contains("coupling")) {
            p.coupling = params["coupling"].get<std::vector<std::vector<double>>>();
        }
        if (!params.contains("reward_coeffs")) {
            config_fail("/params/reward_coeffs", "missing reward polynomials");
        }
        p.reward_coeffs = params["reward_coeffs"].get<std::vector<std::vector<double>>>();
        if (!params.contains("switch_cost")) {
            config_fail("/params/switch_cost", "missing switching cost matrix");
        }
        p.switch_cost = params["switch_cost"].get<std::vector<std::vector<double>>>();
        const std::string orientation = params.value("orientation", "max");
        if (orientation == "max") {
            p.orientation = Orientation::Max;
        } else if (orientation == "min") {
            p.orientation = Orientation::Min;
        } else {
            config_fail("/params/orientation", "expected \"max\" or \"min\"");
        }
        return constant_coefficient_problem(p);
    }
    config_fail("/name", "unknown problem family '" + name + "'");
}

}  // namespace

SwitchingProblem load_problem_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("problem config: invalid JSON: ") + e.what());
    }
    try {
        return load_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("problem config: ") + e.what());
    }
}

SwitchingProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("problem config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_problem_json_text(ss.str());
}

}  // namespace hjbqvi
