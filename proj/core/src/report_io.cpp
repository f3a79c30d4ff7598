#include "hjbqvi/report_io.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace hjbqvi {

namespace {

std::string printf_format(const char* fmt, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

std::string format_value(double v) { return printf_format("%.9g", v); }
std::string format_error(double v) { return printf_format("%.3e", v); }
std::string format_exact(double v) { return printf_format("%.17g", v); }

std::uint64_t fnv1a_hash(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string solve_report_to_json(const SolveReport& report, std::size_t solution_stride) {
    nlohmann::json j;
    j["status"] = to_string(report.status);
    j["iterations"] = report.iterations;
    j["penalty_parameter"] = report.penalty_parameter;
    j["wall_time_seconds"] = report.wall_time_seconds;
    j["residual_history"] = report.residual_history;
    j["max_monotonicity_violation"] = report.max_monotonicity_violation;
    j["complementarity_residual"] = report.complementarity_residual;
    if (report.status == SolveStatus::SingularPolicy) {
        j["singular_iteration"] = report.singular_iteration;
    }
    if (!report.continuation_stages.empty()) {
        auto stages = nlohmann::json::array();
        for (const auto& [rho, iters] : report.continuation_stages) {
            stages.push_back({{"rho", rho}, {"iterations", iters}});
        }
        j["continuation_stages"] = stages;
    }
    if (solution_stride > 0 && !report.solution.empty()) {
        auto sol = nlohmann::json::array();
        for (std::size_t k = 0; k < report.solution.size(); k += solution_stride) {
            sol.push_back(report.solution[k]);
        }
        j["solution_stride"] = solution_stride;
        j["solution"] = sol;
    }
    return j.dump(2);
}

void write_residual_history_csv(const SolveReport& report, std::ostream& os) {
    os << "iteration,criterion\n";
    for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
        os << (k + 1) << "," << format_error(report.residual_history[k]) << "\n";
    }
}

}  // namespace hjbqvi
