#ifndef HJBQVI_REPORT_IO_HPP
#define HJBQVI_REPORT_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hjbqvi/solvers.hpp"

namespace hjbqvi {

/// SolveReport as a JSON document; the solution vector is emitted every
/// `solution_stride` entries (0 omits it entirely).
std::string solve_report_to_json(const SolveReport& report, std::size_t solution_stride = 1);

/// Residual history as CSV rows (iteration, criterion value).
void write_residual_history_csv(const SolveReport& report, std::ostream& os);

/// '%.9g': value columns, matching the experiment tables' 8-significant-digit
/// reporting.
std::string format_value(double v);

/// '%.3e': error columns.
std::string format_error(double v);

/// '%.17g': bit-exact round-trip formatting for system exports.
std::string format_exact(double v);

/// FNV-1a 64-bit hash; stamps every emitted table row with its config.
std::uint64_t fnv1a_hash(std::string_view text);

}  // namespace hjbqvi

#endif  // HJBQVI_REPORT_IO_HPP
