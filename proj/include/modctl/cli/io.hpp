#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

#include "modctl/cli/scenario.hpp"
#include "modctl/error.hpp"

namespace modctl::cli {

/// "a:b:step" (inclusive, tolerant to rounding at b) or "v1,v2,...".
/// Throws SolverError(Domain) on malformed input.
std::vector<double> parse_list(const std::string& text);

/// 17 significant digits, shortest form.
std::string format_double(double v);

/// Columns t, x, v, a, lambda, lambda_dot, u, cost_density, conserved_residual.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

nlohmann::ordered_json report_to_json(const SolveReport& report);
nlohmann::ordered_json error_to_json(const SolverError& error);

/// Writes text to path, or to stdout when path is "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace modctl::cli
