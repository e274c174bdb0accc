#pragma once

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "modctl/cli/scenario.hpp"

namespace modctl::cli {

struct SweepRow {
  ScenarioSpec spec;
  std::optional<SolveReport> report;
  std::string error;  // "CODE: message" when the row failed
};

/// One row per (mu, c) pair; an empty list keeps the base value. Rows run on
/// up to `jobs` threads and come back in input order.
std::vector<SweepRow> run_sweep(const ScenarioSpec& base, const std::vector<double>& mus,
                                const std::vector<double>& cs, int jobs);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_table_csv(std::ostream& out, const Table& table);

struct CompareResult {
  Table table;
  nlohmann::ordered_json summary;
};

/// Acceleration differences under the rescaled time s = c^{1/4} t / sqrt 2:
/// elliptical mu = 1 spooking against the k = 1 quadratic-cost solution, and
/// mu in {1/8, 1/4, 1/2} spooking against the c = 0 warm-up, each resampled
/// on a uniform grid over the shorter duration with monotone cubic
/// interpolation.
CompareResult compare_rescaled(double c, int samples);

enum class CheckStatus { Pass, Fail, Degenerate, Info };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct VerifyOptions {
  double q0Perturbation = 0.0;
};

std::vector<Check> run_verify(const VerifyOptions& options = {});
std::string status_name(CheckStatus s);
void print_checks(std::ostream& out, const std::vector<Check>& checks);
bool all_passed(const std::vector<Check>& checks);

}  // namespace modctl::cli
