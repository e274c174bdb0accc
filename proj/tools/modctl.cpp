// modctl: solve, sweep and verify moderated optimal-control scenarios.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <thread>

#include "modctl/cli/commands.hpp"
#include "modctl/cli/io.hpp"
#include "modctl/cli/scenario.hpp"
#include "modctl/error.hpp"

using namespace modctl;
using namespace modctl::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

struct Options {
  std::string scenario = "warmup";
  std::string incentive = "elliptical";
  double mu = 0.5;
  double c = 1.0;
  int k = 1;
  int samples = 1001;
  double tol = 1e-10;
  std::string out;
  std::string summary = "-";
  std::string sweepMu;
  std::string sweepC;
  unsigned seed = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double perturbQ0 = 0.0;
};

void add_scenario_flags(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario, "warmup | spook | qcc-spook | qcc-hat")
      ->check(CLI::IsMember({"warmup", "spook", "qcc-spook", "qcc-hat"}));
  app->add_option("--incentive", o.incentive, "trivial | elliptical | quadratic")
      ->check(CLI::IsMember({"trivial", "elliptical", "quadratic"}));
  app->add_option("--mu", o.mu, "elliptical moderation parameter in (0, 1]");
  app->add_option("--c", o.c, "spooking intensity");
  app->add_option("--k", o.k, "member of the quadratic-cost family");
  app->add_option("--samples", o.samples, "trajectory samples")->check(CLI::Range(2, 10'000'000));
  app->add_option("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "reserved; all solvers are deterministic");
}

ScenarioSpec to_spec(const Options& o) {
  ScenarioSpec s;
  s.scenario = parse_scenario(o.scenario);
  s.incentive = o.incentive;
  s.mu = o.mu;
  s.c = o.c;
  s.k = o.k;
  s.samples = o.samples;
  s.tol = o.tol;
  return s;
}

int report_error(const SolverError& e, const std::string& summaryPath) {
  const std::string text = error_to_json(e).dump(2) + "\n";
  if (!summaryPath.empty() && summaryPath != "-") {
    try {
      write_text(summaryPath, text);
    } catch (const std::exception&) {
    }
  }
  std::cerr << text;
  return kExitSolver;
}

int cmd_solve(const Options& o) {
  try {
    const ScenarioResult r = run_scenario(to_spec(o));
    if (!o.out.empty()) {
      std::ostringstream csv;
      write_trajectory_csv(csv, r.trajectory);
      write_text(o.out, csv.str());
    }
    write_text(o.summary, report_to_json(r.report).dump(2) + "\n");
    return kExitOk;
  } catch (const SolverError& e) {
    return report_error(e, o.summary);
  }
}

int cmd_sweep(const Options& o) {
  std::vector<double> mus, cs;
  try {
    if (!o.sweepMu.empty()) mus = parse_list(o.sweepMu);
    if (!o.sweepC.empty()) cs = parse_list(o.sweepC);
  } catch (const SolverError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const ScenarioSpec base = to_spec(o);
    const auto rows = run_sweep(base, mus, cs, o.jobs);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text(o.out.empty() ? "-" : o.out, csv.str());
    return kExitOk;
  } catch (const SolverError& e) {
    return report_error(e, "");
  }
}

int cmd_compare(const Options& o) {
  try {
    const CompareResult r = compare_rescaled(o.c, o.samples);
    std::ostringstream csv;
    write_table_csv(csv, r.table);
    write_text(o.out.empty() ? "-" : o.out, csv.str());
    if (!o.out.empty()) write_text(o.summary, r.summary.dump(2) + "\n");
    return kExitOk;
  } catch (const SolverError& e) {
    return report_error(e, o.summary);
  }
}

int cmd_verify(const Options& o) {
  VerifyOptions vo;
  vo.q0Perturbation = o.perturbQ0;
  const auto checks = run_verify(vo);
  print_checks(std::cout, checks);
  return all_passed(checks) ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moderated optimal control: synthesis solvers and reference solutions"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "solve one scenario; write CSV trajectory and JSON summary");
  add_scenario_flags(solve, o);
  solve->add_option("--out", o.out, "trajectory CSV path ('-' for stdout)");
  solve->add_option("--summary", o.summary, "summary JSON path ('-' for stdout)");

  auto* sweep = app.add_subcommand("sweep", "tabulate a scenario over mu and c");
  add_scenario_flags(sweep, o);
  sweep->add_option("--sweep-mu", o.sweepMu, "a:b:step or comma list");
  sweep->add_option("--sweep-c", o.sweepC, "a:b:step or comma list");
  sweep->add_option("--jobs", o.jobs, "parallel rows")->check(CLI::PositiveNumber);
  sweep->add_option("--out", o.out, "table CSV path (default stdout)");

  auto* compare = app.add_subcommand("compare-rescaled", "acceleration differences in rescaled time");
  compare->add_option("--c", o.c, "spooking intensity")->required();
  compare->add_option("--samples", o.samples, "grid points")->check(CLI::Range(4, 10'000'000));
  compare->add_option("--out", o.out, "CSV path (default stdout)");
  compare->add_option("--summary", o.summary, "summary JSON path, written when --out is given");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--perturb-q0", o.perturbQ0, "relative q0 perturbation (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*compare) return cmd_compare(o);
    if (*verify) return cmd_verify(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
