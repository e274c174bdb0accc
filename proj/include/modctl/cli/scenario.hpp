#pragma once

#include <array>
#include <optional>
#include <string>

#include "modctl/dynamics.hpp"
#include "modctl/incentives.hpp"

namespace modctl::cli {

enum class Scenario { Warmup, Spook, QccSpook, QccHat };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioSpec {
  Scenario scenario = Scenario::Warmup;
  std::string incentive = "elliptical";
  double mu = 0.5;
  double c = 1.0;
  int k = 1;
  int samples = 1001;
  double tol = 1e-10;
};

/// Builds the incentive named in the spec; throws SolverError(Domain) for an
/// unknown name or an invalid mu.
Incentive make_incentive(const ScenarioSpec& spec);

/// Test hooks for negative controls.
struct Hooks {
  /// Relative perturbation applied to the shot parameter q0 after the
  /// reparametrized solver converges.
  double q0Perturbation = 0.0;
};

struct SolveReport {
  ScenarioSpec spec;
  std::string method;
  double duration = 0.0;
  double totalCost = 0.0;
  std::optional<double> tStar;
  std::array<double, 4> boundaryResiduals{};  // x(0), v(0), x(tf), v(tf)
  double maxConservedResidual = 0.0;
  double accelStart = 0.0;
  double accelEnd = 0.0;
  int iterations = 0;
  double wallMs = 0.0;
};

struct ScenarioResult {
  SolveReport report;
  Trajectory trajectory;
};

/// Solves one scenario and samples it at spec.samples uniform times.
/// Throws SolverError on failure.
ScenarioResult run_scenario(const ScenarioSpec& spec, const Hooks& hooks = {});

}  // namespace modctl::cli
