#include "modctl/cli/scenario.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "modctl/closed_form.hpp"
#include "modctl/error.hpp"
#include "modctl/reparam.hpp"

namespace modctl::cli {

namespace {

struct Sample {
  double x, v, lambda, lambdaDot;
};

Trajectory sample_closed_form(double duration, int n, const std::function<Sample(double)>& f) {
  Trajectory traj;
  traj.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = i == n - 1 ? duration : duration * static_cast<double>(i) / (n - 1);
    const Sample s = f(t);
    TrajectorySample out;
    out.t = t;
    out.state = PhaseState::zeros(2, 1);
    out.state.x[0][0] = s.x;
    out.state.x[1][0] = s.v;
    out.state.lambda[0][0] = s.lambda;
    out.state.lambda[1][0] = s.lambdaDot;
    traj.samples.push_back(std::move(out));
  }
  return traj;
}

void fill_report(SolveReport& r, const Trajectory& traj, double x0, double xf) {
  const auto& a = traj.samples.front();
  const auto& b = traj.samples.back();
  r.duration = traj.duration;
  r.totalCost = traj.totalCost;
  r.boundaryResiduals = {std::abs(a.state.x[0][0] - x0), std::abs(a.state.x[1][0]),
                         std::abs(b.state.x[0][0] - xf), std::abs(b.state.x[1][0])};
  r.maxConservedResidual = 0.0;
  for (const auto& s : traj.samples) {
    r.maxConservedResidual = std::max(r.maxConservedResidual, std::abs(s.conservedResidual));
  }
  r.accelStart = a.u[0];
  r.accelEnd = b.u[0];
}

ReparamConfig reparam_config(const ScenarioSpec& spec) {
  ReparamConfig cfg;
  cfg.integrator.relTol = 0.1 * spec.tol;
  cfg.integrator.absTol = 1e-3 * spec.tol;
  return cfg;
}

TerminalShootingConfig terminal_config(const ScenarioSpec& spec) {
  TerminalShootingConfig cfg;
  cfg.integrator.relTol = 1e-2 * spec.tol;
  cfg.integrator.absTol = 1e-4 * spec.tol;
  return cfg;
}

// Reparametrized solve, or terminal shooting when the costate cannot be monotone.
Trajectory solve_rest_to_rest(const ScenarioSpec& spec, const ReparamProblem& p, const Hooks& hooks,
                              SolveReport& report) {
  if (p.lambdaF != 0.0) {
    try {
      const ReparamSolution sol = solve_reparam(p, reparam_config(spec));
      report.iterations = sol.shots;
      if (hooks.q0Perturbation == 0.0) {
        report.method = "reparam-shooting";
        return to_trajectory(sol, spec.samples);
      }
      report.method = "reparam-shooting (perturbed q0)";
      const ControlledSystem sys{2, 1, p.cost};
      PhaseState s0 = PhaseState::zeros(2, 1);
      s0.x[0][0] = p.x0;
      s0.lambda[0][0] = p.lambda0;
      s0.lambda[1][0] = p.direction() * std::sqrt(sol.q0 * (1.0 + hooks.q0Perturbation));
      return integrate_hamiltonian(sys, p.inc, s0, sol.duration, spec.samples,
                                   reparam_config(spec).integrator);
    } catch (const SolverError& e) {
      if (e.code() != ErrorCode::NoBracket) throw;
    }
  }
  const TerminalShotSolution sol = solve_terminal_shooting(p, terminal_config(spec));
  report.iterations = sol.shots;
  report.method = "terminal-shooting";
  return to_trajectory(sol, spec.samples, terminal_config(spec).integrator);
}

Trajectory qcc_spook_trajectory(const ScenarioSpec& spec, SolveReport& report) {
  const QccSpookSolution sol = qcc_spook_solve(spec.c);
  report.method = "closed-form";
  report.iterations = sol.iterations;
  report.tStar = sol.tStar;
  Trajectory traj = sample_closed_form(sol.tFinal, spec.samples, [&](double t) {
    const Kinematics k = sol.at(t);
    return Sample{k.x, k.v, sol.lambda_at(t), sol.lambda_dot_at(t)};
  });
  finalize_trajectory(traj, ControlledSystem{2, 1, PositionCost::spook(spec.c)}, Incentive::quadratic());
  return traj;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "warmup") return Scenario::Warmup;
  if (name == "spook") return Scenario::Spook;
  if (name == "qcc-spook") return Scenario::QccSpook;
  if (name == "qcc-hat") return Scenario::QccHat;
  throw SolverError(ErrorCode::Domain, "unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Warmup:
      return "warmup";
    case Scenario::Spook:
      return "spook";
    case Scenario::QccSpook:
      return "qcc-spook";
    case Scenario::QccHat:
      return "qcc-hat";
  }
  return "unknown";
}

Incentive make_incentive(const ScenarioSpec& spec) {
  if (spec.incentive == "trivial") return Incentive::trivial();
  if (spec.incentive == "elliptical") return Incentive::elliptical(spec.mu);
  if (spec.incentive == "quadratic") return Incentive::quadratic();
  throw SolverError(ErrorCode::Domain, "unknown incentive '" + spec.incentive + "'");
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const Hooks& hooks) {
  if (spec.samples < 2) throw SolverError(ErrorCode::Domain, "samples must be >= 2");
  if (!(spec.tol > 0.0)) throw SolverError(ErrorCode::Domain, "tol must be positive");
  const auto start = std::chrono::steady_clock::now();

  ScenarioResult result;
  SolveReport& report = result.report;
  report.spec = spec;
  Trajectory traj;

  switch (spec.scenario) {
    case Scenario::Warmup: {
      const Incentive inc = make_incentive(spec);
      const ControlledSystem sys{2, 1, PositionCost::constant()};
      if (inc.kind() == IncentiveKind::Trivial) {
        report.method = "closed-form";
        traj = sample_closed_form(2.0, spec.samples, [](double t) {
          const Kinematics k = bang_bang(t);
          return Sample{k.x, k.v, 1.0 - t, -1.0};
        });
        finalize_trajectory(traj, sys, inc);
      } else if (inc.kind() == IncentiveKind::QuadraticPoly) {
        report.method = "closed-form";
        const double tf = std::sqrt(6.0);
        traj = sample_closed_form(tf, spec.samples, [tf](double t) {
          const Kinematics k = warmup_quadratic(t, tf);
          return Sample{k.x, k.v, k.a, -12.0 / (tf * tf * tf)};
        });
        finalize_trajectory(traj, sys, inc);
      } else {
        traj = solve_rest_to_rest(spec, arbitrary_duration_problem(sys.cost, inc), hooks, report);
      }
      fill_report(report, traj, 0.0, 1.0);
      break;
    }
    case Scenario::Spook: {
      const Incentive inc = make_incentive(spec);
      if (inc.kind() == IncentiveKind::QuadraticPoly) {
        traj = qcc_spook_trajectory(spec, report);
      } else {
        const PositionCost cost = PositionCost::spook(spec.c);
        traj = solve_rest_to_rest(spec, arbitrary_duration_problem(cost, inc), hooks, report);
      }
      fill_report(report, traj, 0.0, 1.0);
      break;
    }
    case Scenario::QccSpook: {
      result.report.spec.incentive = "quadratic";
      traj = qcc_spook_trajectory(spec, report);
      fill_report(report, traj, 0.0, 1.0);
      break;
    }
    case Scenario::QccHat: {
      result.report.spec.incentive = "quadratic";
      const QccHatSolution sol = qcc_hat_solution(spec.c, spec.k);
      report.method = "closed-form";
      traj = sample_closed_form(sol.duration, spec.samples, [&](double t) {
        const Kinematics k = sol.at(t);
        return Sample{k.x, k.v, k.a, sol.jerk_at(t)};
      });
      // Running cost u^2/2 + (c/2)(1 - x)^2; the Hamiltonian of this cost is
      // the moderated one shifted by 1/2.
      const ControlledSystem sys{2, 1, PositionCost::spook(spec.c)};
      const Incentive inc = Incentive::quadratic();
      for (auto& s : traj.samples) {
        s.u = potential_gradient(inc, s.state.lambda[0]).u;
        const double a = s.u[0];
        const double e = 1.0 - s.state.x[0][0];
        s.costDensity = 0.5 * a * a + 0.5 * spec.c * e * e;
        s.conservedResidual = conserved_quantity(sys, inc, s.state) + 0.5;
      }
      traj.duration = sol.duration;
      traj.totalCost = total_cost(traj);
      fill_report(report, traj, 0.0, 1.0);
      break;
    }
  }

  result.trajectory = std::move(traj);
  report.wallMs =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace modctl::cli
