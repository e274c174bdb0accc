#include "modctl/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "modctl/error.hpp"

namespace modctl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// lambda values strictly inside the span where chi~(|lambda|) loses smoothness.
std::vector<double> breakpoints(const ReparamProblem& p) {
  const double lo = std::min(p.lambda0, p.lambdaF);
  const double hi = std::max(p.lambda0, p.lambdaF);
  std::vector<double> out;
  for (double kink : p.inc.kinks()) {
    for (double b : {kink, -kink}) {
      if (b > lo && b < hi && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end());
  if (p.direction() < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

numerics::VectorField flat_field(const ReparamProblem& p) {
  return [&p](const numerics::State& y, numerics::State& dydt, double lambda) {
    const ReparamDerivative d = reparam_field(p, lambda, y[0], y[1]);
    dydt[0] = d.dr;
    dydt[1] = d.dq;
  };
}

struct ShotOutcome {
  bool ok = false;
  numerics::State end;
  std::vector<double> nodes;
  std::vector<numerics::State> states;
};

// Integrates (r, q) across lambda, segment by segment between breakpoints.
// Grid nodes (if any) are reported in order.
ShotOutcome run_shot(const ReparamProblem& p, double q0, const numerics::IntegratorConfig& icfg,
                     const std::vector<double>& grid) {
  ShotOutcome out;
  const double dir = p.direction();
  numerics::State y{p.x0, q0};
  const double qFloor = 1e-12 * std::max(1.0, q0);
  numerics::IntegrateOptions opts;
  opts.guard = [qFloor](double, const numerics::State& s) {
    return s[1] > qFloor && std::abs(s[0]) < 1e8;
  };

  std::vector<double> cuts = breakpoints(p);
  cuts.push_back(p.lambdaF);
  const auto field = flat_field(p);
  double a = p.lambda0;
  std::size_t nextNode = 0;
  try {
    for (std::size_t seg = 0; seg < cuts.size(); ++seg) {
      const double b = cuts[seg];
      const bool last = seg + 1 == cuts.size();
      opts.outputTimes.clear();
      while (nextNode < grid.size() && (last || dir * (grid[nextNode] - b) <= 0.0)) {
        opts.outputTimes.push_back(grid[nextNode++]);
      }
      // Nodes sitting exactly on the left end are reported by the previous segment.
      const auto res = numerics::integrate(field, y, a, b, icfg, opts);
      if (res.status != numerics::Termination::Completed) return out;
      out.nodes.insert(out.nodes.end(), res.times.begin(), res.times.end());
      out.states.insert(out.states.end(), res.states.begin(), res.states.end());
      y = res.y;
      a = b;
    }
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::StepLimit || e.code() == ErrorCode::NonFinite ||
        e.code() == ErrorCode::Domain) {
      return out;
    }
    throw;
  }
  out.ok = true;
  out.end = y;
  return out;
}

std::vector<double> uniform_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  g.back() = b;
  return g;
}

}  // namespace

void ReparamProblem::validate() const {
  if (lambda0 == lambdaF) {
    throw SolverError(ErrorCode::Degenerate, "lambda0 and lambdaF coincide");
  }
  if (!std::isfinite(lambda0) || !std::isfinite(lambdaF) || !std::isfinite(x0) || !std::isfinite(xf)) {
    throw SolverError(ErrorCode::Domain, "non-finite boundary data");
  }
}

BoundaryLambdas boundary_lambdas(const PositionCost& cost, const Incentive& inc, double x0, double xf) {
  BoundaryLambdas out;
  out.lambda0 = potential_inverse(inc, cost.value(x0));
  out.lambdaF = -potential_inverse(inc, cost.value(xf));
  if (out.lambda0 == 0.0 && out.lambdaF == 0.0) {
    throw SolverError(ErrorCode::Degenerate,
                      "costate boundary values vanish; the arbitrary-duration solution has "
                      "unbounded duration");
  }
  return out;
}

ReparamProblem arbitrary_duration_problem(const PositionCost& cost, const Incentive& inc, double x0,
                                          double xf) {
  const BoundaryLambdas bl = boundary_lambdas(cost, inc, x0, xf);
  ReparamProblem p;
  p.cost = cost;
  p.inc = inc;
  p.x0 = x0;
  p.xf = xf;
  p.lambda0 = bl.lambda0;
  p.lambdaF = bl.lambdaF;
  return p;
}

ReparamDerivative reparam_field(const ReparamProblem& problem, double lambda, double r, double q) {
  if (!(q > 0.0)) {
    std::ostringstream os;
    os << "reparametrized field requires q > 0, got q = " << q << " at lambda = " << lambda;
    throw SolverError(ErrorCode::Domain, os.str());
  }
  const double chi = potential(problem.inc, std::abs(lambda));
  return {(chi + problem.hConst - problem.cost.value(r)) / q, -2.0 * problem.cost.gradient(r)};
}

ReparamSolution solve_reparam(const ReparamProblem& problem, const ReparamConfig& cfg) {
  problem.validate();
  if (cfg.gridPoints < 3 || cfg.gridPoints % 2 == 0) {
    throw SolverError(ErrorCode::Domain, "gridPoints must be odd and >= 3");
  }

  auto residual = [&](double q0) {
    const ShotOutcome shot = run_shot(problem, q0, cfg.integrator, {});
    return shot.ok ? shot.end[0] - problem.xf : kNaN;
  };
  numerics::ShootConfig scfg;
  scfg.scanPoints = cfg.scanPoints;
  scfg.logScan = true;
  scfg.root = cfg.root;
  const numerics::ShotResult hit = numerics::shoot(residual, cfg.q0Lo, cfg.q0Hi, scfg);

  ReparamSolution sol;
  sol.problem = problem;
  sol.q0 = hit.parameter;
  sol.shots = hit.evaluations;
  sol.lambdaGrid = uniform_grid(problem.lambda0, problem.lambdaF, cfg.gridPoints);

  const ShotOutcome dense = run_shot(problem, sol.q0, cfg.integrator, sol.lambdaGrid);
  if (!dense.ok || dense.states.size() != sol.lambdaGrid.size()) {
    throw SolverError(ErrorCode::NonFinite, "dense pass of the converged shot failed");
  }
  sol.endpointResidual = std::abs(dense.end[0] - problem.xf);
  if (sol.endpointResidual > cfg.endpointTol) {
    std::ostringstream os;
    os << "shooting converged to q0 = " << sol.q0 << " but |r(lambdaF) - xf| = "
       << sol.endpointResidual;
    throw SolverError(ErrorCode::IterationLimit, os.str());
  }

  sol.rProfile.reserve(dense.states.size());
  sol.qProfile.reserve(dense.states.size());
  const double rMin = std::min(problem.x0, problem.xf) - 1e-7;
  const double rMax = std::max(problem.x0, problem.xf) + 1e-7;
  for (const auto& s : dense.states) {
    sol.rProfile.push_back(s[0]);
    sol.qProfile.push_back(s[1]);
    if (s[0] < rMin || s[0] > rMax) sol.monotone = false;
  }

  const TimeMap tm = recover_time(sol);
  sol.timeMap = tm.t;
  sol.duration = tm.duration;
  return sol;
}

TimeMap recover_time(const ReparamSolution& sol) {
  const auto& grid = sol.lambdaGrid;
  if (grid.size() < 2 || sol.qProfile.size() != grid.size()) {
    throw SolverError(ErrorCode::Domain, "solution profiles are missing");
  }
  std::vector<double> integrand;
  integrand.reserve(grid.size());
  for (double q : sol.qProfile) {
    if (!(q > 0.0)) throw SolverError(ErrorCode::Domain, "q must stay positive along the profile");
    integrand.push_back(1.0 / std::sqrt(q));
  }
  const double h = std::abs(grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  TimeMap tm;
  tm.t = numerics::cumulative_simpson(integrand, h);
  tm.duration = tm.t.back();
  return tm;
}

Trajectory to_trajectory(const ReparamSolution& sol, int nSamples) {
  if (nSamples < 2) throw SolverError(ErrorCode::Domain, "need at least two samples");
  const ReparamProblem& p = sol.problem;
  const std::size_t n = sol.lambdaGrid.size();
  const double dir = p.direction();

  // Hermite interpolants in the increasing variable s = dir * lambda, using the
  // exact field derivatives at the nodes.
  std::vector<double> s(n), r(n), dr(n), q(n), dq(n), t(n), dt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = sol.lambdaGrid[i];
    const ReparamDerivative d = reparam_field(p, lambda, sol.rProfile[i], sol.qProfile[i]);
    s[i] = dir * lambda;
    r[i] = sol.rProfile[i];
    dr[i] = dir * d.dr;
    q[i] = sol.qProfile[i];
    dq[i] = dir * d.dq;
    t[i] = sol.timeMap[i];
    dt[i] = 1.0 / std::sqrt(sol.qProfile[i]);
  }
  const std::vector<double> sNodes = s;
  const std::vector<double> tNodes = t;
  using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;
  Hermite rOf(std::vector<double>(s), std::move(r), std::move(dr));
  Hermite qOf(std::vector<double>(s), std::move(q), std::move(dq));
  Hermite tOf(std::move(s), std::move(t), std::move(dt));

  const ControlledSystem sys{2, 1, p.cost};
  Trajectory traj;
  traj.samples.reserve(nSamples);
  for (int i = 0; i < nSamples; ++i) {
    const double time = sol.duration * static_cast<double>(i) / (nSamples - 1);
    double sv;
    if (i == 0) {
      sv = sNodes.front();
    } else if (i == nSamples - 1) {
      sv = sNodes.back();
    } else {
      auto it = std::upper_bound(tNodes.begin(), tNodes.end(), time);
      const std::size_t j = std::clamp<std::size_t>(it - tNodes.begin(), 1, n - 1);
      sv = numerics::find_root([&](double x) { return tOf(x) - time; }, sNodes[j - 1], sNodes[j],
                               {.xTol = 1e-15})
               .x;
    }
    const double lambda = dir * sv;
    const double qv = std::max(qOf(sv), std::numeric_limits<double>::min());
    const double rv = rOf(sv);
    const double rPrime = reparam_field(p, lambda, rv, qv).dr;
    const double lambdaDot = dir * std::sqrt(qv);

    TrajectorySample sample;
    sample.t = time;
    sample.state = PhaseState::zeros(2, 1);
    sample.state.x[0][0] = rv;
    sample.state.x[1][0] = lambdaDot * rPrime;
    sample.state.lambda[0][0] = lambda;
    sample.state.lambda[1][0] = lambdaDot;
    traj.samples.push_back(std::move(sample));
  }
  finalize_trajectory(traj, sys, p.inc, -p.hConst);
  return traj;
}

namespace {

struct BackwardShot {
  bool ok = false;
  double tEvent = 0.0;
  numerics::State y;
};

BackwardShot run_backward(const ReparamProblem& p, double w, const TerminalShootingConfig& cfg) {
  const ControlledSystem sys{2, 1, p.cost};
  const auto field = make_field(sys, p.inc);
  numerics::IntegrateOptions opts;
  opts.event = numerics::Event{[](double, const numerics::State& y) { return y[1]; }, -1};
  opts.guard = [](double, const numerics::State& y) { return std::abs(y[0]) < 1e6; };
  BackwardShot out;
  try {
    const auto res = numerics::integrate(field, {p.xf, p.vf, p.lambdaF, w}, 0.0, -cfg.maxDuration,
                                         cfg.integrator, opts);
    if (res.status != numerics::Termination::Event) return out;
    out.ok = true;
    out.tEvent = res.t;
    out.y = res.y;
  } catch (const SolverError& e) {
    if (e.code() != ErrorCode::StepLimit && e.code() != ErrorCode::NonFinite) throw;
  }
  return out;
}

}  // namespace

TerminalShotSolution solve_terminal_shooting(const ReparamProblem& problem,
                                             const TerminalShootingConfig& cfg) {
  problem.validate();
  if (problem.v0 != 0.0 || problem.vf != 0.0) {
    throw SolverError(ErrorCode::Unsupported, "terminal shooting handles rest-to-rest problems");
  }
  const double sign = problem.lambdaF < 0.0 ? -1.0 : 1.0;
  auto residual = [&](double mag) {
    const BackwardShot shot = run_backward(problem, sign * mag, cfg);
    return shot.ok ? shot.y[0] - problem.x0 : kNaN;
  };
  numerics::ShootConfig scfg;
  scfg.scanPoints = cfg.scanPoints;
  scfg.logScan = true;
  scfg.root = cfg.root;
  const numerics::ShotResult hit = numerics::shoot(residual, cfg.wLo, cfg.wHi, scfg);

  const BackwardShot shot = run_backward(problem, sign * hit.parameter, cfg);
  if (!shot.ok) throw SolverError(ErrorCode::NonFinite, "converged terminal shot failed to replay");

  TerminalShotSolution sol;
  sol.problem = problem;
  sol.lambdaDotFinal = sign * hit.parameter;
  sol.duration = -shot.tEvent;
  sol.initial = unpack(shot.y, 2, 1);
  sol.endpointResidual = std::abs(shot.y[0] - problem.x0);
  sol.shots = hit.evaluations;
  if (sol.endpointResidual > cfg.endpointTol) {
    std::ostringstream os;
    os << "terminal shooting left |x(0) - x0| = " << sol.endpointResidual;
    throw SolverError(ErrorCode::IterationLimit, os.str());
  }
  return sol;
}

Trajectory to_trajectory(const TerminalShotSolution& sol, int nSamples,
                         const numerics::IntegratorConfig& cfg) {
  if (nSamples < 2) throw SolverError(ErrorCode::Domain, "need at least two samples");
  const ReparamProblem& p = sol.problem;
  const ControlledSystem sys{2, 1, p.cost};
  // Replay backwards from the terminal state, where the shot was computed.
  numerics::IntegrateOptions opts;
  opts.outputTimes.resize(nSamples);
  for (int i = 0; i < nSamples; ++i) {
    opts.outputTimes[i] = -sol.duration * static_cast<double>(i) / (nSamples - 1);
  }
  const auto res = numerics::integrate(make_field(sys, p.inc), {p.xf, p.vf, p.lambdaF, sol.lambdaDotFinal},
                                       0.0, -sol.duration, cfg, opts);
  Trajectory traj;
  traj.samples.resize(nSamples);
  for (int i = 0; i < nSamples; ++i) {
    TrajectorySample& sample = traj.samples[nSamples - 1 - i];
    sample.t = sol.duration * static_cast<double>(nSamples - 1 - i) / (nSamples - 1);
    sample.state = unpack(res.states[i], 2, 1);
  }
  finalize_trajectory(traj, sys, p.inc, -p.hConst);
  return traj;
}

}  // namespace modctl
