#pragma once

#include <vector>

#include "modctl/dynamics.hpp"
#include "modctl/incentives.hpp"
#include "modctl/numerics.hpp"

namespace modctl {

/// One-dimensional controlled acceleration (k = 2, n = 1) written with the
/// costate lambda as the independent variable. With q = lambda_dot^2 the
/// synthesis problem becomes
///
///   q r' + C(r) - chi~(|lambda|) = hConst,   q' = -2 C'(r),
///
/// on [lambda0, lambdaF], and physical time follows from
/// lambda_dot = sgn(lambdaF - lambda0) sqrt(q).
struct ReparamProblem {
  PositionCost cost = PositionCost::constant();
  Incentive inc = Incentive::trivial();
  double x0 = 0.0;
  double xf = 1.0;
  double v0 = 0.0;
  double vf = 0.0;
  double lambda0 = 1.0;
  double lambdaF = -1.0;
  double hConst = 0.0;  // zero for the arbitrary-duration problem

  void validate() const;
  double direction() const { return lambdaF > lambda0 ? 1.0 : -1.0; }
};

struct BoundaryLambdas {
  double lambda0 = 0.0;
  double lambdaF = 0.0;
};

/// Costate boundary values for rest-to-rest arbitrary-duration problems:
/// lambda0 = +chi~^{-1}(C(x0)) (positive initial acceleration), lambdaF =
/// -chi~^{-1}(C(xf)) (a single sign change). Throws SolverError(Degenerate)
/// when both vanish.
BoundaryLambdas boundary_lambdas(const PositionCost& cost, const Incentive& inc, double x0 = 0.0,
                                 double xf = 1.0);

/// Rest-to-rest arbitrary-duration problem with boundary costates filled in.
ReparamProblem arbitrary_duration_problem(const PositionCost& cost, const Incentive& inc,
                                          double x0 = 0.0, double xf = 1.0);

struct ReparamDerivative {
  double dr = 0.0;
  double dq = 0.0;
};

/// (r', q') at lambda. Throws SolverError(Domain) for q <= 0.
ReparamDerivative reparam_field(const ReparamProblem& problem, double lambda, double r, double q);

struct ReparamConfig {
  numerics::IntegratorConfig integrator{.relTol = 1e-11, .absTol = 1e-13, .maxSteps = 200'000};
  double q0Lo = 1e-6;
  double q0Hi = 50.0;
  int scanPoints = 64;
  numerics::RootConfig root{.xTol = 1e-14, .maxIter = 300};
  /// Required |r(lambdaF) - xf| after the root finder returns.
  double endpointTol = 1e-9;
  /// Nodes of the stored lambda grid (odd, so the Simpson time map is uniform).
  int gridPoints = 4001;
};

struct ReparamSolution {
  ReparamProblem problem;
  std::vector<double> lambdaGrid;  // lambda0 -> lambdaF, uniform
  std::vector<double> rProfile;
  std::vector<double> qProfile;
  std::vector<double> timeMap;  // t(lambda) on lambdaGrid
  double q0 = 0.0;
  double duration = 0.0;
  double endpointResidual = 0.0;
  int shots = 0;
  bool monotone = true;  // r never leaves [min(x0, xf), max(x0, xf)]
};

/// Shoots on q0 = q(lambda0) (logarithmic scan of [q0Lo, q0Hi], then Brent)
/// until r(lambdaF) = xf, and stores dense profiles plus the time map.
/// Shots on which q reaches zero before lambdaF are discarded.
ReparamSolution solve_reparam(const ReparamProblem& problem, const ReparamConfig& cfg = {});

struct TimeMap {
  std::vector<double> t;
  double duration = 0.0;
};

/// t(lambda) = integral of |d lambda| / sqrt(q) along the grid (Simpson).
TimeMap recover_time(const ReparamSolution& sol);

/// Uniform-in-time samples of x = r o lambda with x_dot = sgn sqrt(q) r',
/// u = grad chi(lambda), lambda_dot = sgn sqrt(q).
Trajectory to_trajectory(const ReparamSolution& sol, int nSamples);

/// Rest-to-rest solution found by integrating the Hamiltonian system
/// backwards from the terminal state (xf, 0, lambdaF, w) and shooting on w
/// until the velocity returns to zero at x0. Needed when lambda is not
/// monotone, e.g. the elliptical mu = 1 spooking problem where lambdaF = 0.
struct TerminalShotSolution {
  ReparamProblem problem;
  double lambdaDotFinal = 0.0;
  double duration = 0.0;
  PhaseState initial;  // state at t = 0
  double endpointResidual = 0.0;
  int shots = 0;
};

struct TerminalShootingConfig {
  numerics::IntegratorConfig integrator{.relTol = 1e-12, .absTol = 1e-14, .maxSteps = 200'000};
  double wLo = 1e-6;
  double wHi = 50.0;
  int scanPoints = 64;
  double maxDuration = 200.0;
  numerics::RootConfig root{.xTol = 1e-15, .maxIter = 300};
  double endpointTol = 1e-9;
};

/// The sign of lambda_dot(tf) is negative for lambdaF < 0 (monotone costate)
/// and positive for lambdaF = 0.
TerminalShotSolution solve_terminal_shooting(const ReparamProblem& problem,
                                             const TerminalShootingConfig& cfg = {});

Trajectory to_trajectory(const TerminalShotSolution& sol, int nSamples,
                         const numerics::IntegratorConfig& cfg = {.relTol = 1e-12, .absTol = 1e-14});

}  // namespace modctl
