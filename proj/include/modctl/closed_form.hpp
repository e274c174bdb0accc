#pragma once

#include <Eigen/Dense>

#include "modctl/incentives.hpp"

namespace modctl {

struct Kinematics {
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// Time-minimizing rest-to-rest transfer from 0 to 1, t in [0, 2]. The
/// acceleration is left-continuous at the switch t = 1.
Kinematics bang_bang(double t);

/// Smooth cubic x = tau^2 (3 - 2 tau), tau = t / tF, for the quadratic
/// incentive. Throws SolverError(Unsupported) for tF < sqrt 6.
Kinematics warmup_quadratic(double t, double tF);
double warmup_quadratic_cost(double tF);

/// Warm-up transfer with constant cost and initial costate lambda0 > 0.
struct WarmupSolution {
  Incentive inc = Incentive::trivial();
  double lambda0 = 0.0;
  double q = 0.0;
  double duration = 0.0;
  /// chi~(lambda0) = 1, i.e. the conserved quantity vanishes.
  bool arbitraryDuration = false;

  /// (1/q) int_lambda^lambda0 (chi~(lambda0) - chi~(|s|)) ds, by quadrature.
  double position(double lambda) const;
};

WarmupSolution warmup_general(const Incentive& inc, double lambda0);

struct WarmupEllipticalSolution {
  double mu = 0.0;
  double lambdaF = 0.0;  // sqrt(1 - mu^2), also the initial costate
  double q = 0.0;
  double duration = 0.0;

  /// Normalized position at costate lambda in [-lambdaF, lambdaF].
  double position(double lambda) const;
  /// lambda decreases linearly from lambdaF to -lambdaF.
  double lambda_at(double t) const;
  Kinematics at(double t) const;
};

/// Throws SolverError(Degenerate) at mu = 1, where q = 0 and the duration is
/// unbounded.
WarmupEllipticalSolution warmup_elliptical(double mu);

/// Coefficients of y(s) = (cosh s, sinh s) M (cos s, sin s)^T, a solution of
/// y'''' + 4 y = 0.
using BeamMatrix = Eigen::Matrix2d;

struct BeamValue {
  double y = 0.0;
  double dy = 0.0;
  double d2y = 0.0;
  double d3y = 0.0;
};

/// The M with y(0) = y0, y'(0) = v0, y''(0) = a0; m is the free parameter.
BeamMatrix beam_matrix(double y0, double v0, double a0, double m);
BeamValue beam_solution(double s, const BeamMatrix& M);

/// First root of tan s + tanh s = 0 above pi/2 (about 2.36502).
double tilde_s();

/// sqrt(c)-scaled initial data (y0, v0, m) of the beam segment that ends
/// with y = y' = 0, y'' = 2 at sFin. Requires 0 < sFin < tilde_s().
struct EndpointCoeffs {
  double y0 = 0.0;
  double v0 = 0.0;
  double m = 0.0;
};
EndpointCoeffs qcc_spook_endpoint_coeffs(double sFin);

/// Spooking with the quadratic incentive: full throttle on [0, t*], then a
/// beam segment x = 1 - y(kappa (t - t*)), kappa = c^{1/4} / sqrt 2.
struct QccSpookSolution {
  double c = 0.0;
  double sFin = 0.0;
  double tStar = 0.0;
  double tFinal = 0.0;
  double matchingResidual = 0.0;  // |sqrt c - y0 - v0^2 / 4|
  int iterations = 0;
  BeamMatrix M = BeamMatrix::Zero();  // unscaled: y = scaled / sqrt c

  /// Piecewise solution, left-continuous at t*.
  Kinematics at(double t) const;
  /// The beam branch evaluated at any t, including t <= t*.
  Kinematics beam_branch(double t) const;
  double lambda_at(double t) const;
  double lambda_dot_at(double t) const;

 private:
  friend QccSpookSolution qcc_spook_solve(double c);
  double kappa_ = 0.0;
  double alpha_ = 0.0;  // lambda on [0, t*]: c (t^2/2 - t^4/24) + alpha + beta t
  double beta_ = 0.0;
};

QccSpookSolution qcc_spook_solve(double c);

/// Arbitrary-duration members of the u^2/2 + (c/2)(1 - x)^2 problem:
/// x = 1 - y(kappa t) with y(0) = 1, y'(0) = 0, y''(0) = -2, m = 2 coth(k pi).
struct QccHatSolution {
  double c = 0.0;
  int k = 1;
  double m = 0.0;
  double duration = 0.0;
  double terminalResidual = 0.0;  // max |y|, |y'|, |y''| at s = k pi
  BeamMatrix M = BeamMatrix::Zero();

  Kinematics at(double t) const;
  double jerk_at(double t) const;
};

/// Requires 0 < c <= 1 and k >= 1.
QccHatSolution qcc_hat_solution(double c, int k);

struct QccHatCost {
  double quadrature = 0.0;
  double cothCandidate = 0.0;       // c coth(k pi)
  double twiceCothCandidate = 0.0;  // 2 c coth(k pi)
};

/// Simpson quadrature of the running cost over `samples` uniform points.
QccHatCost qcc_hat_total_cost(double c, int k, int samples = 20001);

/// Total cost of the specified-duration solution as a function of tFinal,
/// differentiated by central differences and compared with two closed forms.
struct CostDerivative {
  double tFinal = 0.0;
  double cost = 0.0;
  double finiteDifference = 0.0;
  double terminalAcceleration = 0.0;
  double printed = 0.0;  // -2 c a(tf)^2
  double derived = 0.0;  // -a(tf)^2 / 2
};

CostDerivative qcc_hat_cost_derivative(double c, double tFinal);

}  // namespace modctl
