#include "modctl/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "modctl/error.hpp"
#include "modctl/numerics.hpp"

namespace modctl {

namespace {

using std::numbers::pi;

// Integral of f over [a, b] (either order) with Simpson panels, split at
// the given breakpoints.
double piecewise_integral(const std::function<double(double)>& f, double a, double b,
                          std::vector<double> cuts) {
  const double sign = b >= a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> nodes{lo};
  std::sort(cuts.begin(), cuts.end());
  for (double x : cuts) {
    if (x > lo && x < hi) nodes.push_back(x);
  }
  nodes.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double width = nodes[i + 1] - nodes[i];
    if (width <= 0.0) continue;
    int panels = std::max(200, static_cast<int>(std::ceil(width * 4000.0)));
    panels += panels % 2;
    total += numerics::quadrature(f, nodes[i], nodes[i + 1], panels);
  }
  return sign * total;
}

std::vector<double> symmetric_kinks(const Incentive& inc) {
  std::vector<double> out;
  for (double k : inc.kinks()) {
    out.push_back(k);
    if (k != 0.0) out.push_back(-k);
  }
  return out;
}

// Coefficients (a, b, cc, d) of cosh cos, cosh sin, sinh cos, sinh sin.
using Coeffs = Eigen::Vector4d;

Coeffs coeffs_of(const BeamMatrix& M) { return {M(0, 0), M(0, 1), M(1, 0), M(1, 1)}; }

Coeffs differentiate(const Coeffs& k) {
  return {k[1] + k[2], -k[0] + k[3], k[0] + k[3], k[1] - k[2]};
}

Eigen::Vector4d basis(double s) {
  const double ch = std::cosh(s), sh = std::sinh(s), c = std::cos(s), sn = std::sin(s);
  return {ch * c, ch * sn, sh * c, sh * sn};
}

// Derivative of the basis, so that y'(s) = dbasis(s) . coeffs.
Eigen::Vector4d dbasis(double s) {
  const double ch = std::cosh(s), sh = std::sinh(s), c = std::cos(s), sn = std::sin(s);
  return {sh * c - ch * sn, ch * c + sh * sn, ch * c - sh * sn, ch * sn + sh * c};
}

void require_time(double t, double duration) {
  if (!(t >= 0.0 && t <= duration * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << duration << "]";
    throw SolverError(ErrorCode::Domain, os.str());
  }
}

double kappa_of(double c) { return std::pow(c, 0.25) / std::numbers::sqrt2; }

}  // namespace

Kinematics bang_bang(double t) {
  require_time(t, 2.0);
  if (t <= 1.0) return {0.5 * t * t, t, 1.0};
  return {-0.5 * t * t + 2.0 * t - 1.0, 2.0 - t, -1.0};
}

Kinematics warmup_quadratic(double t, double tF) {
  if (!(tF >= std::sqrt(6.0) * (1.0 - 1e-14))) {
    throw SolverError(ErrorCode::Unsupported,
                      "durations below sqrt 6 need a saturated segment, which is not constructed");
  }
  require_time(t, tF);
  const double tau = t / tF;
  return {tau * tau * (3.0 - 2.0 * tau), 6.0 * tau * (1.0 - tau) / tF, 6.0 * (1.0 - 2.0 * tau) / (tF * tF)};
}

double warmup_quadratic_cost(double tF) {
  warmup_quadratic(0.0, tF);
  return 0.5 * tF + 6.0 / (tF * tF * tF);
}

double WarmupSolution::position(double lambda) const {
  if (std::abs(lambda) > lambda0 * (1.0 + 1e-12)) {
    throw SolverError(ErrorCode::Domain, "lambda outside [-lambda0, lambda0]");
  }
  const double top = potential(inc, lambda0);
  const Incentive incCopy = inc;
  return piecewise_integral([&](double s) { return top - potential(incCopy, std::abs(s)); }, lambda,
                            lambda0, symmetric_kinks(inc)) /
         q;
}

WarmupSolution warmup_general(const Incentive& inc, double lambda0) {
  if (!(lambda0 > 0.0)) throw SolverError(ErrorCode::Domain, "lambda0 must be positive");
  WarmupSolution sol;
  sol.inc = inc;
  sol.lambda0 = lambda0;
  const double top = potential(inc, lambda0);
  sol.q = 2.0 * piecewise_integral([&](double s) { return top - potential(inc, s); }, 0.0, lambda0,
                                   inc.kinks());
  if (!(sol.q > 0.0)) throw SolverError(ErrorCode::Degenerate, "q vanishes; the duration is unbounded");
  sol.duration = 2.0 * lambda0 / std::sqrt(sol.q);
  sol.arbitraryDuration = std::abs(top - 1.0) <= 1e-12;
  return sol;
}

WarmupEllipticalSolution warmup_elliptical(double mu) {
  const Incentive inc = Incentive::elliptical(mu);
  if (mu == 1.0) {
    throw SolverError(ErrorCode::Degenerate, "mu = 1 gives q = 0 and an unbounded duration");
  }
  WarmupEllipticalSolution sol;
  sol.mu = inc.mu();
  sol.lambdaF = std::sqrt((1.0 - mu) * (1.0 + mu));
  sol.q = sol.lambdaF + mu * mu * std::log(mu / (1.0 + sol.lambdaF));
  if (!(sol.q > 0.0)) throw SolverError(ErrorCode::Degenerate, "q underflows for mu this close to 1");
  sol.duration = 2.0 * sol.lambdaF / std::sqrt(sol.q);
  return sol;
}

double WarmupEllipticalSolution::position(double lambda) const {
  // Odd antiderivative of sqrt(mu^2 + s^2).
  auto A = [this](double l) { return 0.5 * (l * std::hypot(mu, l) + mu * mu * std::asinh(l / mu)); };
  return ((lambdaF - lambda) - (A(lambdaF) - A(lambda))) / q;
}

double WarmupEllipticalSolution::lambda_at(double t) const {
  require_time(t, duration);
  return lambdaF * (1.0 - 2.0 * t / duration);
}

Kinematics WarmupEllipticalSolution::at(double t) const {
  const double lambda = lambda_at(t);
  const double chi = std::hypot(mu, lambda);
  return {position(lambda), (1.0 - chi) / std::sqrt(q), lambda / chi};
}

BeamMatrix beam_matrix(double y0, double v0, double a0, double m) {
  BeamMatrix M;
  M << y0, 0.5 * (v0 + m), 0.5 * (v0 - m), 0.5 * a0;
  return M;
}

BeamValue beam_solution(double s, const BeamMatrix& M) {
  const Eigen::Vector4d b = basis(s);
  Coeffs k = coeffs_of(M);
  BeamValue out;
  out.y = b.dot(k);
  k = differentiate(k);
  out.dy = b.dot(k);
  k = differentiate(k);
  out.d2y = b.dot(k);
  k = differentiate(k);
  out.d3y = b.dot(k);
  return out;
}

double tilde_s() {
  static const double root =
      numerics::find_root([](double s) { return std::tan(s) + std::tanh(s); }, pi / 2 + 0.01, 3.0,
                          {.xTol = 1e-15})
          .x;
  return root;
}

EndpointCoeffs qcc_spook_endpoint_coeffs(double sFin) {
  if (!(sFin > 0.0 && sFin < tilde_s())) {
    std::ostringstream os;
    os << "sFin = " << sFin << " outside (0, " << tilde_s() << ")";
    throw SolverError(ErrorCode::Domain, os.str());
  }
  const double ch = std::cosh(sFin), sh = std::sinh(sFin), c = std::cos(sFin), sn = std::sin(sFin);
  const double D = ch * sn + c * sh;
  const double p = ch + c;
  const double r = sh - sn;
  return {p * r / D, -r * r / D, p * p / D};
}

QccSpookSolution qcc_spook_solve(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw SolverError(ErrorCode::Domain, "c must be positive");
  const double rc = std::sqrt(c);
  auto matching = [rc](double s) {
    const EndpointCoeffs k = qcc_spook_endpoint_coeffs(s);
    return k.y0 + 0.25 * k.v0 * k.v0 - rc;
  };
  const double hi = tilde_s() * (1.0 - 1e-12);
  numerics::RootResult root;
  try {
    root = numerics::find_root(matching, 1e-9, hi, {.xTol = 1e-15, .maxIter = 400});
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::NoBracket) {
      throw SolverError(ErrorCode::NoBracket, "matching condition has no root in (0, s~)");
    }
    throw;
  }

  QccSpookSolution sol;
  sol.c = c;
  sol.sFin = root.x;
  sol.iterations = root.iterations;
  sol.matchingResidual = std::abs(matching(sol.sFin));
  const EndpointCoeffs k = qcc_spook_endpoint_coeffs(sol.sFin);
  sol.kappa_ = kappa_of(c);
  sol.tStar = -k.v0 / (std::numbers::sqrt2 * std::pow(c, 0.25));
  sol.tFinal = sol.tStar + sol.sFin / sol.kappa_;
  sol.M = beam_matrix(k.y0, k.v0, -2.0, k.m) / rc;

  const double ts = sol.tStar;
  const double jerk = -std::pow(sol.kappa_, 3) * beam_solution(0.0, sol.M).d3y;
  sol.beta_ = jerk - c * (ts - ts * ts * ts / 6.0);
  sol.alpha_ = 1.0 - c * (0.5 * ts * ts - std::pow(ts, 4) / 24.0) - sol.beta_ * ts;
  return sol;
}

Kinematics QccSpookSolution::beam_branch(double t) const {
  const BeamValue y = beam_solution(kappa_ * (t - tStar), M);
  return {1.0 - y.y, -kappa_ * y.dy, -kappa_ * kappa_ * y.d2y};
}

Kinematics QccSpookSolution::at(double t) const {
  require_time(t, tFinal);
  if (t <= tStar) return {0.5 * t * t, t, 1.0};
  return beam_branch(t);
}

double QccSpookSolution::lambda_at(double t) const {
  require_time(t, tFinal);
  if (t <= tStar) return c * (0.5 * t * t - std::pow(t, 4) / 24.0) + alpha_ + beta_ * t;
  return beam_branch(t).a;
}

double QccSpookSolution::lambda_dot_at(double t) const {
  require_time(t, tFinal);
  if (t <= tStar) return c * (t - t * t * t / 6.0) + beta_;
  return -std::pow(kappa_, 3) * beam_solution(kappa_ * (t - tStar), M).d3y;
}

QccHatSolution qcc_hat_solution(double c, int k) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw SolverError(ErrorCode::Domain, "the initial acceleration sqrt(c) must not exceed 1 (0 < c <= 1)");
  }
  if (k < 1) throw SolverError(ErrorCode::Domain, "k must be a positive integer");
  QccHatSolution sol;
  sol.c = c;
  sol.k = k;
  sol.m = 2.0 / std::tanh(k * pi);
  sol.duration = std::numbers::sqrt2 * pi * k / std::pow(c, 0.25);
  sol.M = beam_matrix(1.0, 0.0, -2.0, sol.m);
  const BeamValue end = beam_solution(k * pi, sol.M);
  sol.terminalResidual = std::max({std::abs(end.y), std::abs(end.dy), std::abs(end.d2y)});
  return sol;
}

Kinematics QccHatSolution::at(double t) const {
  require_time(t, duration);
  const double kap = kappa_of(c);
  const BeamValue y = beam_solution(kap * t, M);
  return {1.0 - y.y, -kap * y.dy, -kap * kap * y.d2y};
}

double QccHatSolution::jerk_at(double t) const {
  require_time(t, duration);
  const double kap = kappa_of(c);
  return -std::pow(kap, 3) * beam_solution(kap * t, M).d3y;
}

namespace {

double hat_cost(double c, double duration, const BeamMatrix& M, int samples) {
  if (samples < 3 || samples % 2 == 0) throw SolverError(ErrorCode::Domain, "samples must be odd and >= 3");
  const double kap = kappa_of(c);
  std::vector<double> density(samples);
  const double h = duration / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const BeamValue y = beam_solution(kap * h * i, M);
    const double a = kap * kap * y.d2y;
    density[i] = 0.5 * a * a + 0.5 * c * y.y * y.y;
  }
  return numerics::simpson_uniform(density, h);
}

// y(0) = 1, y'(0) = 0, y(S) = y'(S) = 0.
BeamMatrix specified_duration_beam(double S) {
  Eigen::Matrix4d A;
  A.row(0) = basis(0.0);
  A.row(1) = dbasis(0.0);
  A.row(2) = basis(S);
  A.row(3) = dbasis(S);
  const Eigen::Vector4d rhs(1.0, 0.0, 0.0, 0.0);
  const Eigen::Vector4d k = A.fullPivLu().solve(rhs);
  BeamMatrix M;
  M << k[0], k[1], k[2], k[3];
  return M;
}

}  // namespace

QccHatCost qcc_hat_total_cost(double c, int k, int samples) {
  const QccHatSolution sol = qcc_hat_solution(c, k);
  QccHatCost out;
  out.quadrature = hat_cost(c, sol.duration, sol.M, samples);
  out.cothCandidate = c / std::tanh(k * pi);
  out.twiceCothCandidate = 2.0 * out.cothCandidate;
  return out;
}

CostDerivative qcc_hat_cost_derivative(double c, double tFinal) {
  if (!(c > 0.0)) throw SolverError(ErrorCode::Domain, "c must be positive");
  if (!(tFinal > 0.0)) throw SolverError(ErrorCode::Domain, "duration must be positive");
  const double kap = kappa_of(c);
  constexpr int samples = 20001;
  auto cost_at = [&](double T) { return hat_cost(c, T, specified_duration_beam(kap * T), samples); };
  const double h = 1e-4 * tFinal;

  CostDerivative out;
  out.tFinal = tFinal;
  out.cost = cost_at(tFinal);
  out.finiteDifference = (cost_at(tFinal + h) - cost_at(tFinal - h)) / (2.0 * h);
  const BeamMatrix M = specified_duration_beam(kap * tFinal);
  out.terminalAcceleration = -kap * kap * beam_solution(kap * tFinal, M).d2y;
  const double a2 = out.terminalAcceleration * out.terminalAcceleration;
  out.printed = -2.0 * c * a2;
  out.derived = -0.5 * a2;
  return out;
}

}  // namespace modctl
