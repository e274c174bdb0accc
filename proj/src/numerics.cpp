#include "modctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "modctl/error.hpp"

namespace modctl::numerics {

namespace odeint = boost::numeric::odeint;

namespace {

using Stepper = odeint::runge_kutta_dopri5<State>;

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.relTol > 0.0) || !(cfg.absTol > 0.0)) {
    throw SolverError(ErrorCode::Domain, "integrator tolerances must be positive");
  }
  if (!(cfg.maxStep > 0.0)) throw SolverError(ErrorCode::Domain, "maxStep must be positive");
  if (cfg.maxSteps < 1) throw SolverError(ErrorCode::Domain, "maxSteps must be at least 1");
  if (!cfg.adaptive && !std::isfinite(cfg.maxStep)) {
    throw SolverError(ErrorCode::Domain, "fixed-step integration needs a finite maxStep");
  }
}

bool crosses(double before, double after, int direction) {
  if (before == 0.0) return false;
  const bool up = before < 0.0 && after >= 0.0;
  const bool down = before > 0.0 && after <= 0.0;
  if (direction > 0) return up;
  if (direction < 0) return down;
  return up || down;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw SolverError(ErrorCode::NonFinite, std::string(what) + " produced a non-finite value");
  }
}

}  // namespace

IntegrationResult integrate(const VectorField& field, const State& y0, double t0, double t1,
                            const IntegratorConfig& cfg, const IntegrateOptions& options) {
  validate(cfg);
  // The path is traversed in the forward variable tau = dir * (t - t0); odeint's
  // step limiter does not handle negative steps.
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  auto time_of = [&](double tau) { return tau >= span ? t1 : t0 + dir * tau; };
  auto system = [&](const State& y, State& dydt, double tau) {
    field(y, dydt, time_of(tau));
    if (dir < 0.0) {
      for (double& d : dydt) d = -d;
    }
  };

  std::vector<double> outTau;
  outTau.reserve(options.outputTimes.size());
  for (double t : options.outputTimes) {
    const double tau = dir * (t - t0);
    if (tau < -1e-12 * std::max(1.0, span) || tau > span * (1.0 + 1e-12) + 1e-300) {
      throw SolverError(ErrorCode::Domain, "output time outside the integration span");
    }
    if (!outTau.empty() && tau < outTau.back()) {
      throw SolverError(ErrorCode::Domain, "output times must follow the integration direction");
    }
    outTau.push_back(std::clamp(tau, 0.0, span));
  }

  IntegrationResult result;
  result.times.reserve(outTau.size());
  result.states.reserve(outTau.size());
  std::size_t nextOut = 0;
  auto emit_until = [&](double tauLimit, const std::function<State(double)>& stateAt) {
    while (nextOut < outTau.size() && outTau[nextOut] <= tauLimit) {
      result.times.push_back(options.outputTimes[nextOut]);
      result.states.push_back(stateAt(outTau[nextOut]));
      ++nextOut;
    }
  };

  if (span == 0.0) {
    emit_until(0.0, [&](double) { return y0; });
    result.t = t0;
    result.y = y0;
    return result;
  }

  if (!cfg.adaptive) {
    if (options.event || options.guard || !outTau.empty()) {
      throw SolverError(ErrorCode::Unsupported,
                        "fixed-step integration only reports the end state");
    }
    const long n = std::max(1L, static_cast<long>(std::ceil(span / cfg.maxStep - 1e-9)));
    if (n > cfg.maxSteps) throw SolverError(ErrorCode::StepLimit, "fixed-step run exceeds maxSteps");
    const double h = span / static_cast<double>(n);
    Stepper stepper;
    State y = y0;
    for (long i = 0; i < n; ++i) {
      stepper.do_step(system, y, static_cast<double>(i) * h, h);
    }
    result.t = t1;
    result.y = std::move(y);
    result.steps = n;
    return result;
  }

  const double maxDt = std::isfinite(cfg.maxStep) ? cfg.maxStep : 0.0;
  auto dense = odeint::make_dense_output(cfg.absTol, cfg.relTol, maxDt, Stepper());
  double dt0 = span * 1e-4;
  if (maxDt > 0.0) dt0 = std::min(dt0, maxDt);
  dense.initialize(y0, 0.0, dt0);

  State scratch(y0.size());
  auto dense_state = [&](double tau) {
    dense.calc_state(tau, scratch);
    return scratch;
  };
  emit_until(0.0, [&](double) { return y0; });

  double gPrev = 0.0;
  if (options.event) gPrev = options.event->function(t0, y0);

  while (true) {
    if (result.steps >= cfg.maxSteps) {
      std::ostringstream os;
      os << "integrator exhausted " << cfg.maxSteps << " steps at t = " << time_of(dense.current_time());
      throw SolverError(ErrorCode::StepLimit, os.str());
    }
    const auto [tauA, tauB] = dense.do_step(system);
    ++result.steps;
    for (double v : dense.current_state()) require_finite(v, "integration");

    const double tauEnd = std::min(tauB, span);
    const State& yEnd = tauB <= span ? dense.current_state() : dense_state(span);

    if (options.event) {
      const double gNow = options.event->function(time_of(tauEnd), yEnd);
      if (gPrev == 0.0) {
        gPrev = gNow;
      } else if (crosses(gPrev, gNow, options.event->direction)) {
        auto g = [&](double tau) { return options.event->function(time_of(tau), dense_state(tau)); };
        const RootResult root =
            find_root(g, tauA, tauEnd, {.xTol = 1e-15 * std::max(1.0, tauEnd), .maxIter = 200});
        emit_until(root.x, dense_state);
        result.status = Termination::Event;
        result.t = time_of(root.x);
        result.y = dense_state(root.x);
        return result;
      } else {
        gPrev = gNow;
      }
    }

    emit_until(tauEnd, dense_state);

    if (options.guard && !options.guard(time_of(tauEnd), yEnd)) {
      result.status = Termination::Guard;
      result.t = time_of(tauEnd);
      result.y = yEnd;
      return result;
    }
    if (tauB >= span) {
      result.status = Termination::Completed;
      result.t = t1;
      result.y = yEnd;
      return result;
    }
  }
}

double quadrature(const std::function<double(double)>& f, double a, double b, int nPanels) {
  if (nPanels < 2 || nPanels % 2 != 0) {
    throw SolverError(ErrorCode::Domain, "Simpson quadrature needs an even panel count >= 2");
  }
  const double h = (b - a) / nPanels;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < nPanels; ++i) {
    const double v = f(a + i * h);
    require_finite(v, "quadrature integrand");
    (i % 2 ? odd : even) += v;
  }
  const double fa = f(a);
  const double fb = f(b);
  require_finite(fa, "quadrature integrand");
  require_finite(fb, "quadrature integrand");
  return h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
}

double simpson_uniform(std::span<const double> samples, double h) {
  const std::size_t n = samples.size();
  if (n < 2) throw SolverError(ErrorCode::Domain, "need at least two samples to integrate");
  for (double v : samples) require_finite(v, "sampled integrand");
  const std::size_t intervals = n - 1;
  if (intervals == 1) return 0.5 * h * (samples[0] + samples[1]);

  auto simpson = [&](std::size_t first, std::size_t count) {
    double s = samples[first] + samples[first + count];
    for (std::size_t i = 1; i < count; ++i) s += (i % 2 ? 4.0 : 2.0) * samples[first + i];
    return h / 3.0 * s;
  };
  if (intervals % 2 == 0) return simpson(0, intervals);
  // Odd interval count: Simpson on the leading even block, 3/8 rule on the last three.
  const std::size_t lead = intervals - 3;
  const double tail = 3.0 * h / 8.0 *
                      (samples[lead] + 3.0 * samples[lead + 1] + 3.0 * samples[lead + 2] +
                       samples[lead + 3]);
  return (lead > 0 ? simpson(0, lead) : 0.0) + tail;
}

std::vector<double> cumulative_simpson(std::span<const double> samples, double h) {
  const std::size_t n = samples.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (samples[0] + samples[1]);
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + h / 3.0 * (samples[i - 2] + 4.0 * samples[i - 1] + samples[i]);
    } else if (i + 1 < n) {
      // Integral over the first half of the parabola through i-1, i, i+1.
      out[i] = out[i - 1] + h / 12.0 * (5.0 * samples[i - 1] + 8.0 * samples[i] - samples[i + 1]);
    } else {
      out[i] = out[i - 1] + h / 12.0 * (-samples[i - 2] + 8.0 * samples[i - 1] + 5.0 * samples[i]);
    }
  }
  return out;
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     const RootConfig& cfg) {
  if (!(cfg.xTol > 0.0) || cfg.fTol < 0.0) {
    throw SolverError(ErrorCode::Domain, "root tolerances must be positive");
  }
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  require_finite(fa, "root function");
  require_finite(fb, "root function");
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "no sign change on [" << lo << ", " << hi << "]: f = " << fa << ", " << fb;
    throw SolverError(ErrorCode::NoBracket, os.str());
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= cfg.maxIter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * cfg.xTol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol || fb == 0.0 || std::abs(fb) <= cfg.fTol) return {b, fb, iter};

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points differ.
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : std::copysign(tol, xm);
    fb = f(b);
    require_finite(fb, "root function");
  }
  throw SolverError(ErrorCode::IterationLimit, "root finder did not converge");
}

ShotResult shoot(const std::function<double(double)>& residual, double lo, double hi,
                 const ShootConfig& cfg) {
  if (!(hi > lo)) throw SolverError(ErrorCode::Domain, "shooting bracket must satisfy lo < hi");
  if (cfg.scanPoints < 2) throw SolverError(ErrorCode::Domain, "shooting scan needs >= 2 points");
  if (cfg.logScan && !(lo > 0.0)) {
    throw SolverError(ErrorCode::Domain, "logarithmic scan needs a positive bracket");
  }

  int evaluations = 0;
  auto counted = [&](double p) {
    ++evaluations;
    return residual(p);
  };

  const int n = cfg.scanPoints;
  std::vector<double> params(n);
  for (int i = 0; i < n; ++i) {
    const double w = static_cast<double>(i) / (n - 1);
    params[i] = cfg.logScan ? lo * std::pow(hi / lo, w) : lo + w * (hi - lo);
  }
  params.back() = hi;

  double prevP = params[0];
  double prevR = counted(prevP);
  for (int i = 1; i < n; ++i) {
    const double p = params[i];
    const double r = counted(p);
    if (std::isfinite(prevR) && prevR == 0.0) return {prevP, 0.0, prevP, prevP, evaluations};
    if (std::isfinite(prevR) && std::isfinite(r) && (prevR > 0.0) != (r > 0.0)) {
      const RootResult root = find_root(counted, prevP, p, cfg.root);
      return {root.x, root.fx, prevP, p, evaluations};
    }
    prevP = p;
    prevR = r;
  }
  if (std::isfinite(prevR) && prevR == 0.0) return {prevP, 0.0, prevP, prevP, evaluations};
  std::ostringstream os;
  os << "no solution in bracket [" << lo << ", " << hi << "] (" << n << "-point scan)";
  throw SolverError(ErrorCode::NoBracket, os.str());
}

}  // namespace modctl::numerics
