#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace modctl::numerics {

using State = std::vector<double>;

/// dydt = f(y, t), in the argument order odeint uses.
using VectorField = std::function<void(const State& y, State& dydt, double t)>;

struct IntegratorConfig {
  double relTol = 1e-10;
  double absTol = 1e-12;
  /// Upper bound on |dt|; infinity means unbounded. In fixed-step mode this
  /// is the step size.
  double maxStep = std::numeric_limits<double>::infinity();
  long maxSteps = 1'000'000;
  /// false: fixed steps of maxStep with the Dormand-Prince 5th order solution.
  bool adaptive = true;
};

/// Stops integration at the first sign change of `function` along the path.
/// direction > 0 only accepts - to + crossings, < 0 only + to -, 0 either,
/// measured in the order the path is traversed. A zero value at the start
/// point does not count as a crossing.
struct Event {
  std::function<double(double t, const State& y)> function;
  int direction = 0;
};

/// Returns false when the state has left the region where the field is valid.
using Guard = std::function<bool(double t, const State& y)>;

struct IntegrateOptions {
  /// Dense-output nodes, ordered along the direction of integration.
  std::vector<double> outputTimes;
  std::optional<Event> event;
  Guard guard;
};

enum class Termination { Completed, Event, Guard };

struct IntegrationResult {
  Termination status = Termination::Completed;
  double t = 0.0;  // where the integration stopped
  State y;
  std::vector<double> times;  // output nodes reached, same order as requested
  std::vector<State> states;
  long steps = 0;
};

/// Integrates y' = f(y, t) from t0 to t1 with the Dormand-Prince 5(4) pair.
/// t1 < t0 is allowed. Throws SolverError(StepLimit) when cfg.maxSteps is
/// exhausted; exceptions thrown by the field propagate.
IntegrationResult integrate(const VectorField& field, const State& y0, double t0, double t1,
                            const IntegratorConfig& cfg, const IntegrateOptions& options = {});

/// Composite Simpson rule with nPanels (even, >= 2) subintervals.
double quadrature(const std::function<double(double)>& f, double a, double b, int nPanels);

/// Simpson integral of uniformly spaced samples. An odd number of intervals
/// closes with the 3/8 rule; a single interval falls back to the trapezoid.
double simpson_uniform(std::span<const double> samples, double h);

/// Running integral of uniformly spaced samples, out[0] = 0. Fourth order at
/// even nodes, third order local correction at odd ones.
std::vector<double> cumulative_simpson(std::span<const double> samples, double h);

struct RootConfig {
  double xTol = 1e-14;
  double fTol = 0.0;
  int maxIter = 200;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Brent's method on [lo, hi]. Requires f(lo) f(hi) <= 0; the result always
/// lies inside the initial bracket.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     const RootConfig& cfg = {});

struct ShootConfig {
  int scanPoints = 64;
  /// Geometric spacing for the scan; requires 0 < lo < hi.
  bool logScan = false;
  RootConfig root;
};

struct ShotResult {
  double parameter = 0.0;
  double residual = 0.0;
  double bracketLo = 0.0;
  double bracketHi = 0.0;
  int evaluations = 0;
};

/// Single-parameter shooting: scans [lo, hi] for the first sign change of the
/// residual and refines it with find_root. A NaN residual marks a failed shot
/// and is never paired into a bracket. Throws SolverError(NoBracket) when the
/// scan finds no sign change.
ShotResult shoot(const std::function<double(double)>& residual, double lo, double hi,
                 const ShootConfig& cfg = {});

}  // namespace modctl::numerics
