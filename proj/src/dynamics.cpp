#include "modctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modctl/error.hpp"

namespace modctl {

namespace {

double require_scalar(const Eigen::VectorXd& x) {
  if (x.size() != 1) {
    throw SolverError(ErrorCode::Domain, "the spooking cost is defined on the line (n = 1)");
  }
  return x[0];
}

double uniform_spacing(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 2) throw SolverError(ErrorCode::Domain, "trajectory needs at least two samples");
  const double span = s.back().t - s.front().t;
  const double h = span / static_cast<double>(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs(s[i].t - s[i - 1].t - h) > 1e-9 * std::max(1.0, span)) {
      throw SolverError(ErrorCode::Domain, "trajectory samples are not uniformly spaced");
    }
  }
  return h;
}

}  // namespace

PositionCost PositionCost::spook(double c) {
  if (!(c >= 0.0)) throw SolverError(ErrorCode::Domain, "spooking intensity c must be >= 0");
  return PositionCost(PositionCostKind::SpookQuadratic, c);
}

double PositionCost::value(double x) const {
  if (kind_ == PositionCostKind::Constant) return 1.0;
  const double e = 1.0 - x;
  return 1.0 + 0.5 * c_ * e * e;
}

double PositionCost::gradient(double x) const {
  if (kind_ == PositionCostKind::Constant) return 0.0;
  return -c_ * (1.0 - x);
}

double cost_value(const PositionCost& cost, const Eigen::VectorXd& x) {
  if (cost.kind() == PositionCostKind::Constant) return 1.0;
  return cost.value(require_scalar(x));
}

Eigen::VectorXd cost_gradient(const PositionCost& cost, const Eigen::VectorXd& x) {
  if (cost.kind() == PositionCostKind::Constant) return Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd g(1);
  g[0] = cost.gradient(require_scalar(x));
  return g;
}

void ControlledSystem::validate() const {
  if (order < 1) throw SolverError(ErrorCode::Domain, "derivative order k must be >= 1");
  if (dim < 1) throw SolverError(ErrorCode::Domain, "dimension n must be >= 1");
  if (cost.kind() == PositionCostKind::SpookQuadratic && dim != 1) {
    throw SolverError(ErrorCode::Domain, "the spooking cost requires n = 1");
  }
}

PhaseState PhaseState::zeros(int order, int dim) {
  PhaseState s;
  s.x.assign(order, Eigen::VectorXd::Zero(dim));
  s.lambda.assign(order, Eigen::VectorXd::Zero(dim));
  return s;
}

numerics::State pack(const PhaseState& s) {
  const int k = s.order();
  const int n = s.dim();
  numerics::State y(static_cast<std::size_t>(2 * k * n));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) {
      y[j * n + i] = s.x[j][i];
      y[(k + j) * n + i] = s.lambda[j][i];
    }
  }
  return y;
}

PhaseState unpack(const numerics::State& y, int order, int dim) {
  if (y.size() != static_cast<std::size_t>(2 * order * dim)) {
    throw SolverError(ErrorCode::Domain, "flat state size does not match (k, n)");
  }
  PhaseState s = PhaseState::zeros(order, dim);
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i < dim; ++i) {
      s.x[j][i] = y[j * dim + i];
      s.lambda[j][i] = y[(order + j) * dim + i];
    }
  }
  return s;
}

FieldValue hamiltonian_field(const ControlledSystem& sys, const Incentive& inc, const PhaseState& s) {
  const int k = sys.order;
  if (s.order() != k || s.dim() != sys.dim) {
    throw SolverError(ErrorCode::Domain, "phase state shape does not match the system");
  }
  FieldValue out;
  out.derivative = PhaseState::zeros(k, sys.dim);
  for (int j = 0; j + 1 < k; ++j) {
    out.derivative.x[j] = s.x[j + 1];
    out.derivative.lambda[j] = s.lambda[j + 1];
  }
  ControlVector u = potential_gradient(inc, s.lambda[0]);
  out.derivative.x[k - 1] = std::move(u.u);
  out.degenerate = u.degenerate;
  const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
  out.derivative.lambda[k - 1] = sign * cost_gradient(sys.cost, s.x[0]);
  return out;
}

double conserved_quantity(const ControlledSystem& sys, const Incentive& inc, const PhaseState& s) {
  const int k = sys.order;
  double h = potential(inc, s.lambda[0].norm()) - cost_value(sys.cost, s.x[0]);
  for (int j = 1; j < k; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    h += sign * s.x[k - j].dot(s.lambda[j]);
  }
  return h;
}

double instantaneous_cost(const ControlledSystem& sys, const Incentive& inc,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  double mag = u.norm();
  if (mag > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "control magnitude " << mag << " exceeds 1";
    throw SolverError(ErrorCode::Domain, os.str());
  }
  mag = std::min(mag, 1.0);
  return cost_value(sys.cost, x) - incentive_value(inc, mag);
}

numerics::VectorField make_field(const ControlledSystem& sys, const Incentive& inc) {
  sys.validate();
  return [sys, inc](const numerics::State& y, numerics::State& dydt, double) {
    const PhaseState s = unpack(y, sys.order, sys.dim);
    dydt = pack(hamiltonian_field(sys, inc, s).derivative);
  };
}

void finalize_trajectory(Trajectory& traj, const ControlledSystem& sys, const Incentive& inc,
                         double conservedReference) {
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(sys.dim);
  for (auto& sample : traj.samples) {
    ControlVector u = potential_gradient(inc, sample.state.lambda[0]);
    sample.u = u.degenerate ? previous : u.u;
    previous = sample.u;
    sample.costDensity = instantaneous_cost(sys, inc, sample.state.x[0], sample.u);
    sample.conservedResidual = conserved_quantity(sys, inc, sample.state) - conservedReference;
  }
  traj.duration = traj.samples.empty() ? 0.0 : traj.samples.back().t - traj.samples.front().t;
  traj.totalCost = total_cost(traj);
}

double total_cost(const Trajectory& traj) {
  const double h = uniform_spacing(traj);
  std::vector<double> density;
  density.reserve(traj.samples.size());
  for (const auto& s : traj.samples) density.push_back(s.costDensity);
  return numerics::simpson_uniform(density, h);
}

Trajectory integrate_hamiltonian(const ControlledSystem& sys, const Incentive& inc,
                                 const PhaseState& initial, double duration, int nSamples,
                                 const numerics::IntegratorConfig& cfg) {
  if (nSamples < 2) throw SolverError(ErrorCode::Domain, "need at least two samples");
  if (!(duration > 0.0)) throw SolverError(ErrorCode::Domain, "duration must be positive");
  numerics::IntegrateOptions opts;
  opts.outputTimes.resize(nSamples);
  for (int i = 0; i < nSamples; ++i) {
    opts.outputTimes[i] = duration * static_cast<double>(i) / (nSamples - 1);
  }
  const auto result = numerics::integrate(make_field(sys, inc), pack(initial), 0.0, duration, cfg, opts);

  Trajectory traj;
  traj.samples.reserve(result.times.size());
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    TrajectorySample sample;
    sample.t = result.times[i];
    sample.state = unpack(result.states[i], sys.order, sys.dim);
    traj.samples.push_back(std::move(sample));
  }
  finalize_trajectory(traj, sys, inc);
  return traj;
}

double fourth_order_residual(const ControlledSystem& sys, const Incentive& inc,
                             const Trajectory& traj) {
  if (inc.kind() != IncentiveKind::Elliptical) {
    throw SolverError(ErrorCode::Unsupported, "residual check needs an invertible potential gradient");
  }
  if (traj.samples.size() < 200) {
    throw SolverError(ErrorCode::Domain, "residual check needs at least 200 samples");
  }
  const double h = uniform_spacing(traj);
  const int k = sys.order;

  std::vector<Eigen::VectorXd> w;
  w.reserve(traj.samples.size());
  for (const auto& s : traj.samples) w.push_back(inverse_gradient(inc, s.u));

  // d^k/dt^k as (k/2) compact second differences, plus one central first
  // difference for odd k. Each pass trims one sample from either end.
  int offset = 0;
  for (int pass = 0; pass < k / 2; ++pass) {
    std::vector<Eigen::VectorXd> next;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
      next.push_back((w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h));
    }
    w = std::move(next);
    ++offset;
  }
  if (k % 2 == 1) {
    std::vector<Eigen::VectorXd> next;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) next.push_back((w[i + 1] - w[i - 1]) / (2.0 * h));
    w = std::move(next);
    ++offset;
  }

  const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& x = traj.samples[j + offset].state.x[0];
    worst = std::max(worst, (w[j] - sign * cost_gradient(sys.cost, x)).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace modctl
