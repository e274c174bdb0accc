#pragma once

#include <Eigen/Dense>

#include <vector>

#include "modctl/incentives.hpp"
#include "modctl/numerics.hpp"

namespace modctl {

enum class PositionCostKind { Constant, SpookQuadratic };

/// State cost C(x) >= 1: either C = 1, or the spooking penalty
/// C(x) = 1 + (c/2)(1 - x)^2 on the line, which is 1 at the target x = 1.
class PositionCost {
 public:
  static PositionCost constant() { return PositionCost(PositionCostKind::Constant, 0.0); }
  /// Throws SolverError(Domain) for c < 0.
  static PositionCost spook(double c);

  PositionCostKind kind() const noexcept { return kind_; }
  double intensity() const noexcept { return c_; }

  double value(double x) const;
  double gradient(double x) const;

 private:
  PositionCost(PositionCostKind kind, double c) : kind_(kind), c_(c) {}

  PositionCostKind kind_;
  double c_;
};

double cost_value(const PositionCost& cost, const Eigen::VectorXd& x);
Eigen::VectorXd cost_gradient(const PositionCost& cost, const Eigen::VectorXd& x);

/// Fully controlled system x^(k) = u in R^n, |u| <= 1, with state cost C.
struct ControlledSystem {
  int order = 2;
  int dim = 1;
  PositionCost cost = PositionCost::constant();

  /// Throws SolverError(Domain) on k < 1, n < 1, or a spooking cost with n != 1.
  void validate() const;
};

/// Phase point of the synthesis problem: x, x', ..., x^(k-1) and
/// lambda, lambda', ..., lambda^(k-1).
struct PhaseState {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> lambda;

  static PhaseState zeros(int order, int dim);
  int order() const { return static_cast<int>(x.size()); }
  int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

/// Flat layout [x, x', ..., lambda, lambda', ...], each block n wide.
numerics::State pack(const PhaseState& s);
PhaseState unpack(const numerics::State& y, int order, int dim);

struct FieldValue {
  PhaseState derivative;
  bool degenerate = false;  // lambda = 0 under the trivial incentive
};

/// Skewed-gradient field: x^(k) = grad chi(lambda), lambda^(k) = (-1)^(k-1) grad C(x).
FieldValue hamiltonian_field(const ControlledSystem& sys, const Incentive& inc, const PhaseState& s);

/// chi(lambda) - C(x) + sum_{j=1}^{k-1} (-1)^j <x^(k-j), lambda^(j)>; zero along
/// arbitrary-duration solutions.
double conserved_quantity(const ControlledSystem& sys, const Incentive& inc, const PhaseState& s);

/// Running cost C(x) - C~(|u|); throws SolverError(Domain) for |u| > 1.
double instantaneous_cost(const ControlledSystem& sys, const Incentive& inc,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& u);

/// The field in flat form for numerics::integrate.
numerics::VectorField make_field(const ControlledSystem& sys, const Incentive& inc);

struct TrajectorySample {
  double t = 0.0;
  PhaseState state;
  Eigen::VectorXd u;
  double costDensity = 0.0;
  double conservedResidual = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double duration = 0.0;
  double totalCost = 0.0;
};

/// Fills u, cost density, conserved residual (relative to conservedReference)
/// and total cost from the sample states. At a degenerate sample the control
/// is the left-hand limit, i.e. the previous sample's control.
void finalize_trajectory(Trajectory& traj, const ControlledSystem& sys, const Incentive& inc,
                         double conservedReference = 0.0);

/// Composite Simpson integral of the cost density over uniformly spaced samples.
double total_cost(const Trajectory& traj);

/// Integrates the Hamiltonian field from `initial` over [0, duration] and
/// samples it at nSamples uniform times.
Trajectory integrate_hamiltonian(const ControlledSystem& sys, const Incentive& inc,
                                 const PhaseState& initial, double duration, int nSamples,
                                 const numerics::IntegratorConfig& cfg = {});

/// max_i |d^k/dt^k (grad chi)^{-1}(x^(k)) - (-1)^(k-1) grad C(x)| over interior
/// samples, by central differences on a uniform grid. Requires an elliptical
/// incentive and at least 200 samples.
double fourth_order_residual(const ControlledSystem& sys, const Incentive& inc,
                             const Trajectory& traj);

}  // namespace modctl
