#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace modctl {

enum class IncentiveKind { Trivial, Elliptical, QuadraticPoly };

/**
 * A moderation incentive C~(s), s = |u| in [0, 1].
 *
 * The family members share C~(1) = 0 and 0 <= C~ <= 1. Each one induces an
 * optimal control magnitude sigma(s) (the maximizer of sigma * s + C~(sigma)
 * over [0, 1]) and a scalar moderation potential chi~(s), the maximum value.
 *
 *   Trivial        C~ = 0                 chi~ = s
 *   Elliptical(mu) C~ = mu sqrt(1 - s^2)  chi~ = sqrt(mu^2 + s^2)
 *   QuadraticPoly  C~ = (1 - s^2) / 2     chi~ = (1 + s^2) / 2, s <= 1; s, s > 1
 */
class Incentive {
 public:
  static Incentive trivial() { return Incentive(IncentiveKind::Trivial, 0.0); }
  /// Throws SolverError(Domain) unless 0 < mu <= 1.
  static Incentive elliptical(double mu);
  static Incentive quadratic() { return Incentive(IncentiveKind::QuadraticPoly, 0.0); }

  IncentiveKind kind() const noexcept { return kind_; }
  /// Moderation parameter; zero for the non-elliptical members.
  double mu() const noexcept { return mu_; }

  /// Points s > 0 where chi~ fails to be C^2. The trivial potential |lambda|
  /// also has a kink at lambda = 0, reported as 0.
  std::vector<double> kinks() const;

  std::string name() const;

 private:
  Incentive(IncentiveKind kind, double mu) : kind_(kind), mu_(mu) {}

  IncentiveKind kind_;
  double mu_;
};

struct Magnitude {
  double value = 0.0;
  /// True when the maximizer is not unique (Trivial incentive at s = 0).
  bool degenerate = false;
};

/// C~(s); throws SolverError(Domain) for s outside [0, 1].
double incentive_value(const Incentive& inc, double s);

/// sigma(s) for s >= 0.
Magnitude optimal_magnitude(const Incentive& inc, double s);

/// chi~(s) for s >= 0.
double potential(const Incentive& inc, double s);

/// The s >= 0 with chi~(s) = v. The quadratic potential is inverted on the
/// branch s = sqrt(2v - 1) for v in [1/2, 1] and s = v above 1.
double potential_inverse(const Incentive& inc, double v);

struct ControlVector {
  Eigen::VectorXd u;
  bool degenerate = false;
};

/// u = grad chi(lambda) = sigma(|lambda|) lambda / |lambda|. At lambda = 0 the
/// result is the zero vector; for the trivial incentive it is also flagged
/// degenerate, and callers apply the left-hand-limit convention.
ControlVector potential_gradient(const Incentive& inc, const Eigen::VectorXd& lambda);

/// Inverse of potential_gradient for the elliptical incentive:
/// lambda = mu u / sqrt(1 - |u|^2). Requires |u| < 1.
Eigen::VectorXd inverse_gradient(const Incentive& inc, const Eigen::VectorXd& u);

/// Scalar convenience overloads for n = 1.
double potential_gradient(const Incentive& inc, double lambda);
double inverse_gradient(const Incentive& inc, double u);

}  // namespace modctl
