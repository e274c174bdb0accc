#include "modctl/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modctl/error.hpp"

namespace modctl {

Incentive Incentive::elliptical(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    std::ostringstream os;
    os << "elliptical incentive requires 0 < mu <= 1, got " << mu;
    throw SolverError(ErrorCode::Domain, os.str());
  }
  return Incentive(IncentiveKind::Elliptical, mu);
}

std::vector<double> Incentive::kinks() const {
  switch (kind_) {
    case IncentiveKind::Trivial: return {0.0};
    case IncentiveKind::QuadraticPoly: return {1.0};
    case IncentiveKind::Elliptical: return {};
  }
  return {};
}

std::string Incentive::name() const {
  switch (kind_) {
    case IncentiveKind::Trivial: return "trivial";
    case IncentiveKind::Elliptical: return "elliptical";
    case IncentiveKind::QuadraticPoly: return "quadratic";
  }
  return "unknown";
}

double incentive_value(const Incentive& inc, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "incentive argument must lie in [0, 1], got " << s;
    throw SolverError(ErrorCode::Domain, os.str());
  }
  switch (inc.kind()) {
    case IncentiveKind::Trivial: return 0.0;
    case IncentiveKind::Elliptical: return inc.mu() * std::sqrt((1.0 - s) * (1.0 + s));
    case IncentiveKind::QuadraticPoly: return 0.5 * (1.0 - s * s);
  }
  return 0.0;
}

Magnitude optimal_magnitude(const Incentive& inc, double s) {
  if (!(s >= 0.0)) throw SolverError(ErrorCode::Domain, "optimal_magnitude requires s >= 0");
  switch (inc.kind()) {
    case IncentiveKind::Trivial:
      return s > 0.0 ? Magnitude{1.0, false} : Magnitude{1.0, true};
    case IncentiveKind::Elliptical:
      return {s / std::hypot(inc.mu(), s), false};
    case IncentiveKind::QuadraticPoly:
      return {std::min(s, 1.0), false};
  }
  return {};
}

double potential(const Incentive& inc, double s) {
  if (!(s >= 0.0)) throw SolverError(ErrorCode::Domain, "potential requires s >= 0");
  switch (inc.kind()) {
    case IncentiveKind::Trivial: return s;
    case IncentiveKind::Elliptical: return std::hypot(inc.mu(), s);
    case IncentiveKind::QuadraticPoly: return s <= 1.0 ? 0.5 * (1.0 + s * s) : s;
  }
  return 0.0;
}

double potential_inverse(const Incentive& inc, double v) {
  auto below = [&](double lo) {
    std::ostringstream os;
    os << inc.name() << " potential takes values >= " << lo << ", got " << v;
    throw SolverError(ErrorCode::Domain, os.str());
  };
  switch (inc.kind()) {
    case IncentiveKind::Trivial:
      if (!(v >= 0.0)) below(0.0);
      return v;
    case IncentiveKind::Elliptical: {
      const double mu = inc.mu();
      if (!(v >= mu)) below(mu);
      return std::sqrt((v - mu) * (v + mu));
    }
    case IncentiveKind::QuadraticPoly:
      if (!(v >= 0.5)) below(0.5);
      return v <= 1.0 ? std::sqrt(2.0 * v - 1.0) : v;
  }
  return 0.0;
}

ControlVector potential_gradient(const Incentive& inc, const Eigen::VectorXd& lambda) {
  const double norm = lambda.norm();
  if (norm == 0.0) {
    return {Eigen::VectorXd::Zero(lambda.size()), inc.kind() == IncentiveKind::Trivial};
  }
  const Magnitude sigma = optimal_magnitude(inc, norm);
  return {sigma.value * (lambda / norm), false};
}

Eigen::VectorXd inverse_gradient(const Incentive& inc, const Eigen::VectorXd& u) {
  if (inc.kind() != IncentiveKind::Elliptical) {
    throw SolverError(ErrorCode::Unsupported,
                      inc.name() + " incentive has no invertible potential gradient");
  }
  const double norm2 = u.squaredNorm();
  if (!(norm2 < 1.0)) {
    throw SolverError(ErrorCode::Domain, "inverse_gradient requires |u| < 1");
  }
  return (inc.mu() / std::sqrt(1.0 - norm2)) * u;
}

double potential_gradient(const Incentive& inc, double lambda) {
  if (lambda == 0.0) return 0.0;
  return std::copysign(optimal_magnitude(inc, std::abs(lambda)).value, lambda);
}

double inverse_gradient(const Incentive& inc, double u) {
  Eigen::VectorXd v(1);
  v[0] = u;
  return inverse_gradient(inc, v)[0];
}

}  // namespace modctl
