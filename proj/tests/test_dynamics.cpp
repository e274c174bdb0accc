#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "modctl/dynamics.hpp"
#include "modctl/error.hpp"

using namespace modctl;

namespace {

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x[0] = v;
  return x;
}

PhaseState state2(double x, double v, double lam, double lamDot) {
  PhaseState s = PhaseState::zeros(2, 1);
  s.x[0][0] = x;
  s.x[1][0] = v;
  s.lambda[0][0] = lam;
  s.lambda[1][0] = lamDot;
  return s;
}

}  // namespace

TEST_CASE("position costs") {
  CHECK(cost_value(PositionCost::constant(), vec1(0.3)) == 1.0);
  CHECK(cost_value(PositionCost::spook(1.0), vec1(0.0)) == 1.5);
  CHECK(cost_value(PositionCost::spook(5.0), vec1(1.0)) == 1.0);
  CHECK(cost_gradient(PositionCost::constant(), vec1(0.7))[0] == 0.0);
  CHECK(cost_gradient(PositionCost::spook(1.0), vec1(0.0))[0] == -1.0);
  CHECK(cost_gradient(PositionCost::spook(5.0), vec1(1.0))[0] == 0.0);
  CHECK_THROWS_AS(cost_value(PositionCost::spook(1.0), Eigen::VectorXd::Zero(2)), SolverError);
  CHECK_THROWS_AS(PositionCost::spook(-1.0), SolverError);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 2.0);
  const PositionCost cost = PositionCost::spook(3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = dist(rng), h = 1e-5;
    const double fd = (cost.value(x + h) - cost.value(x - h)) / (2 * h);
    CHECK(std::abs(fd - cost.gradient(x)) <= 1e-8);
    CHECK(cost.value(x) >= 1.0);
  }
}

TEST_CASE("system validation") {
  CHECK_THROWS_AS((ControlledSystem{0, 1, PositionCost::constant()}.validate()), SolverError);
  CHECK_THROWS_AS((ControlledSystem{2, 2, PositionCost::spook(1.0)}.validate()), SolverError);
  CHECK_NOTHROW((ControlledSystem{3, 2, PositionCost::constant()}.validate()));
}

TEST_CASE("pack and unpack") {
  PhaseState s = PhaseState::zeros(3, 2);
  double v = 1.0;
  for (auto& b : s.x) b << v++, v++;
  for (auto& b : s.lambda) b << v++, v++;
  const auto flat = pack(s);
  CHECK(flat.size() == 12);
  CHECK(flat[0] == 1.0);
  CHECK(flat[6] == 7.0);
  const PhaseState back = unpack(flat, 3, 2);
  CHECK(back.lambda[2][1] == 12.0);
  CHECK_THROWS_AS(unpack(flat, 2, 2), SolverError);
}

TEST_CASE("hamiltonian field") {
  const ControlledSystem flat{2, 1, PositionCost::constant()};
  auto f = hamiltonian_field(flat, Incentive::elliptical(1.0), state2(0, 0, 0, -1));
  CHECK(f.derivative.x[0][0] == 0.0);
  CHECK(f.derivative.x[1][0] == 0.0);
  CHECK(f.derivative.lambda[0][0] == -1.0);
  CHECK(f.derivative.lambda[1][0] == 0.0);

  const ControlledSystem spook{2, 1, PositionCost::spook(1.0)};
  auto g = hamiltonian_field(spook, Incentive::elliptical(0.5), state2(0, 0, std::sqrt(2.0), 0));
  CHECK(g.derivative.x[1][0] == doctest::Approx(std::sqrt(2.0) / 1.5).epsilon(1e-15));
  CHECK(g.derivative.lambda[1][0] == 1.0);

  auto q = hamiltonian_field(flat, Incentive::quadratic(), state2(0, 0, 0.5, 0));
  CHECK(q.derivative.x[1][0] == 0.5);

  auto t = hamiltonian_field(flat, Incentive::trivial(), state2(0, 0, 0, -1));
  CHECK(t.degenerate);

  // k = 3: lambda''' = +grad C.
  const ControlledSystem third{3, 1, PositionCost::spook(2.0)};
  PhaseState s3 = PhaseState::zeros(3, 1);
  auto h = hamiltonian_field(third, Incentive::elliptical(0.5), s3);
  CHECK(h.derivative.lambda[2][0] == -2.0);
  const ControlledSystem first{1, 1, PositionCost::spook(2.0)};
  auto h1 = hamiltonian_field(first, Incentive::elliptical(0.5), PhaseState::zeros(1, 1));
  CHECK(h1.derivative.lambda[0][0] == -2.0);
}

TEST_CASE("conserved quantity") {
  const ControlledSystem flat{2, 1, PositionCost::constant()};
  CHECK(conserved_quantity(flat, Incentive::trivial(), state2(0, 0, 1, -1)) == 0.0);
  CHECK(conserved_quantity(flat, Incentive::trivial(), state2(0.375, 0.5, 0.5, -1)) == 0.0);
  const ControlledSystem spook{2, 1, PositionCost::spook(1.0)};
  for (double w : {-3.0, 0.0, 2.0}) {
    CHECK(std::abs(conserved_quantity(spook, Incentive::elliptical(0.5), state2(0, 0, std::sqrt(2.0), w))) < 1e-15);
  }
}

TEST_CASE("instantaneous cost") {
  const ControlledSystem flat{2, 1, PositionCost::constant()};
  CHECK(instantaneous_cost(flat, Incentive::trivial(), vec1(0.2), vec1(1.0)) == 1.0);
  for (double u : {0.0, 0.3, 0.9}) {
    CHECK(instantaneous_cost(flat, Incentive::quadratic(), vec1(0.2), vec1(u)) ==
          doctest::Approx((1 + u * u) / 2).epsilon(1e-15));
  }
  const ControlledSystem spook{2, 1, PositionCost::spook(1.0)};
  CHECK(instantaneous_cost(spook, Incentive::elliptical(1.0), vec1(1.0), vec1(0.0)) == 0.0);
  CHECK_THROWS_AS(instantaneous_cost(flat, Incentive::trivial(), vec1(0.0), vec1(1.1)), SolverError);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    CHECK(instantaneous_cost(spook, Incentive::elliptical(0.7), vec1(d(rng) * 2), vec1(d(rng))) >= 0.0);
  }
}

TEST_CASE("bang-bang integration keeps |u| = 1 and uses the left limit") {
  const ControlledSystem flat{2, 1, PositionCost::constant()};
  auto traj = integrate_hamiltonian(flat, Incentive::trivial(), state2(0, 0, 1, -1), 2.0, 2001);
  CHECK(traj.samples[1000].t == doctest::Approx(1.0));
  CHECK(traj.samples[1000].u[0] == 1.0);
  CHECK(traj.samples[1001].u[0] == -1.0);
  for (const auto& s : traj.samples) CHECK(std::abs(s.u[0]) == 1.0);
  CHECK(std::abs(traj.samples.back().state.x[0][0] - 1.0) <= 1e-8);
  CHECK(traj.totalCost == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant trajectory has zero fourth-order residual") {
  const ControlledSystem flat{2, 1, PositionCost::constant()};
  auto traj = integrate_hamiltonian(flat, Incentive::elliptical(0.5), PhaseState::zeros(2, 1), 1.0, 400);
  CHECK(fourth_order_residual(flat, Incentive::elliptical(0.5), traj) == 0.0);
  auto shortTraj = integrate_hamiltonian(flat, Incentive::elliptical(0.5), PhaseState::zeros(2, 1), 1.0, 50);
  CHECK_THROWS_AS(fourth_order_residual(flat, Incentive::elliptical(0.5), shortTraj), SolverError);
  CHECK_THROWS_AS(fourth_order_residual(flat, Incentive::quadratic(), traj), SolverError);
}

TEST_CASE("conservation of integrated trajectories") {
  const ControlledSystem spook{2, 1, PositionCost::spook(2.0)};
  for (double mu : {0.25, 0.75}) {
    const Incentive inc = Incentive::elliptical(mu);
    const PhaseState s0 = state2(0.1, 0.2, 0.9, -0.4);
    auto traj = integrate_hamiltonian(spook, inc, s0, 3.0, 1001);
    const double ref = conserved_quantity(spook, inc, s0);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
      worst = std::max(worst, std::abs(s.conservedResidual - ref));
      CHECK(s.u.norm() < 1.0);
    }
    CHECK(worst <= 1e-7);
  }
}
