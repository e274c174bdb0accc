#include "modctl/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <tuple>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "modctl/cli/io.hpp"
#include "modctl/closed_form.hpp"
#include "modctl/error.hpp"
#include "modctl/reparam.hpp"

// This pchip header calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace modctl::cli {

std::vector<SweepRow> run_sweep(const ScenarioSpec& base, const std::vector<double>& mus,
                                const std::vector<double>& cs, int jobs) {
  const std::vector<double> muList = mus.empty() ? std::vector<double>{base.mu} : mus;
  const std::vector<double> cList = cs.empty() ? std::vector<double>{base.c} : cs;
  std::vector<SweepRow> rows;
  for (double mu : muList) {
    for (double c : cList) {
      SweepRow row;
      row.spec = base;
      row.spec.mu = mu;
      row.spec.c = c;
      rows.push_back(std::move(row));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        rows[i].report = run_scenario(rows[i].spec).report;
      } catch (const SolverError& e) {
        rows[i].error = std::string(error_code_name(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        rows[i].error = std::string("ERROR: ") + e.what();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(rows.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "scenario,incentive,mu,c,k,t_f,total_cost,accel_start,accel_end,t_star,"
         "max_boundary_residual,max_conserved_residual,iterations,method,error\n";
  for (const auto& row : rows) {
    const ScenarioSpec& s = row.spec;
    out << scenario_name(s.scenario) << ',' << s.incentive << ',' << format_double(s.mu) << ','
        << format_double(s.c) << ',' << s.k << ',';
    if (row.report) {
      const SolveReport& r = *row.report;
      const double bnd = *std::max_element(r.boundaryResiduals.begin(), r.boundaryResiduals.end());
      out << format_double(r.duration) << ',' << format_double(r.totalCost) << ','
          << format_double(r.accelStart) << ',' << format_double(r.accelEnd) << ','
          << (r.tStar ? format_double(*r.tStar) : "") << ',' << format_double(bnd) << ','
          << format_double(r.maxConservedResidual) << ',' << r.iterations << ',' << r.method << ",\n";
    } else {
      std::string err = row.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << ",,,,,,,,," << err << '\n';
    }
  }
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

namespace {

struct Curve {
  std::vector<double> x;
  std::vector<double> a;
};

Curve acceleration_curve(const ScenarioSpec& spec, double timeScale) {
  const Trajectory traj = run_scenario(spec).trajectory;
  Curve out;
  for (const auto& s : traj.samples) {
    out.x.push_back(timeScale * s.t);
    out.a.push_back(s.u[0]);
  }
  return out;
}

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

Pchip interpolant(Curve curve) { return Pchip(std::move(curve.x), std::move(curve.a)); }

}  // namespace

CompareResult compare_rescaled(double c, int samples) {
  if (!(c > 0.0)) throw SolverError(ErrorCode::Domain, "c must be positive");
  if (samples < 4) throw SolverError(ErrorCode::Domain, "samples must be >= 4");
  const double kappa = std::pow(c, 0.25) / std::numbers::sqrt2;
  constexpr int kSolveSamples = 4001;

  ScenarioSpec moderated;
  moderated.scenario = Scenario::Spook;
  moderated.incentive = "elliptical";
  moderated.mu = 1.0;
  moderated.c = c;
  moderated.samples = kSolveSamples;
  ScenarioSpec hat;
  hat.scenario = Scenario::QccHat;
  hat.c = c;
  hat.k = 1;
  hat.samples = kSolveSamples;

  const Curve m1 = acceleration_curve(moderated, kappa);
  const Curve qc = acceleration_curve(hat, kappa);
  const double sMax = std::min(m1.x.back(), qc.x.back());
  const Pchip fm1 = interpolant(m1), fqc = interpolant(qc);

  const std::vector<double> mus{0.125, 0.25, 0.5};
  std::vector<Pchip> withC, without;
  double tMax = std::numeric_limits<double>::infinity();
  for (double mu : mus) {
    ScenarioSpec a = moderated;
    a.mu = mu;
    ScenarioSpec b = a;
    b.scenario = Scenario::Warmup;
    Curve ca = acceleration_curve(a, 1.0), cb = acceleration_curve(b, 1.0);
    tMax = std::min({tMax, ca.x.back(), cb.x.back()});
    withC.push_back(interpolant(std::move(ca)));
    without.push_back(interpolant(std::move(cb)));
  }

  CompareResult result;
  result.table.header = {"s", "accel_diff_mu1_qcc", "t"};
  for (double mu : mus) {
    std::ostringstream os;
    os << "accel_diff_mu_" << mu;
    result.table.header.push_back(os.str());
  }
  std::vector<double> worst(1 + mus.size(), 0.0);
  for (int i = 0; i < samples; ++i) {
    const double f = static_cast<double>(i) / (samples - 1);
    const double s = sMax * f, t = tMax * f;
    std::vector<double> row{s, fm1(s) - fqc(s), t};
    worst[0] = std::max(worst[0], std::abs(row[1]));
    for (std::size_t j = 0; j < mus.size(); ++j) {
      row.push_back(withC[j](t) - without[j](t));
      worst[j + 1] = std::max(worst[j + 1], std::abs(row.back()));
    }
    result.table.rows.push_back(std::move(row));
  }
  result.summary["c"] = c;
  result.summary["s_max"] = sMax;
  result.summary["t_max"] = tMax;
  result.summary["max_abs_diff_mu1_qcc"] = worst[0];
  for (std::size_t j = 0; j < mus.size(); ++j) {
    result.summary["max_abs_diff_mu_" + format_double(mus[j])] = worst[j + 1];
  }
  return result;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

Check check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
}

// Runs body and turns a thrown error into a failed check.
template <typename F>
void guarded(std::vector<Check>& out, const std::string& name, F body) {
  try {
    out.push_back(body());
  } catch (const std::exception& e) {
    out.push_back({name, CheckStatus::Fail, std::string("threw: ") + e.what()});
  }
}

double max_conserved(const Trajectory& t) {
  double w = 0.0;
  for (const auto& s : t.samples) w = std::max(w, std::abs(s.conservedResidual));
  return w;
}

}  // namespace

std::vector<Check> run_verify(const VerifyOptions& options) {
  std::vector<Check> out;
  const Hooks hooks{options.q0Perturbation};

  guarded(out, "bang-bang warm-up", [] {
    ScenarioSpec s;
    s.incentive = "trivial";
    const auto r = run_scenario(s);
    const double mid = r.trajectory.samples[500].state.x[0][0];
    const bool ok = r.report.duration == 2.0 && std::abs(r.report.totalCost - 2.0) <= 1e-12 &&
                    std::abs(mid - 0.5) <= 1e-12;
    return check("bang-bang warm-up", ok,
                 "t_f=" + fmt(r.report.duration) + " cost=" + fmt(r.report.totalCost) + " x(1)=" + fmt(mid));
  });

  guarded(out, "quadratic warm-up", [] {
    ScenarioSpec s;
    s.incentive = "quadratic";
    const auto r = run_scenario(s);
    const bool ok = std::abs(r.report.duration - std::sqrt(6.0)) <= 1e-10 &&
                    std::abs(r.report.totalCost - 2.0 * std::sqrt(6.0) / 3.0) <= 1e-10 &&
                    max_conserved(r.trajectory) <= 1e-10;
    return check("quadratic warm-up", ok, "t_f=" + fmt(r.report.duration) + " cost=" + fmt(r.report.totalCost));
  });

  guarded(out, "elliptical warm-up vs closed form", [] {
    double worstQ = 0.0, worstX = 0.0;
    for (double mu : {0.1, 0.3, 0.6, 0.9}) {
      const auto sol = solve_reparam(arbitrary_duration_problem(PositionCost::constant(), Incentive::elliptical(mu)));
      const auto cf = warmup_elliptical(mu);
      worstQ = std::max(worstQ, std::abs(sol.q0 - cf.q));
      const auto traj = to_trajectory(sol, 1001);
      for (const auto& s : traj.samples) {
        const double t = std::min(s.t, cf.duration);
        worstX = std::max(worstX, std::abs(s.state.x[0][0] - cf.at(t).x));
      }
    }
    return check("elliptical warm-up vs closed form", worstQ <= 1e-7 && worstX <= 1e-6,
                 "max|dq0|=" + fmt(worstQ) + " max|dx|=" + fmt(worstX));
  });

  guarded(out, "mu limits", [] {
    const double small = warmup_elliptical(1e-4).duration;
    const double big = std::pow(warmup_elliptical(0.99).duration, 2) * std::sqrt(1 - 0.99 * 0.99);
    return check("mu limits", small >= 2.0 && small <= 2.01 && big >= 5.88 && big <= 6.12,
                 "t_f(1e-4)=" + fmt(small) + " t_f(0.99)^2 sqrt(1-mu^2)=" + fmt(big));
  });

  guarded(out, "conservation", [&] {
    double worst = 0.0;
    for (auto [scenario, mu, c] : {std::tuple{Scenario::Warmup, 0.6, 0.0}, std::tuple{Scenario::Spook, 0.5, 1.0},
                                   std::tuple{Scenario::Spook, 1.0, 1.0}}) {
      ScenarioSpec s;
      s.scenario = scenario;
      s.mu = mu;
      s.c = c;
      worst = std::max(worst, run_scenario(s, hooks).report.maxConservedResidual);
    }
    return check("conservation", worst <= 1e-6, "max|H|=" + fmt(worst));
  });

  guarded(out, "spooking boundary residuals", [&] {
    ScenarioSpec s;
    s.scenario = Scenario::Spook;
    s.mu = 0.5;
    const auto r = run_scenario(s, hooks).report;
    const double worst = *std::max_element(r.boundaryResiduals.begin(), r.boundaryResiduals.end());
    return check("spooking boundary residuals", worst <= 1e-6, "max=" + fmt(worst) + " via " + r.method);
  });

  guarded(out, "spooking costate and acceleration bounds", [] {
    const auto bl = boundary_lambdas(PositionCost::spook(1.0), Incentive::elliptical(0.5));
    ScenarioSpec s;
    s.scenario = Scenario::Spook;
    s.mu = 0.5;
    const auto r = run_scenario(s).report;
    const bool ok = std::abs(bl.lambda0 - std::sqrt(2.0)) <= 1e-12 &&
                    std::abs(bl.lambdaF + std::sqrt(0.75)) <= 1e-12 &&
                    std::abs(r.accelStart - std::sqrt(1.5 * 1.5 - 0.25) / 1.5) <= 1e-6 &&
                    std::abs(std::abs(r.accelEnd) - std::sqrt(0.75)) <= 1e-6;
    return check("spooking costate and acceleration bounds", ok,
                 "a(0)=" + fmt(r.accelStart) + " a(t_f)=" + fmt(r.accelEnd));
  });

  guarded(out, "fourth-order residual", [] {
    const auto p = arbitrary_duration_problem(PositionCost::spook(1.0), Incentive::elliptical(0.5));
    const auto traj = to_trajectory(solve_reparam(p), 2001);
    const double res = fourth_order_residual(ControlledSystem{2, 1, p.cost}, p.inc, traj);
    return check("fourth-order residual", res < 1e-2, "residual=" + fmt(res));
  });

  guarded(out, "quadratic spooking piecewise solution", [] {
    double worst = 0.0;
    bool ok = true;
    for (double c : {0.2, 1.0, 5.0}) {
      const auto sol = qcc_spook_solve(c);
      const auto l = sol.at(sol.tStar), r = sol.beam_branch(sol.tStar);
      const double jump = std::max({std::abs(l.x - r.x), std::abs(l.v - r.v), std::abs(l.a - r.a)});
      const double ends = std::max(std::abs(sol.at(0.0).a - 1.0), std::abs(sol.at(sol.tFinal).a + 1.0));
      ok = ok && sol.sFin > 0 && sol.sFin < tilde_s() && sol.matchingResidual <= 1e-10 && jump <= 1e-8 &&
           ends <= 1e-8 && sol.tStar < sol.tFinal;
      worst = std::max({worst, jump, ends, sol.matchingResidual});
    }
    return check("quadratic spooking piecewise solution", ok, "max residual=" + fmt(worst));
  });

  guarded(out, "quadratic-cost family", [] {
    bool ok = true;
    double prev = 0.0;
    for (int k : {1, 2, 3}) {
      const auto sol = qcc_hat_solution(1.0, k);
      const double cost = qcc_hat_total_cost(1.0, k).quadrature;
      ok = ok && std::abs(sol.duration - std::numbers::sqrt2 * std::numbers::pi * k) <= 1e-10 &&
           sol.terminalResidual <= 1e-9 && (k == 1 || cost < prev);
      prev = cost;
    }
    return check("quadratic-cost family", ok, "durations, terminal conditions, decreasing cost");
  });

  guarded(out, "quadratic-cost family constant", [] {
    const auto cost = qcc_hat_total_cost(1.0, 1);
    const double identified = 1.0 / std::tanh(std::numbers::pi) / std::numbers::sqrt2;
    return Check{"quadratic-cost family constant", CheckStatus::Info,
                 "quadrature=" + fmt(cost.quadrature) + " c*coth=" + fmt(cost.cothCandidate) +
                     " 2c*coth=" + fmt(cost.twiceCothCandidate) + " c^(3/4)coth/sqrt2=" + fmt(identified)};
  });

  guarded(out, "cost derivative sign", [] {
    bool ok = true;
    double worst = -1.0;
    const double tf = qcc_hat_solution(1.0, 1).duration;
    for (double f : {0.8, 1.3, 1.7}) {
      const auto d = qcc_hat_cost_derivative(1.0, f * tf);
      ok = ok && d.finiteDifference <= 1e-9 && d.printed <= 0.0;
      worst = std::max(worst, d.finiteDifference);
    }
    return check("cost derivative sign", ok, "max dC/dt_f=" + fmt(worst));
  });

  guarded(out, "incentive properties", [] {
    double worstMax = 0.0, worstFd = 0.0;
    for (const Incentive& inc : {Incentive::trivial(), Incentive::elliptical(0.4), Incentive::quadratic()}) {
      for (int i = 0; i <= 20; ++i) {
        const double s = 10.0 * i / 20.0;
        double best = -1.0;
        for (int j = 0; j <= 10000; ++j) {
          const double sig = j / 10000.0;
          best = std::max(best, sig * s + incentive_value(inc, sig));
        }
        worstMax = std::max(worstMax, best - potential(inc, s));
      }
      for (int i = 0; i < 200; ++i) {
        const double s = 0.01 + 4.99 * i / 199.0, h = 1e-6;
        const double fd = (potential(inc, s + h) - potential(inc, s - h)) / (2 * h);
        worstFd = std::max(worstFd, std::abs(fd - optimal_magnitude(inc, s).value));
      }
    }
    return check("incentive properties", worstMax <= 1e-9 && worstFd <= 1e-6,
                 "grid excess=" + fmt(worstMax) + " |chi'-sigma|=" + fmt(worstFd));
  });

  guarded(out, "elliptical inverse round trip", [] {
    double worst = 0.0;
    const Incentive inc = Incentive::elliptical(0.5);
    for (int i = 0; i <= 200; ++i) {
      const double l = -10.0 + 0.1 * i;
      worst = std::max(worst, std::abs(inverse_gradient(inc, potential_gradient(inc, l)) - l));
    }
    return check("elliptical inverse round trip", worst <= 1e-12, "max error=" + fmt(worst));
  });

  guarded(out, "integrator order and reversibility", [] {
    const numerics::VectorField f = [](const numerics::State& y, numerics::State& dy, double) { dy[0] = y[0]; };
    auto err = [&](double h) {
      numerics::IntegratorConfig cfg;
      cfg.adaptive = false;
      cfg.maxStep = h;
      return std::abs(numerics::integrate(f, {1.0}, 0.0, 1.0, cfg).y[0] - std::exp(1.0));
    };
    const double ratio = err(0.1) / err(0.05);
    numerics::IntegratorConfig cfg;
    const auto fwd = numerics::integrate(f, {1.0}, 0.0, 2.0, cfg);
    const double back = std::abs(numerics::integrate(f, fwd.y, 2.0, 0.0, cfg).y[0] - 1.0);
    return check("integrator order and reversibility", ratio >= 16.0 / 1.5 && back <= 10 * cfg.relTol,
                 "error ratio=" + fmt(ratio) + " round trip=" + fmt(back));
  });

  try {
    ScenarioSpec s;
    s.mu = 1.0;
    run_scenario(s);
    out.push_back({"mu = 1 warm-up", CheckStatus::Fail, "expected a degenerate-duration signal"});
  } catch (const SolverError& e) {
    out.push_back({"mu = 1 warm-up", e.code() == ErrorCode::Degenerate ? CheckStatus::Degenerate : CheckStatus::Fail,
                   e.what()});
  }
  return out;
}

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Degenerate:
      return "DEGENERATE";
    case CheckStatus::Info:
      return "INFO";
  }
  return "?";
}

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    out << std::left << std::setw(11) << status_name(c.status) << std::setw(42) << c.name << c.detail << '\n';
  }
}

bool all_passed(const std::vector<Check>& checks) {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Fail; });
}

}  // namespace modctl::cli
