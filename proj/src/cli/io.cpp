#include "modctl/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace modctl::cli {

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw SolverError(ErrorCode::Domain, "malformed number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  if (text.empty()) throw SolverError(ErrorCode::Domain, "empty parameter list");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw SolverError(ErrorCode::Domain, "range must be a:b:step");
    const double a = parse_number(parts[0]), b = parse_number(parts[1]), step = parse_number(parts[2]);
    if (!(step > 0.0) || b < a) throw SolverError(ErrorCode::Domain, "range needs a <= b and step > 0");
    const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 1'000'000) throw SolverError(ErrorCode::Domain, "range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x,v,a,lambda,lambda_dot,u,cost_density,conserved_residual\n";
  for (const auto& s : traj.samples) {
    const double a = s.u.size() ? s.u[0] : 0.0;
    const double fields[] = {s.t,
                             s.state.x[0][0],
                             s.state.x[1][0],
                             a,
                             s.state.lambda[0][0],
                             s.state.lambda[1][0],
                             a,
                             s.costDensity,
                             s.conservedResidual};
    for (std::size_t i = 0; i < std::size(fields); ++i) {
      if (i) out << ',';
      out << format_double(fields[i]);
    }
    out << '\n';
  }
}

nlohmann::ordered_json report_to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(r.spec.scenario);
  nlohmann::ordered_json params;
  params["incentive"] = r.spec.incentive;
  if (r.spec.incentive == "elliptical") {
    params["mu"] = r.spec.mu;
  } else {
    params["mu"] = nullptr;
  }
  params["c"] = r.spec.scenario == Scenario::Warmup ? nlohmann::ordered_json(nullptr)
                                                    : nlohmann::ordered_json(r.spec.c);
  params["k"] = r.spec.scenario == Scenario::QccHat ? nlohmann::ordered_json(r.spec.k)
                                                    : nlohmann::ordered_json(nullptr);
  j["params"] = params;
  j["t_f"] = r.duration;
  j["total_cost"] = r.totalCost;
  j["t_star"] = r.tStar ? nlohmann::ordered_json(*r.tStar) : nlohmann::ordered_json(nullptr);
  j["boundary_residuals"] = r.boundaryResiduals;
  j["max_conserved_residual"] = r.maxConservedResidual;
  j["accel_start"] = r.accelStart;
  j["accel_end"] = r.accelEnd;
  j["method"] = r.method;
  j["solver"] = {{"iterations", r.iterations}, {"wall_ms", r.wallMs}};
  return j;
}

nlohmann::ordered_json error_to_json(const SolverError& e) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace modctl::cli
