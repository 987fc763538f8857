#include "noether/virial.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "noether/charge.hpp"

namespace noether {

PeriodAverages period_averages(const Trajectory& traj, double T) {
  if (!(T > 0.0)) throw UsageError("period must be positive");
  if (T > traj.t_end() * (1.0 + 1e-12)) throw UsageError("period exceeds the trajectory span");
  T = std::min(T, traj.t_end());

  const double grid_step = traj.t_end() / static_cast<double>(traj.samples.size() - 1);
  auto intervals = static_cast<std::size_t>(std::ceil(T / grid_step));
  intervals = std::max<std::size_t>(intervals, 1000);
  if (intervals % 2 == 1) ++intervals;

  std::vector<double> t(intervals + 1);
  std::vector<double> kinetic(intervals + 1);
  std::vector<double> potential(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    t[j] = j == intervals ? T : T * static_cast<double>(j) / static_cast<double>(intervals);
    const auto s = sample_at(traj, t[j]);
    kinetic[j] = traj.system.kinetic_energy(s.qdot);
    potential[j] = traj.system.potential_energy(s.q);
  }
  const auto int_k = cumulative_simpson(t, kinetic);
  const auto int_v = cumulative_simpson(t, potential);
  return PeriodAverages{int_k.back() / T, int_v.back() / T};
}

VirialReport virial_check(double k, const PeriodAverages& averages, double tol, double T) {
  VirialReport r;
  r.T = T;
  r.avg_K = averages.avg_K;
  r.avg_V = averages.avg_V;
  r.ratio = averages.avg_V != 0.0 ? averages.avg_K / averages.avg_V : std::nan("");
  r.expected_ratio = k / 2.0;
  r.defect = std::abs(averages.avg_K - r.expected_ratio * averages.avg_V);
  r.tol = tol;
  r.pass = r.defect <= tol;
  return r;
}

std::optional<VirialReport> periodic_virial_check(const Trajectory& traj, double tol, double tol_period,
                                                  std::string* reason) {
  const auto k = traj.system.homogeneity_degree();
  if (!k) {
    if (reason) *reason = "unsupported: potential has no homogeneity degree";
    return std::nullopt;
  }
  const auto period = detect_period(traj, tol_period);
  if (!period) {
    if (reason) *reason = "unsupported: aperiodic motion";
    return std::nullopt;
  }
  return virial_check(*k, period_averages(traj, *period), tol, *period);
}

std::string to_json(const VirialReport& report) {
  nlohmann::json j{{"T", report.T},
                   {"avg_K", report.avg_K},
                   {"avg_V", report.avg_V},
                   {"defect", report.defect},
                   {"pass", report.pass}};
  return j.dump();
}

}  // namespace noether
