#pragma once

#include <optional>
#include <string>

#include "noether/integrate.hpp"

namespace noether {

struct PeriodAverages {
  double avg_K = 0.0;
  double avg_V = 0.0;
};

/// (1/T) int_0^T K dt and (1/T) int_0^T V dt by composite Simpson quadrature.
/// The grid on [0, T] is at least as fine as the trajectory's dense grid.
PeriodAverages period_averages(const Trajectory& traj, double T);

struct VirialReport {
  double T = 0.0;
  double avg_K = 0.0;
  double avg_V = 0.0;
  double ratio = 0.0;           // avg_K / avg_V
  double expected_ratio = 0.0;  // k / 2
  double defect = 0.0;          // |avg_K - (k/2) avg_V|
  double tol = 0.0;
  bool pass = false;
};

/// Checks <K> = (k/2) <V>; passes iff defect <= tol.
VirialReport virial_check(double k, const PeriodAverages& averages, double tol, double T = 0.0);

/// Full pipeline on one trajectory: period detection, averages, check.
/// Returns std::nullopt (with `reason` filled) for unsupported cases: no
/// homogeneity degree or no detected period.
std::optional<VirialReport> periodic_virial_check(const Trajectory& traj, double tol, double tol_period = 1e-6,
                                                  std::string* reason = nullptr);

/// JSON object with keys T, avg_K, avg_V, defect, pass.
std::string to_json(const VirialReport& report);

}  // namespace noether
