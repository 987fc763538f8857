#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "noether/dynamics.hpp"
#include "noether/ode.hpp"

namespace noether {

struct TrajectorySample {
  double t = 0.0;
  Vector q;
  Vector qdot;
  double action = 0.0;  // S(t) = integral of L from 0 to t
};

struct IntegrationStats {
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// A solution curve of a DynamicalSystem with the classical action carried
/// alongside. `samples` is the uniform dense grid on [0, t_end]; `dense`
/// interpolates the extended state (q, qdot, S) anywhere in between.
struct Trajectory {
  DynamicalSystem system;
  std::vector<TrajectorySample> samples;
  ode::DenseSolution dense;
  double tol = 0.0;
  IntegrationStats stats;

  int dim() const { return system.dim(); }
  double t_end() const { return samples.back().t; }
  /// Accepted step endpoints of the underlying integration.
  std::vector<double> step_times() const { return dense.step_times(); }
};

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultGridIntervals = 1000;

struct IntegrateOptions {
  double tol = kDefaultTolerance;
  /// Number of uniform intervals of the dense grid (grid has one more point).
  std::size_t grid_intervals = kDefaultGridIntervals;
  /// S at t = 0; non-zero only when continuing an earlier integration.
  double initial_action = 0.0;
  /// Upper bound on the step size; infinite by default.
  std::optional<double> max_step;
};

/// Integrates (q, qdot, S)' = (qdot, M^{-1}(-grad V), L) from `ic` (taken at
/// t = 0) to t_end. Requires tol in [1e-14, 1e-3].
Trajectory integrate_trajectory(const DynamicalSystem& sys, const PhaseState& ic, double t_end,
                                const IntegrateOptions& options = {});

struct SampleValue {
  Vector q;
  Vector qdot;
  double action = 0.0;
};

/// Dense-output evaluation; grid times return the stored sample verbatim.
SampleValue sample_at(const Trajectory& traj, double t);

/// Smallest T > 0 at which the orbit returns to its initial phase point within
/// tol_period * (1 + |q(0)| + |qdot(0)|). std::nullopt when aperiodic on the
/// covered interval.
std::optional<double> detect_period(const Trajectory& traj, double tol_period = 1e-6);

/// CSV: header `t,q1..qn,qd1..qdn,S`, one row per grid point, 17 significant
/// digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace noether
