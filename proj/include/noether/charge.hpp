#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "noether/scaling.hpp"

namespace noether {

/// Per-sample split of the charge into its additive terms.
struct ChargeTerms {
  double momentum = 0.0;  // a q^T M qdot
  double energy = 0.0;    // -b t H
  double action = 0.0;    // -c S
  double boundary = 0.0;  // -delta f
};

/// Q(t) on a trajectory's dense grid, stored per unit of the infinitesimal
/// scaling parameter.
struct ChargeSeries {
  std::vector<double> t;
  std::vector<double> Q;
  std::vector<ChargeTerms> decomposition;  // empty when not applicable
  double Q0 = 0.0;
  double drift_abs = 0.0;
  double drift_rel = 0.0;

  /// Recomputes Q0 and the drift statistics from `Q`.
  void update_drift();
};

/// Q = a q^T M qdot - b t H - c S - delta f.
ChargeSeries noether_charge_series(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj);

/// Q_free = a qdot^T M (q - qdot t). Requires V = 0.
ChargeSeries free_dilation_charge(const Trajectory& traj, double a);

/// Q = a q^T M qdot - 2a int K + 2(a - b) int V, the running integrals taken
/// by cumulative Simpson quadrature on the dense grid.
struct KineticPotentialSplit {
  ChargeSeries series;
  double kinetic_coefficient = 0.0;    // -2a
  double potential_coefficient = 0.0;  // 2(a - b)
  std::vector<double> kinetic_integral;
  std::vector<double> potential_integral;
};

KineticPotentialSplit kv_split_charge(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj);

struct DriftReport {
  double drift_abs = 0.0;
  double drift_rel = 0.0;
  double worst_t = 0.0;
};

DriftReport charge_drift_report(const ChargeSeries& series);

/// Running integral of f over t; exact for piecewise quadratics, O(h^4) for
/// smooth f on a uniform grid.
std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f);

/// CSV: `t,Q,momentum_term,energy_term,action_term`.
void write_charge_csv(std::ostream& os, const ChargeSeries& series);

}  // namespace noether
