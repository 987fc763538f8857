#pragma once

#include <functional>
#include <optional>
#include <span>

#include "noether/integrate.hpp"

namespace noether {

/// Kepler-type rescaling (q, t, Lambda) -> (lambda^a q, lambda^b t, lambda^c).
/// The boundary term delta f is a hook that all built-in laws leave empty
/// (the zero function).
struct ScalingLaw {
  using BoundaryTerm = std::function<double(const Vector& q, double t)>;

  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::optional<double> k;  // potential degree the law was solved for
  BoundaryTerm boundary_term;

  /// b / a; undefined for pure-time laws.
  std::optional<double> dynamical_exponent() const;
  double boundary_value(const Vector& q, double t) const {
    return boundary_term ? boundary_term(q, t) : 0.0;
  }

  /// (a, b, c) given directly; requires c = 2a - b to 1e-12.
  static ScalingLaw from_exponents(double a, double b, double c);
};

/// Solves (k - 2) a + 2 b = 0 and c = 2a - b for fixed a != 0.
ScalingLaw solve_exponents(double k, double a = 1.0);

/// Maps the curve to t' = lambda^b t, q' = lambda^a q,
/// dq'/dt' = lambda^(a-b) qdot, S' = lambda^c S on the transformed grid.
Trajectory apply_scaling(const Trajectory& traj, const ScalingLaw& law, double lambda);

/// max over interior grid points of |qddot_fd - M^{-1}(-grad V(q))|, with a
/// 5-point central second difference on the uniform grid.
double eom_residual(const DynamicalSystem& sys, const Trajectory& traj);

/// max over `states` of |L(q', dq'/dt') dt'/dt - lambda^c L(q, qdot) - d(delta f)/dt|.
double symmetry_residual(const DynamicalSystem& sys, const ScalingLaw& law, double lambda,
                         std::span<const PhaseState> states);

}  // namespace noether
