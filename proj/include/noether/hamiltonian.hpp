#pragma once

#include <functional>
#include <vector>

#include "noether/charge.hpp"

namespace noether {

/// Canonical coordinates; p = M qdot.
struct PhasePoint {
  Vector q;
  Vector p;
  double t = 0.0;
};

PhasePoint to_phase_point(const DynamicalSystem& sys, const PhaseState& st);

/// H(q, p) = p^T M^{-1} p / 2 + V(q).
double phase_hamiltonian(const DynamicalSystem& sys, const PhasePoint& pt);

enum class Gradients { kAnalytic, kFiniteDifference };

/// Point-transformation generator per unit scaling parameter:
/// G = a p.q - b t H.
double generator_value(const DynamicalSystem& sys, const ScalingLaw& law, const PhasePoint& pt);

/// |{G, H} + dG/dt + c (H - p.dH/dp)|, which vanishes identically when the law
/// is a symmetry of the system up to the factor lambda^c.
double generator_residual(const DynamicalSystem& sys, const ScalingLaw& law, const PhasePoint& pt,
                          Gradients mode = Gradients::kAnalytic);

/// Phase-space function f(q, p, t).
using PhaseFunction = std::function<double(const Vector& q, const Vector& p, double t)>;

/// {f, g} = df/dq . dg/dp - df/dp . dg/dq by central differences.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt, double step = 1e-6);

/// max over interior grid points of |d/dt (G(q(t), p(t), t) - c S(t))| using
/// a 5-point centered derivative.
double generator_flow_defect(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj);

struct PartialConservationReport {
  /// max_t |Qt(t) - Qt(0) + dmu S(t)| / (1 + |Qt(0)|).
  double residual = 0.0;
  std::vector<double> t;
  /// Qt = mu (a q^T M qdot - b t H), the ordinary charge of mu L.
  std::vector<double> q_tilde;
  /// Qt + dmu S; equals the generalized charge at mu = 1 with dmu = -c.
  std::vector<double> reconstructed;
};

/// Partial conservation law for the modified Lagrangian mu L with
/// mu' = lambda^(-c) mu, i.e. dmu = -c mu per unit scaling parameter.
PartialConservationReport partial_conservation_check(const DynamicalSystem& sys, const ScalingLaw& law,
                                                     const Trajectory& traj, double mu, double delta_mu_rate);
PartialConservationReport partial_conservation_check(const DynamicalSystem& sys, const ScalingLaw& law,
                                                     const Trajectory& traj, double mu);

}  // namespace noether
