#include "noether/hamiltonian.hpp"

#include <cmath>

namespace noether {

PhasePoint to_phase_point(const DynamicalSystem& sys, const PhaseState& st) {
  sys.check_state(st);
  return PhasePoint{st.q, sys.mass_matrix() * st.qdot, st.t};
}

double phase_hamiltonian(const DynamicalSystem& sys, const PhasePoint& pt) {
  if (pt.p.size() != sys.dim()) throw UsageError("momentum has wrong dimension");
  return 0.5 * pt.p.dot(sys.inverse_mass_matrix() * pt.p) + sys.potential_energy(pt.q);
}

double generator_value(const DynamicalSystem& sys, const ScalingLaw& law, const PhasePoint& pt) {
  return law.a * pt.p.dot(pt.q) - law.b * pt.t * phase_hamiltonian(sys, pt);
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& pt, double step) {
  const auto n = pt.q.size();
  Vector q = pt.q;
  Vector p = pt.p;
  auto partial = [&](const PhaseFunction& fn, Vector& coord, Eigen::Index i) {
    const double saved = coord[i];
    const double h = step * std::max(1.0, std::abs(saved));
    coord[i] = saved + h;
    const double plus = fn(q, p, pt.t);
    coord[i] = saved - h;
    const double minus = fn(q, p, pt.t);
    coord[i] = saved;
    return (plus - minus) / (2.0 * h);
  };
  double bracket = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    bracket += partial(f, q, i) * partial(g, p, i) - partial(f, p, i) * partial(g, q, i);
  }
  return bracket;
}

double generator_residual(const DynamicalSystem& sys, const ScalingLaw& law, const PhasePoint& pt,
                          Gradients mode) {
  sys.check_position(pt.q);
  const Matrix& minv = sys.inverse_mass_matrix();
  const double h = phase_hamiltonian(sys, pt);

  if (mode == Gradients::kAnalytic) {
    const Vector dh_dq = sys.potential_gradient(pt.q);
    const Vector dh_dp = minv * pt.p;
    const Vector dg_dq = law.a * pt.p - law.b * pt.t * dh_dq;
    const Vector dg_dp = law.a * pt.q - law.b * pt.t * dh_dp;
    const double bracket = dg_dq.dot(dh_dp) - dg_dp.dot(dh_dq);
    const double dg_dt = -law.b * h;
    return std::abs(bracket + dg_dt + law.c * (h - pt.p.dot(dh_dp)));
  }

  const PhaseFunction hamiltonian = [&](const Vector& q, const Vector& p, double) {
    return 0.5 * p.dot(minv * p) + sys.potential().value(q);
  };
  const PhaseFunction generator = [&](const Vector& q, const Vector& p, double t) {
    return law.a * p.dot(q) - law.b * t * hamiltonian(q, p, t);
  };
  constexpr double step = 1e-6;
  const double bracket = poisson_bracket(generator, hamiltonian, pt, step);
  const double ht = step * std::max(1.0, std::abs(pt.t));
  const double dg_dt = (generator(pt.q, pt.p, pt.t + ht) - generator(pt.q, pt.p, pt.t - ht)) / (2.0 * ht);
  double p_dh_dp = 0.0;
  Vector p = pt.p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    const double hp = step * std::max(1.0, std::abs(saved));
    p[i] = saved + hp;
    const double plus = hamiltonian(pt.q, p, pt.t);
    p[i] = saved - hp;
    const double minus = hamiltonian(pt.q, p, pt.t);
    p[i] = saved;
    p_dh_dp += saved * (plus - minus) / (2.0 * hp);
  }
  return std::abs(bracket + dg_dt + law.c * (h - p_dh_dp));
}

double generator_flow_defect(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj) {
  const auto& samples = traj.samples;
  if (samples.size() < 5) throw UsageError("generator_flow_defect needs at least 5 samples");
  std::vector<double> f(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& s = samples[j];
    const PhasePoint pt = to_phase_point(sys, PhaseState{s.q, s.qdot, s.t});
    f[j] = generator_value(sys, law, pt) - law.c * s.action;
  }
  const double h = (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < f.size(); ++j) {
    const double derivative = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
    worst = std::max(worst, std::abs(derivative));
  }
  return worst;
}

PartialConservationReport partial_conservation_check(const DynamicalSystem& sys, const ScalingLaw& law,
                                                     const Trajectory& traj, double mu, double delta_mu_rate) {
  if (!(mu > 0.0)) throw UsageError("mu must be positive");
  if (sys.id() != traj.system.id()) throw UsageError("trajectory does not belong to the system");
  PartialConservationReport report;
  for (const auto& s : traj.samples) {
    const PhaseState st{s.q, s.qdot, s.t};
    const double q_tilde =
        mu * (law.a * s.q.dot(sys.mass_matrix() * s.qdot) - law.b * s.t * evaluate_hamiltonian(sys, st));
    report.t.push_back(s.t);
    report.q_tilde.push_back(q_tilde);
    report.reconstructed.push_back(q_tilde + delta_mu_rate * s.action);
  }
  const double q0 = report.q_tilde.front();
  double worst = 0.0;
  for (double value : report.reconstructed) worst = std::max(worst, std::abs(value - q0));
  report.residual = worst / (1.0 + std::abs(q0));
  return report;
}

PartialConservationReport partial_conservation_check(const DynamicalSystem& sys, const ScalingLaw& law,
                                                     const Trajectory& traj, double mu) {
  return partial_conservation_check(sys, law, traj, mu, -law.c * mu);
}

}  // namespace noether
