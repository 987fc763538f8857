#include "noether/scaling.hpp"

#include <cmath>

namespace noether {

namespace {

constexpr double kExponentTolerance = 1e-12;

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be positive");
}

// Total time derivative of f(q, t) along (q, qdot) by central differences.
double boundary_rate(const ScalingLaw& law, const PhaseState& st) {
  if (!law.boundary_term) return 0.0;
  constexpr double h = 1e-6;
  const Vector plus = st.q + h * st.qdot;
  const Vector minus = st.q - h * st.qdot;
  return (law.boundary_term(plus, st.t + h) - law.boundary_term(minus, st.t - h)) / (2.0 * h);
}

}  // namespace

std::optional<double> ScalingLaw::dynamical_exponent() const {
  if (a == 0.0) return std::nullopt;
  return b / a;
}

ScalingLaw ScalingLaw::from_exponents(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw UsageError("scaling exponents must be finite");
  }
  if (std::abs(c - (2.0 * a - b)) > kExponentTolerance) {
    throw UsageError("scaling exponents violate c = 2a - b");
  }
  return ScalingLaw{a, b, c, std::nullopt, {}};
}

ScalingLaw solve_exponents(double k, double a) {
  if (a == 0.0) throw UsageError("solve_exponents needs a != 0; build pure-time laws with from_exponents");
  if (!std::isfinite(k) || !std::isfinite(a)) throw UsageError("degree and a must be finite");
  return ScalingLaw{a, a * (2.0 - k) / 2.0, a * (2.0 + k) / 2.0, k, {}};
}

Trajectory apply_scaling(const Trajectory& traj, const ScalingLaw& law, double lambda) {
  require_positive_lambda(lambda);
  const double time_factor = std::pow(lambda, law.b);
  const double q_factor = std::pow(lambda, law.a);
  const double v_factor = std::pow(lambda, law.a - law.b);
  const double s_factor = std::pow(lambda, law.c);

  const Eigen::Index n = traj.dim();
  Vector factors(2 * n + 1);
  factors.head(n).setConstant(q_factor);
  factors.segment(n, n).setConstant(v_factor);
  factors[2 * n] = s_factor;

  Trajectory out{traj.system, {}, traj.dense.scaled(time_factor, factors), traj.tol, traj.stats};
  out.samples.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.samples.push_back(TrajectorySample{time_factor * s.t, q_factor * s.q, v_factor * s.qdot, s_factor * s.action});
  }
  return out;
}

double eom_residual(const DynamicalSystem& sys, const Trajectory& traj) {
  const auto& samples = traj.samples;
  if (samples.size() < 5) throw UsageError("eom_residual needs at least 5 samples");
  if (traj.dim() != sys.dim()) throw UsageError("trajectory dimension does not match the system");
  const double h = (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < samples.size(); ++j) {
    const Vector qddot = (-samples[j - 2].q + 16.0 * samples[j - 1].q - 30.0 * samples[j].q +
                          16.0 * samples[j + 1].q - samples[j + 2].q) /
                         (12.0 * h * h);
    const Vector expected = acceleration(sys, PhaseState{samples[j].q, samples[j].qdot, samples[j].t});
    worst = std::max(worst, (qddot - expected).cwiseAbs().maxCoeff());
  }
  return worst;
}

double symmetry_residual(const DynamicalSystem& sys, const ScalingLaw& law, double lambda,
                         std::span<const PhaseState> states) {
  require_positive_lambda(lambda);
  const double time_factor = std::pow(lambda, law.b);
  const double q_factor = std::pow(lambda, law.a);
  const double v_factor = std::pow(lambda, law.a - law.b);
  const double lagrangian_factor = std::pow(lambda, law.c);
  double worst = 0.0;
  for (const auto& st : states) {
    const PhaseState mapped{q_factor * st.q, v_factor * st.qdot, time_factor * st.t};
    const double lhs = evaluate_lagrangian(sys, mapped) * time_factor;
    const double rhs = lagrangian_factor * evaluate_lagrangian(sys, st) + boundary_rate(law, st);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace noether
