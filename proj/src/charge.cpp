#include "noether/charge.hpp"

#include <cmath>

namespace noether {

namespace {

void require_matching(const DynamicalSystem& sys, const Trajectory& traj) {
  if (sys.id() != traj.system.id()) {
    throw UsageError("trajectory was integrated for '" + traj.system.id() + "', not '" + sys.id() + "'");
  }
}

// Integral over [lo, hi] of the quadratic interpolating (x_i, f_i), i = 0..2.
double quadratic_integral(double x0, double x1, double x2, double f0, double f1, double f2, double lo, double hi) {
  const double d01 = (f1 - f0) / (x1 - x0);
  const double d12 = (f2 - f1) / (x2 - x1);
  const double d012 = (d12 - d01) / (x2 - x0);
  const double h1 = x1 - x0;
  auto antiderivative = [&](double x) {
    const double u = x - x0;
    return f0 * u + d01 * u * u / 2.0 + d012 * (u * u * u / 3.0 - h1 * u * u / 2.0);
  };
  return antiderivative(hi) - antiderivative(lo);
}

}  // namespace

void ChargeSeries::update_drift() {
  if (Q.empty()) {
    Q0 = drift_abs = drift_rel = 0.0;
    return;
  }
  Q0 = Q.front();
  drift_abs = 0.0;
  for (double value : Q) drift_abs = std::max(drift_abs, std::abs(value - Q0));
  drift_rel = drift_abs / (1.0 + std::abs(Q0));
}

ChargeSeries noether_charge_series(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj) {
  require_matching(sys, traj);
  if (!std::isfinite(law.a) || !std::isfinite(law.b) || !std::isfinite(law.c)) {
    throw UsageError("scaling exponents must be finite");
  }
  ChargeSeries series;
  series.t.reserve(traj.samples.size());
  series.Q.reserve(traj.samples.size());
  series.decomposition.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    const PhaseState st{s.q, s.qdot, s.t};
    ChargeTerms terms;
    terms.momentum = law.a * s.q.dot(sys.mass_matrix() * s.qdot);
    terms.energy = -law.b * s.t * evaluate_hamiltonian(sys, st);
    terms.action = -law.c * s.action;
    terms.boundary = -law.boundary_value(s.q, s.t);
    series.t.push_back(s.t);
    series.Q.push_back(terms.momentum + terms.energy + terms.action + terms.boundary);
    series.decomposition.push_back(terms);
  }
  series.update_drift();
  return series;
}

ChargeSeries free_dilation_charge(const Trajectory& traj, double a) {
  if (!traj.system.is_free()) throw UsageError("free_dilation_charge requires a free system");
  const Matrix& mass = traj.system.mass_matrix();
  ChargeSeries series;
  for (const auto& s : traj.samples) {
    series.t.push_back(s.t);
    series.Q.push_back(a * s.qdot.dot(mass * (s.q - s.qdot * s.t)));
  }
  series.update_drift();
  return series;
}

KineticPotentialSplit kv_split_charge(const DynamicalSystem& sys, const ScalingLaw& law, const Trajectory& traj) {
  require_matching(sys, traj);
  const std::size_t count = traj.samples.size();
  std::vector<double> t(count);
  std::vector<double> kinetic(count);
  std::vector<double> potential(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto& s = traj.samples[j];
    t[j] = s.t;
    kinetic[j] = sys.kinetic_energy(s.qdot);
    potential[j] = sys.potential_energy(s.q);
  }

  KineticPotentialSplit out;
  out.kinetic_coefficient = -2.0 * law.a;
  out.potential_coefficient = 2.0 * (law.a - law.b);
  out.kinetic_integral = cumulative_simpson(t, kinetic);
  out.potential_integral = cumulative_simpson(t, potential);
  auto& series = out.series;
  series.t = t;
  for (std::size_t j = 0; j < count; ++j) {
    const auto& s = traj.samples[j];
    ChargeTerms terms;
    terms.momentum = law.a * s.q.dot(sys.mass_matrix() * s.qdot);
    terms.energy = out.potential_coefficient * out.potential_integral[j];
    terms.action = out.kinetic_coefficient * out.kinetic_integral[j];
    terms.boundary = -law.boundary_value(s.q, s.t);
    series.Q.push_back(terms.momentum + terms.energy + terms.action + terms.boundary);
    series.decomposition.push_back(terms);
  }
  series.update_drift();
  return out;
}

DriftReport charge_drift_report(const ChargeSeries& series) {
  if (series.Q.empty()) throw UsageError("empty charge series");
  DriftReport report;
  const double q0 = series.Q.front();
  for (std::size_t j = 0; j < series.Q.size(); ++j) {
    const double d = std::abs(series.Q[j] - q0);
    if (d > report.drift_abs) {
      report.drift_abs = d;
      report.worst_t = series.t[j];
    }
  }
  report.drift_rel = report.drift_abs / (1.0 + std::abs(q0));
  return report;
}

std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw UsageError("cumulative_simpson: size mismatch");
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    return out;
  }
  for (std::size_t i = 2; i < n; i += 2) {
    out[i] = out[i - 2] + quadratic_integral(t[i - 2], t[i - 1], t[i], f[i - 2], f[i - 1], f[i], t[i - 2], t[i]);
  }
  for (std::size_t i = 1; i < n; i += 2) {
    // Odd points: extend from the preceding even point with a quadratic
    // through i-1, i, i+1 (or i-2, i-1, i at the right edge).
    if (i + 1 < n) {
      out[i] = out[i - 1] + quadratic_integral(t[i - 1], t[i], t[i + 1], f[i - 1], f[i], f[i + 1], t[i - 1], t[i]);
    } else {
      out[i] = out[i - 1] + quadratic_integral(t[i - 2], t[i - 1], t[i], f[i - 2], f[i - 1], f[i], t[i - 1], t[i]);
    }
  }
  return out;
}

void write_charge_csv(std::ostream& os, const ChargeSeries& series) {
  os << "t,Q,momentum_term,energy_term,action_term\n";
  const auto old_precision = os.precision(17);
  for (std::size_t j = 0; j < series.Q.size(); ++j) {
    os << series.t[j] << ',' << series.Q[j];
    if (j < series.decomposition.size()) {
      const auto& d = series.decomposition[j];
      os << ',' << d.momentum << ',' << d.energy << ',' << d.action << '\n';
    } else {
      os << ",,,\n";
    }
  }
  os.precision(old_precision);
}

}  // namespace noether
