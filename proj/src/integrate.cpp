#include "noether/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace noether {

namespace {

// Extended state layout: [q (n), qdot (n), S (1)].
TrajectorySample unpack(double t, const Vector& y, Eigen::Index n) {
  return TrajectorySample{t, y.head(n), y.segment(n, n), y[2 * n]};
}

}  // namespace

Trajectory integrate_trajectory(const DynamicalSystem& sys, const PhaseState& ic, double t_end,
                                const IntegrateOptions& options) {
  sys.check_state(ic);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw UsageError("t_end must be positive and finite");
  if (!(options.tol >= 1e-14 && options.tol <= 1e-3)) throw UsageError("tol must lie in [1e-14, 1e-3]");
  if (options.grid_intervals < 4) throw UsageError("dense grid needs at least 4 intervals");

  const Eigen::Index n = sys.dim();
  Vector y0(2 * n + 1);
  y0 << ic.q, ic.qdot, options.initial_action;

  const Matrix& minv = sys.inverse_mass_matrix();
  const Potential& potential = sys.potential();
  ode::Rhs rhs = [&](double, const Vector& y, Vector& dydt) {
    const auto q = y.head(n);
    const auto qdot = y.segment(n, n);
    sys.check_position(q);
    dydt.resize(2 * n + 1);
    dydt.head(n) = qdot;
    dydt.segment(n, n) = -(minv * potential.gradient(q));
    dydt[2 * n] = sys.kinetic_energy(qdot) - potential.value(q);
  };

  ode::Options opt;
  opt.rtol = options.tol;
  opt.atol = options.tol;
  if (options.max_step) opt.max_step = *options.max_step;
  ode::Stats stats;
  auto dense = ode::integrate(rhs, 0.0, y0, t_end, opt, &stats);

  Trajectory traj{sys, {}, std::move(dense), options.tol,
                  IntegrationStats{stats.steps_accepted, stats.steps_rejected, stats.rhs_evaluations}};
  const std::size_t intervals = options.grid_intervals;
  traj.samples.reserve(intervals + 1);
  traj.samples.push_back(unpack(0.0, y0, n));
  for (std::size_t j = 1; j <= intervals; ++j) {
    const double t = j == intervals ? t_end : t_end * static_cast<double>(j) / static_cast<double>(intervals);
    traj.samples.push_back(unpack(t, traj.dense.value(t), n));
  }
  return traj;
}

SampleValue sample_at(const Trajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.t_end())) throw UsageError("sample time outside [0, t_end]");
  auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), t,
                             [](const TrajectorySample& s, double value) { return s.t < value; });
  if (it != traj.samples.end() && it->t == t) return SampleValue{it->q, it->qdot, it->action};
  const Eigen::Index n = traj.dim();
  const Vector y = traj.dense.value(t);
  return SampleValue{y.head(n), y.segment(n, n), y[2 * n]};
}

std::optional<double> detect_period(const Trajectory& traj, double tol_period) {
  if (!(tol_period > 0.0)) throw UsageError("period tolerance must be positive");
  const Eigen::Index n = traj.dim();
  const Vector& q0 = traj.samples.front().q;
  const Vector& v0 = traj.samples.front().qdot;
  const double threshold = tol_period * (1.0 + q0.norm() + v0.norm());

  Vector y;
  Vector dy;
  // Slope of the squared recurrence distance; its - to + crossings are the
  // local minima of the distance to the initial phase point.
  auto slope = [&](double t) {
    traj.dense.evaluate(t, y, dy);
    return 2.0 * (y.head(n) - q0).dot(dy.head(n)) + 2.0 * (y.segment(n, n) - v0).dot(dy.segment(n, n));
  };
  auto distance = [&](double t) {
    const Vector s = traj.dense.value(t);
    return (s.head(n) - q0).norm() + (s.segment(n, n) - v0).norm();
  };

  constexpr int kSubdivisions = 8;
  const auto& segments = traj.dense.segments();
  double t_prev = 0.0;
  double slope_prev = 0.0;
  bool first = true;
  for (const auto& seg : segments) {
    for (int i = 1; i <= kSubdivisions; ++i) {
      const double t = seg.t0() + (seg.t1() - seg.t0()) * i / kSubdivisions;
      const double s = slope(t);
      if (!first && slope_prev < 0.0 && s >= 0.0) {
        double lo = t_prev;
        double hi = t;
        for (int iter = 0; iter < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++iter) {
          const double mid = 0.5 * (lo + hi);
          (slope(mid) < 0.0 ? lo : hi) = mid;
        }
        const double candidate = 0.5 * (lo + hi);
        if (distance(candidate) <= threshold) return candidate;
      }
      first = false;
      t_prev = t;
      slope_prev = s;
    }
  }
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.dim();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",q" << i;
  for (int i = 1; i <= n; ++i) os << ",qd" << i;
  os << ",S\n";
  const auto old_precision = os.precision(17);
  for (const auto& s : traj.samples) {
    os << s.t;
    for (int i = 0; i < n; ++i) os << ',' << s.q[i];
    for (int i = 0; i < n; ++i) os << ',' << s.qdot[i];
    os << ',' << s.action << '\n';
  }
  os.precision(old_precision);
}

}  // namespace noether
