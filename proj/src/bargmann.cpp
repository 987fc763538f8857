#include "noether/bargmann.hpp"

#include <cmath>
#include <random>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace noether {

namespace {

constexpr double kProfileTimeStep = 1e-5;

Eigen::Index s_index(int n) { return n + 1; }

}  // namespace

// ---------------------------------------------------------------- profiles

PPWaveProfile PPWaveProfile::from_amplitudes(Amplitude plus, Amplitude cross, std::string name) {
  if (!plus || !cross) throw UsageError("pp-wave amplitudes must be callable");
  return PPWaveProfile(std::move(plus), std::move(cross), [](double) { return 0.0; }, false, std::move(name));
}

PPWaveProfile PPWaveProfile::brdicka(double omega) {
  if (!(omega > 0.0)) throw UsageError("Brdicka frequency must be positive");
  const double amplitude = -2.0 * omega * omega;
  return PPWaveProfile([amplitude](double) { return amplitude; }, [](double) { return 0.0; },
                       [](double) { return 0.0; }, true, "brdicka");
}

PPWaveProfile PPWaveProfile::isotropic_oscillator(double omega) {
  if (!(omega > 0.0)) throw UsageError("oscillator frequency must be positive");
  const double trace = -2.0 * omega * omega;
  return PPWaveProfile([](double) { return 0.0; }, [](double) { return 0.0; },
                       [trace](double) { return trace; }, true, "isotropic-oscillator");
}

Matrix PPWaveProfile::K(double t) const {
  const double plus = plus_(t);
  const double cross = cross_(t);
  const double trace = trace_(t);
  Matrix k(2, 2);
  k << 0.5 * (plus + trace), 0.5 * cross, 0.5 * cross, 0.5 * (trace - plus);
  return k;
}

Matrix PPWaveProfile::dK_dt(double t) const {
  if (time_independent_) return Matrix::Zero(2, 2);
  return (K(t + kProfileTimeStep) - K(t - kProfileTimeStep)) / (2.0 * kProfileTimeStep);
}

// ------------------------------------------------------------------ metric

BargmannMetric BargmannMetric::from_system(const DynamicalSystem& sys) {
  return BargmannMetric(sys.mass_matrix(), sys);
}

BargmannMetric BargmannMetric::from_profile(const PPWaveProfile& profile) {
  return BargmannMetric(Matrix::Identity(2, 2), profile);
}

BargmannMetric BargmannMetric::flat(int n) { return from_system(DynamicalSystem(n, Potential::zero())); }

Vector make_event(double t, const Vector& q, double s) {
  Vector x(q.size() + 2);
  x << t, q, s;
  return x;
}

void BargmannMetric::check_event(const Vector& x) const {
  if (x.size() != dim()) throw UsageError("event has wrong dimension");
  if (const auto* sys = system()) sys->check_position(x.segment(1, transverse_dim()));
}

double BargmannMetric::g_tt(double t, const Vector& q) const {
  if (const auto* sys = system()) return -2.0 * sys->potential_energy(q);
  return q.dot(profile()->K(t) * q);
}

Vector BargmannMetric::grad_g_tt(double t, const Vector& q) const {
  if (const auto* sys = system()) return -2.0 * sys->potential_gradient(q);
  return 2.0 * profile()->K(t) * q;
}

double BargmannMetric::dt_g_tt(double t, const Vector& q) const {
  if (system()) return 0.0;
  return q.dot(profile()->dK_dt(t) * q);
}

Matrix BargmannMetric::components(const Vector& x) const {
  check_event(x);
  const int n = transverse_dim();
  Matrix g = Matrix::Zero(n + 2, n + 2);
  g(0, 0) = g_tt(x[0], x.segment(1, n));
  g(0, s_index(n)) = 1.0;
  g(s_index(n), 0) = 1.0;
  g.block(1, 1, n, n) = transverse_;
  return g;
}

std::vector<Matrix> BargmannMetric::derivatives(const Vector& x) const {
  check_event(x);
  const int n = transverse_dim();
  const Vector q = x.segment(1, n);
  std::vector<Matrix> d(static_cast<std::size_t>(n + 2), Matrix::Zero(n + 2, n + 2));
  d[0](0, 0) = dt_g_tt(x[0], q);
  const Vector grad = grad_g_tt(x[0], q);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i + 1)](0, 0) = grad[i];
  return d;
}

std::vector<Matrix> BargmannMetric::christoffel(const Vector& x) const {
  const Matrix g = components(x);
  const Matrix inv = g.inverse();
  const auto d = derivatives(x);
  const auto dim = g.rows();
  std::vector<Matrix> gamma(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
  for (Eigen::Index mu = 0; mu < dim; ++mu) {
    for (Eigen::Index nu = 0; nu < dim; ++nu) {
      for (Eigen::Index rho = 0; rho < dim; ++rho) {
        double sum = 0.0;
        for (Eigen::Index alpha = 0; alpha < dim; ++alpha) {
          const double lowered = d[static_cast<std::size_t>(nu)](alpha, rho) +
                                 d[static_cast<std::size_t>(rho)](alpha, nu) -
                                 d[static_cast<std::size_t>(alpha)](nu, rho);
          sum += inv(mu, alpha) * lowered;
        }
        gamma[static_cast<std::size_t>(mu)](nu, rho) = 0.5 * sum;
      }
    }
  }
  return gamma;
}

int BargmannMetric::negative_eigenvalues(const Vector& x) const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(components(x));
  return static_cast<int>((eig.eigenvalues().array() < 0.0).count());
}

Vector BargmannMetric::transverse_acceleration(double t, const Vector& q) const {
  const Vector grad = grad_g_tt(t, q);
  if (system()) return 0.5 * system()->inverse_mass_matrix() * grad;
  return 0.5 * grad;
}

// ----------------------------------------------------------------- vectors

ConformalVector ConformalVector::scaling(int n, double a, double b) {
  if (n < 1) throw UsageError("transverse dimension must be positive");
  const double c = 2.0 * a - b;
  ConformalVector y;
  y.name = "scaling(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
  y.dim = n + 2;
  y.field = [n, a, b, c](const Vector& x) {
    Vector out(n + 2);
    out << b * x[0], a * x.segment(1, n), c * x[n + 1];
    return out;
  };
  y.jacobian = [n, a, b, c](const Vector&) {
    Vector diag(n + 2);
    diag << b, Vector::Constant(n, a), c;
    return Matrix(diag.asDiagonal());
  };
  return y;
}

ConformalVector ConformalVector::kepler(int n) {
  auto y = scaling(n, 2.0, 3.0);
  y.name = "kepler";
  return y;
}

ConformalVector ConformalVector::homothety(int n) {
  auto y = scaling(n, 1.0, 0.0);
  y.name = "homothety";
  return y;
}

Matrix ConformalVector::jacobian_fd(const Vector& x, double step) const {
  Matrix j(dim, dim);
  Vector probe = x;
  for (int nu = 0; nu < dim; ++nu) {
    const double saved = probe[nu];
    const double h = step * std::max(1.0, std::abs(saved));
    probe[nu] = saved + h;
    const Vector plus = field(probe);
    probe[nu] = saved - h;
    const Vector minus = field(probe);
    probe[nu] = saved;
    j.col(nu) = (plus - minus) / (2.0 * h);
  }
  return j;
}

namespace {

std::vector<Vector> sample_events(int dim, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::vector<Vector> events;
  while (static_cast<int>(events.size()) < count) {
    Vector x(dim);
    for (auto& v : x) v = coord(rng);
    if (x.segment(1, dim - 2).norm() < 0.25) continue;
    events.push_back(std::move(x));
  }
  return events;
}

constexpr double kChronoTolerance = 1e-12;

}  // namespace

std::optional<double> chrono_projective_check(const ConformalVector& y) {
  const int n = y.dim - 2;
  std::optional<double> psi;
  for (const auto& x : sample_events(y.dim, 0x5eedULL, 16)) {
    const Matrix j = y.jacobian(x);
    const Eigen::VectorXd ds = j.col(s_index(n));  // d_s Y^mu
    if (ds.head(n + 1).cwiseAbs().maxCoeff() > kChronoTolerance) return std::nullopt;
    const double value = -ds[s_index(n)];
    if (psi && std::abs(*psi - value) > kChronoTolerance * std::max(1.0, std::abs(value))) return std::nullopt;
    psi = value;
  }
  return psi;
}

std::optional<double> vertical_coefficient(const ConformalVector& y) {
  const int n = y.dim - 2;
  std::optional<double> coeff;
  for (const auto& x : sample_events(y.dim, 0xc0ffeeULL, 16)) {
    if (std::abs(x[s_index(n)]) < 1e-3) continue;
    const double value = y.field(x)[s_index(n)] / x[s_index(n)];
    if (coeff && std::abs(*coeff - value) > 1e-12 * std::max(1.0, std::abs(value))) return std::nullopt;
    coeff = value;
  }
  return coeff;
}

// -------------------------------------------------------------- operations

BargmannWorldline lift_trajectory(const Trajectory& traj, double s0) {
  BargmannWorldline wl;
  wl.samples.reserve(traj.samples.size());
  const Eigen::Index n = traj.dim();
  for (const auto& s : traj.samples) {
    Vector tangent(n + 2);
    const double lagrangian = evaluate_lagrangian(traj.system, PhaseState{s.q, s.qdot, s.t});
    tangent << 1.0, s.qdot, -lagrangian;
    wl.samples.push_back(WorldlineSample{s.t, s.q, s0 - s.action, std::move(tangent)});
  }
  return wl;
}

double metric_contract(const BargmannMetric& metric, const Vector& event, const Vector& u, const Vector& v) {
  if (u.size() != metric.dim() || v.size() != metric.dim()) throw UsageError("tangent has wrong dimension");
  return u.dot(metric.components(event) * v);
}

double null_residual(const BargmannMetric& metric, const BargmannWorldline& wl) {
  double worst = 0.0;
  for (const auto& s : wl.samples) {
    worst = std::max(worst, std::abs(metric_contract(metric, s.event(), s.tangent, s.tangent)));
  }
  return worst;
}

LieDerivativeReport lie_derivative_metric(const BargmannMetric& metric, const ConformalVector& y, const Vector& event,
                                          Differentiation mode) {
  if (y.dim != metric.dim()) throw UsageError("vector field dimension does not match the metric");
  const Matrix g = metric.components(event);
  const Vector field = y.field(event);
  Matrix jac;
  std::vector<Matrix> dg;
  if (mode == Differentiation::kAnalytic) {
    jac = y.jacobian(event);
    dg = metric.derivatives(event);
  } else {
    constexpr double step = 1e-5;
    jac = y.jacobian_fd(event, step);
    Vector probe = event;
    for (int alpha = 0; alpha < metric.dim(); ++alpha) {
      const double saved = probe[alpha];
      const double h = step * std::max(1.0, std::abs(saved));
      probe[alpha] = saved + h;
      const Matrix plus = metric.components(probe);
      probe[alpha] = saved - h;
      const Matrix minus = metric.components(probe);
      probe[alpha] = saved;
      dg.push_back((plus - minus) / (2.0 * h));
    }
  }

  LieDerivativeReport report;
  report.tensor = jac.transpose() * g + g * jac;
  for (int alpha = 0; alpha < metric.dim(); ++alpha) {
    report.tensor += field[alpha] * dg[static_cast<std::size_t>(alpha)];
  }
  report.two_chi = (report.tensor.array() * g.array()).sum() / g.squaredNorm();
  report.defect = (report.tensor - report.two_chi * g).norm();
  return report;
}

BargmannWorldline upstairs_geodesic(const BargmannMetric& metric, const Vector& event, const Vector& u, double t_end,
                                    const GeodesicOptions& options) {
  const int n = metric.transverse_dim();
  if (u.size() != n + 2) throw UsageError("tangent has wrong dimension");
  if (u[0] == 0.0) throw UsageError("geodesic tangent must have a non-zero t component");
  const double norm = metric_contract(metric, event, u, u);
  if (options.require_null && std::abs(norm) > 1e-10) {
    throw UsageError("initial tangent is not null");
  }
  if (!(options.tol >= 1e-14 && options.tol <= 1e-3)) throw UsageError("tol must lie in [1e-14, 1e-3]");
  const double level = norm / (u[0] * u[0]);
  const double t0 = event[0];
  const Matrix& mass = metric.transverse_metric();

  // State: q (n), dq/dt (n), s.
  Vector y0(2 * n + 1);
  y0 << event.segment(1, n), u.segment(1, n) / u[0], event[s_index(n)];
  ode::Rhs rhs = [&](double t, const Vector& y, Vector& dydt) {
    const Vector q = y.head(n);
    const Vector v = y.segment(n, n);
    metric.check_event(make_event(t, q, 0.0));
    dydt.resize(2 * n + 1);
    dydt.head(n) = v;
    dydt.segment(n, n) = metric.transverse_acceleration(t, q);
    dydt[2 * n] = 0.5 * (level - v.dot(mass * v) - metric.g_tt(t, q));
  };
  ode::Options opt;
  opt.rtol = options.tol;
  opt.atol = options.tol;
  auto dense = ode::integrate(rhs, t0, y0, t0 + t_end, opt);

  BargmannWorldline wl;
  const std::size_t intervals = options.grid_intervals;
  wl.samples.reserve(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    const double t = j == intervals ? t0 + t_end : t0 + t_end * static_cast<double>(j) / static_cast<double>(intervals);
    Vector y = j == 0 ? y0 : dense.value(t);
    Vector dydt(2 * n + 1);
    rhs(t, y, dydt);
    Vector tangent(n + 2);
    tangent << 1.0, y.segment(n, n), dydt[2 * n];
    wl.samples.push_back(WorldlineSample{t, y.head(n), y[2 * n], std::move(tangent)});
  }
  return wl;
}

double geodesic_residual(const BargmannMetric& metric, const BargmannWorldline& wl) {
  const auto& s = wl.samples;
  if (s.size() < 5) throw UsageError("geodesic_residual needs at least 5 samples");
  const int n = metric.transverse_dim();
  const double h = (s.back().t - s.front().t) / static_cast<double>(s.size() - 1);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < s.size(); ++j) {
    auto second = [&](auto get) {
      using Value = std::decay_t<decltype(get(s[j]))>;
      return Value((-get(s[j - 2]) + 16.0 * get(s[j - 1]) - 30.0 * get(s[j]) + 16.0 * get(s[j + 1]) - get(s[j + 2])) /
                   (12.0 * h * h));
    };
    const Vector qddot = second([](const WorldlineSample& w) -> Vector { return w.q; });
    const double sddot = second([](const WorldlineSample& w) { return w.s; });
    const Vector v = s[j].tangent.segment(1, n);
    const Vector grad = metric.grad_g_tt(s[j].t, s[j].q);
    const double expected_s = -grad.dot(v) - 0.5 * metric.dt_g_tt(s[j].t, s[j].q);
    worst = std::max(worst, (qddot - metric.transverse_acceleration(s[j].t, s[j].q)).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(sddot - expected_s));
  }
  return worst;
}

BargmannWorldline scale_worldline(const BargmannWorldline& wl, double a, double b, double lambda) {
  if (!(lambda > 0.0)) throw UsageError("lambda must be positive");
  const double time_factor = std::pow(lambda, b);
  const double q_factor = std::pow(lambda, a);
  const double s_factor = std::pow(lambda, 2.0 * a - b);
  BargmannWorldline out;
  out.samples.reserve(wl.samples.size());
  for (const auto& w : wl.samples) {
    Vector tangent = w.tangent / w.tangent[0];
    const auto n = w.q.size();
    tangent.segment(1, n) *= q_factor / time_factor;
    tangent[n + 1] *= s_factor / time_factor;
    out.samples.push_back(WorldlineSample{time_factor * w.t, q_factor * w.q, s_factor * w.s, std::move(tangent)});
  }
  return out;
}

ChargeSeries upstairs_charge(const BargmannMetric& metric, const ConformalVector& y, const BargmannWorldline& wl) {
  if (y.dim != metric.dim()) throw UsageError("vector field dimension does not match the metric");
  ChargeSeries series;
  for (const auto& w : wl.samples) {
    const Vector x = w.event();
    series.t.push_back(w.t);
    series.Q.push_back(metric_contract(metric, x, y.field(x), w.tangent));
  }
  series.update_drift();
  return series;
}

HomothetyCharge homothety_charge(const BargmannWorldline& wl, const Trajectory& traj) {
  if (wl.samples.size() != traj.samples.size()) throw UsageError("worldline and trajectory have different grids");
  const Matrix& mass = traj.system.mass_matrix();
  const double s0 = wl.s0();
  HomothetyCharge out;
  for (std::size_t j = 0; j < wl.samples.size(); ++j) {
    const auto& w = wl.samples[j];
    const auto& s = traj.samples[j];
    if (std::abs(w.t - s.t) > 1e-12 * std::max(1.0, std::abs(s.t)) || (w.q - s.q).cwiseAbs().maxCoeff() > 1e-9) {
      throw UsageError("worldline is not the lift of the trajectory");
    }
    const double momentum = s.q.dot(mass * s.qdot);
    const double downstairs = momentum - 2.0 * s.action;
    // P_i = M qdot, P_s = dt/dparameter = 1.
    const double p_s = w.tangent[0];
    const double upstairs = w.q.dot(mass * (w.tangent.segment(1, w.q.size()) / p_s)) + 2.0 * w.s * p_s - 2.0 * s0;
    out.series.t.push_back(s.t);
    out.series.Q.push_back(downstairs);
    out.series.decomposition.push_back(ChargeTerms{momentum, 0.0, -2.0 * s.action, 0.0});
    out.upstairs.push_back(upstairs);
    out.route_gap = std::max(out.route_gap, std::abs(downstairs - upstairs));
  }
  out.series.update_drift();
  return out;
}

void write_worldline_csv(std::ostream& os, const BargmannMetric& metric, const BargmannWorldline& wl) {
  const int n = metric.transverse_dim();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",q" << i;
  os << ",s,null_residual\n";
  const auto old_precision = os.precision(17);
  for (const auto& w : wl.samples) {
    os << w.t;
    for (int i = 0; i < n; ++i) os << ',' << w.q[i];
    os << ',' << w.s << ',' << std::abs(metric_contract(metric, w.event(), w.tangent, w.tangent)) << '\n';
  }
  os.precision(old_precision);
}

std::string lie_report_json(const LieDerivativeReport& report, std::optional<double> psi) {
  nlohmann::json j{{"two_chi", report.two_chi}, {"defect", report.defect}};
  j["psi"] = psi ? nlohmann::json(*psi) : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace noether
