#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "noether/charge.hpp"

namespace noether {

/// Profile K_ij(t) of a Brinkmann pp-wave in two transverse dimensions,
///   K_ij q^i q^j = A+/2 ((q1)^2 - (q2)^2) + Ax q1 q2 + tau/2 |q|^2.
/// The trace tau vanishes for vacuum waves.
class PPWaveProfile {
 public:
  using Amplitude = std::function<double(double t)>;

  /// Traceless (vacuum) wave with the given polarization amplitudes.
  static PPWaveProfile from_amplitudes(Amplitude plus, Amplitude cross, std::string name = "pp-wave");
  /// Constant +-polarized wave with A+ = -2 Omega^2: an attractive
  /// oscillator in q1 and a repulsive one in q2.
  static PPWaveProfile brdicka(double omega);
  /// K = -Omega^2 I: isotropic oscillator; a pp-wave but not a vacuum one.
  static PPWaveProfile isotropic_oscillator(double omega);

  const std::string& name() const { return name_; }
  bool time_independent() const { return time_independent_; }

  Matrix K(double t) const;
  Matrix dK_dt(double t) const;
  double trace(double t = 0.0) const { return K(t).trace(); }
  bool is_vacuum(double t = 0.0) const { return std::abs(trace(t)) <= 1e-14; }

 private:
  PPWaveProfile(Amplitude plus, Amplitude cross, Amplitude trace, bool time_independent, std::string name)
      : plus_(std::move(plus)),
        cross_(std::move(cross)),
        trace_(std::move(trace)),
        time_independent_(time_independent),
        name_(std::move(name)) {}

  Amplitude plus_;
  Amplitude cross_;
  Amplitude trace_;
  bool time_independent_;
  std::string name_;
};

/// Lorentzian metric on (t, q^1..q^n, s), coordinate index 0 = t, n+1 = s:
///   potential form: q^T M dq + 2 dt ds - 2 V(q) dt^2
///   profile form:   dq^2 + 2 dt ds + K_ij(t) q^i q^j dt^2
/// xi = d/ds is null and covariantly constant for both.
class BargmannMetric {
 public:
  static BargmannMetric from_system(const DynamicalSystem& sys);
  static BargmannMetric from_profile(const PPWaveProfile& profile);
  /// Minkowski space in light-cone coordinates (V = 0).
  static BargmannMetric flat(int n);

  int transverse_dim() const { return static_cast<int>(transverse_.rows()); }
  int dim() const { return transverse_dim() + 2; }
  const Matrix& transverse_metric() const { return transverse_; }
  const DynamicalSystem* system() const { return std::get_if<DynamicalSystem>(&source_); }
  const PPWaveProfile* profile() const { return std::get_if<PPWaveProfile>(&source_); }

  /// Throws DomainError at singular events, UsageError on wrong size.
  void check_event(const Vector& x) const;

  double g_tt(double t, const Vector& q) const;
  Vector grad_g_tt(double t, const Vector& q) const;
  double dt_g_tt(double t, const Vector& q) const;

  Matrix components(const Vector& x) const;
  /// Analytic partial derivatives d_alpha g_{mu nu}, one matrix per alpha.
  std::vector<Matrix> derivatives(const Vector& x) const;
  /// Christoffel symbols Gamma^mu_{nu rho}, one matrix per mu.
  std::vector<Matrix> christoffel(const Vector& x) const;
  /// Number of negative eigenvalues of g at x (1 for Lorentzian signature).
  int negative_eigenvalues(const Vector& x) const;

  /// dq/dt'' for the t-parametrized geodesic: (1/2) M^{-1} grad g_tt.
  Vector transverse_acceleration(double t, const Vector& q) const;

 private:
  BargmannMetric(Matrix transverse, std::variant<DynamicalSystem, PPWaveProfile> source)
      : transverse_(std::move(transverse)), source_(std::move(source)) {}

  Matrix transverse_;
  std::variant<DynamicalSystem, PPWaveProfile> source_;
};

/// Event coordinates (t, q, s) packed as one vector.
Vector make_event(double t, const Vector& q, double s);

struct WorldlineSample {
  double t = 0.0;
  Vector q;
  double s = 0.0;
  Vector tangent;  // (dt, dq, ds) per unit parameter
  Vector event() const { return make_event(t, q, s); }
};

/// Curve in Bargmann space, parametrized by t on a uniform grid (dt = 1).
struct BargmannWorldline {
  std::vector<WorldlineSample> samples;
  double s0() const { return samples.front().s; }
};

/// Vector field Y^mu(x) with its Jacobian J(mu, nu) = d_nu Y^mu.
struct ConformalVector {
  using Field = std::function<Vector(const Vector& x)>;
  using Jacobian = std::function<Matrix(const Vector& x)>;

  std::string name;
  int dim = 0;  // n + 2
  Field field;
  Jacobian jacobian;

  /// b t d_t + a q.d_q + (2a - b) s d_s.
  static ConformalVector scaling(int n, double a, double b);
  /// 3t d_t + 2q.d_q + s d_s.
  static ConformalVector kepler(int n);
  /// q.d_q + 2s d_s.
  static ConformalVector homothety(int n);

  Matrix jacobian_fd(const Vector& x, double step = 1e-5) const;
};

/// Eisenhart-Duval lift (t, q(t), s0 - S(t)) with tangent (1, qdot, -L).
BargmannWorldline lift_trajectory(const Trajectory& traj, double s0);

double metric_contract(const BargmannMetric& metric, const Vector& event, const Vector& u, const Vector& v);

/// max over samples of |g(x', x')|.
double null_residual(const BargmannMetric& metric, const BargmannWorldline& wl);

enum class Differentiation { kAnalytic, kFiniteDifference };

struct LieDerivativeReport {
  Matrix tensor;          // L_Y g at the event
  double two_chi = 0.0;   // least-squares factor in L_Y g ~ 2 chi g
  double defect = 0.0;    // Frobenius norm of L_Y g - 2 chi g
};

LieDerivativeReport lie_derivative_metric(const BargmannMetric& metric, const ConformalVector& y, const Vector& event,
                                          Differentiation mode = Differentiation::kAnalytic);

/// psi with L_Y xi = psi xi, or std::nullopt when [Y, d_s] is not a constant
/// multiple of d_s on a seeded sample of events.
std::optional<double> chrono_projective_check(const ConformalVector& y);

/// Y^s / s when it is the same constant at every sampled event.
std::optional<double> vertical_coefficient(const ConformalVector& y);

struct GeodesicOptions {
  double tol = kDefaultTolerance;
  std::size_t grid_intervals = kDefaultGridIntervals;
  bool require_null = true;
};

/// Geodesic of the metric from `event` with tangent `u` (u[0] != 0),
/// reparametrized by t. q follows (1/2) M^{-1} grad g_tt and s follows the
/// conserved level g(x', x') = g(u, u) / u[0]^2.
BargmannWorldline upstairs_geodesic(const BargmannMetric& metric, const Vector& event, const Vector& u, double t_end,
                                    const GeodesicOptions& options = {});

/// Residual of the t-parametrized geodesic equations on a uniform grid
/// (5-point second differences), max over q and s components.
double geodesic_residual(const BargmannMetric& metric, const BargmannWorldline& wl);

/// Maps t -> lambda^b t, q -> lambda^a q, s -> lambda^(2a-b) s and
/// reparametrizes the tangent by the new time.
BargmannWorldline scale_worldline(const BargmannWorldline& wl, double a, double b, double lambda);

/// Noether charge g(Y, x') of a conformal vector along a worldline.
ChargeSeries upstairs_charge(const BargmannMetric& metric, const ConformalVector& y, const BargmannWorldline& wl);

struct HomothetyCharge {
  ChargeSeries series;      // downstairs q^T M qdot - 2 S
  std::vector<double> upstairs;  // q^i P_i + 2 s P_s - 2 s0
  double route_gap = 0.0;   // max |downstairs - upstairs|
};

HomothetyCharge homothety_charge(const BargmannWorldline& wl, const Trajectory& traj);

/// CSV: `t,q1..qn,s,null_residual`.
void write_worldline_csv(std::ostream& os, const BargmannMetric& metric, const BargmannWorldline& wl);

/// JSON object with keys two_chi, psi (null when violated), defect.
std::string lie_report_json(const LieDerivativeReport& report, std::optional<double> psi);

}  // namespace noether
