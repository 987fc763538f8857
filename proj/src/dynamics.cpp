#include "noether/dynamics.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace noether {

namespace {

std::string format_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw UsageError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::kZero: return "zero";
    case PotentialKind::kKepler: return "kepler";
    case PotentialKind::kInverseSquare: return "inverse_square";
    case PotentialKind::kLinearForce: return "linear_force";
    case PotentialKind::kHarmonic: return "harmonic";
    case PotentialKind::kSaddle: return "saddle";
    case PotentialKind::kCustomHomogeneous: return "custom";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  for (auto kind : {PotentialKind::kZero, PotentialKind::kKepler, PotentialKind::kInverseSquare,
                    PotentialKind::kLinearForce, PotentialKind::kHarmonic, PotentialKind::kSaddle}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "free") return PotentialKind::kZero;
  if (name == "oscillator") return PotentialKind::kHarmonic;
  throw UsageError("unknown potential kind '" + name + "'");
}

Potential Potential::zero() { return Potential(PotentialKind::kZero, 0.0, 0.0); }

Potential Potential::kepler(double alpha) {
  require_positive(alpha, "Kepler coupling");
  return Potential(PotentialKind::kKepler, alpha, -1.0);
}

Potential Potential::inverse_square(double beta) {
  if (!std::isfinite(beta)) throw UsageError("inverse-square coupling must be finite");
  return Potential(PotentialKind::kInverseSquare, beta, -2.0);
}

Potential Potential::linear_force(double g) {
  require_positive(g, "linear force strength");
  return Potential(PotentialKind::kLinearForce, g, 1.0);
}

Potential Potential::harmonic(double omega) {
  require_positive(omega, "oscillator frequency");
  return Potential(PotentialKind::kHarmonic, omega, 2.0);
}

Potential Potential::saddle(double omega) {
  require_positive(omega, "saddle frequency");
  return Potential(PotentialKind::kSaddle, omega, 2.0);
}

Potential Potential::custom_homogeneous(double degree, Function v, std::string name) {
  if (!v) throw UsageError("custom potential needs a callable");
  Potential p(PotentialKind::kCustomHomogeneous, 0.0, degree);
  p.custom_ = std::move(v);
  p.custom_name_ = std::move(name);
  return p;
}

bool Potential::singular_at_origin() const {
  return kind_ == PotentialKind::kKepler || kind_ == PotentialKind::kInverseSquare;
}

double Potential::value(const Vector& q) const {
  switch (kind_) {
    case PotentialKind::kZero: return 0.0;
    case PotentialKind::kKepler: return -parameter_ / q.norm();
    case PotentialKind::kInverseSquare: return parameter_ / q.squaredNorm();
    case PotentialKind::kLinearForce: return parameter_ * q.sum();
    case PotentialKind::kHarmonic: return 0.5 * parameter_ * parameter_ * q.squaredNorm();
    case PotentialKind::kSaddle:
      return 0.5 * parameter_ * parameter_ * (q[0] * q[0] - q[1] * q[1]);
    case PotentialKind::kCustomHomogeneous: return custom_(q);
  }
  return 0.0;
}

Vector Potential::gradient(const Vector& q) const {
  const auto n = q.size();
  switch (kind_) {
    case PotentialKind::kZero: return Vector::Zero(n);
    case PotentialKind::kKepler: {
      const double r = q.norm();
      return parameter_ * q / (r * r * r);
    }
    case PotentialKind::kInverseSquare: {
      const double r2 = q.squaredNorm();
      return -2.0 * parameter_ * q / (r2 * r2);
    }
    case PotentialKind::kLinearForce: return Vector::Constant(n, parameter_);
    case PotentialKind::kHarmonic: return parameter_ * parameter_ * q;
    case PotentialKind::kSaddle: {
      Vector g(2);
      g << parameter_ * parameter_ * q[0], -parameter_ * parameter_ * q[1];
      return g;
    }
    case PotentialKind::kCustomHomogeneous: {
      Vector g(n);
      Vector probe = q;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(q[i]));
        probe[i] = q[i] + h;
        const double plus = custom_(probe);
        probe[i] = q[i] - h;
        const double minus = custom_(probe);
        probe[i] = q[i];
        g[i] = (plus - minus) / (2.0 * h);
      }
      return g;
    }
  }
  return Vector::Zero(n);
}

std::string Potential::descriptor() const {
  switch (kind_) {
    case PotentialKind::kZero: return "zero";
    case PotentialKind::kKepler: return "kepler(alpha=" + format_real(parameter_) + ")";
    case PotentialKind::kInverseSquare: return "inverse_square(beta=" + format_real(parameter_) + ")";
    case PotentialKind::kLinearForce: return "linear_force(g=" + format_real(parameter_) + ")";
    case PotentialKind::kHarmonic: return "harmonic(omega=" + format_real(parameter_) + ")";
    case PotentialKind::kSaddle: return "saddle(omega=" + format_real(parameter_) + ")";
    case PotentialKind::kCustomHomogeneous:
      return "custom(" + custom_name_ + ",k=" + format_real(*degree_) + ")";
  }
  return "unknown";
}

DynamicalSystem::DynamicalSystem(Matrix mass_matrix, Potential potential)
    : mass_(std::move(mass_matrix)), potential_(std::move(potential)) {
  const auto n = mass_.rows();
  if (n < 1 || mass_.cols() != n) throw UsageError("mass matrix must be square and non-empty");
  if (!mass_.allFinite()) throw UsageError("mass matrix entries must be finite");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (mass_(i, j) != mass_(j, i)) throw UsageError("mass matrix must be symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(mass_);
  const double scale = std::max(1.0, mass_.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    throw UsageError("mass matrix must be positive definite");
  }
  inverse_mass_ = mass_.llt().solve(Matrix::Identity(n, n));
  if (potential_.kind() == PotentialKind::kSaddle && n != 2) {
    throw UsageError("saddle potential requires dimension 2");
  }

  std::ostringstream os;
  os.precision(17);
  os << potential_.descriptor() << "|M=[";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) os << (i + j ? "," : "") << mass_(i, j);
  }
  os << "]";
  id_ = os.str();
}

DynamicalSystem::DynamicalSystem(int n, Potential potential)
    : DynamicalSystem(Matrix::Identity(n, n), std::move(potential)) {}

void DynamicalSystem::check_position(const Vector& q) const {
  if (q.size() != dim()) throw UsageError("position has wrong dimension");
  if (!q.allFinite()) throw DomainError("position is not finite");
  if (potential_.singular_at_origin() && q.norm() < kSingularRadius) {
    throw DomainError("state at the singular point of " + potential_.descriptor());
  }
}

void DynamicalSystem::check_state(const PhaseState& st) const {
  check_position(st.q);
  if (st.qdot.size() != dim()) throw UsageError("velocity has wrong dimension");
}

double DynamicalSystem::kinetic_energy(const Vector& qdot) const {
  return 0.5 * qdot.dot(mass_ * qdot);
}

double DynamicalSystem::potential_energy(const Vector& q) const {
  check_position(q);
  return potential_.value(q);
}

Vector DynamicalSystem::potential_gradient(const Vector& q) const {
  check_position(q);
  return potential_.gradient(q);
}

double evaluate_lagrangian(const DynamicalSystem& sys, const PhaseState& st) {
  sys.check_state(st);
  return sys.kinetic_energy(st.qdot) - sys.potential().value(st.q);
}

double evaluate_hamiltonian(const DynamicalSystem& sys, const PhaseState& st) {
  sys.check_state(st);
  return sys.kinetic_energy(st.qdot) + sys.potential().value(st.q);
}

Vector acceleration(const DynamicalSystem& sys, const PhaseState& st) {
  sys.check_position(st.q);
  return -(sys.inverse_mass_matrix() * sys.potential().gradient(st.q));
}

HomogeneityReport homogeneity_check(const DynamicalSystem& sys, int samples, std::uint64_t seed) {
  const auto k = sys.homogeneity_degree();
  if (!k) throw UsageError("homogeneity degree is not set");
  if (samples < 1) throw UsageError("homogeneity check needs at least one sample");

  constexpr std::array<double, 3> kFactors{0.5, 2.0, 3.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(0.5, 2.0);

  HomogeneityReport report;
  report.samples = samples;
  const auto& v = sys.potential();
  for (int i = 0; i < samples; ++i) {
    Vector q(sys.dim());
    for (auto& x : q) x = gauss(rng);
    q *= radius(rng) / q.norm();
    const double mu = kFactors[static_cast<std::size_t>(i) % kFactors.size()];
    const double base = v.value(q);
    const double defect = std::abs(v.value(mu * q) - std::pow(mu, *k) * base) / (1.0 + std::abs(base));
    report.max_relative_error = std::max(report.max_relative_error, defect);
  }
  report.pass = report.max_relative_error <= kHomogeneityTolerance;
  return report;
}

}  // namespace noether
