#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "noether/errors.hpp"

namespace noether {

enum class PotentialKind {
  kZero,
  kKepler,            // V = -alpha / |q|
  kInverseSquare,     // V = beta / |q|^2
  kLinearForce,       // V = g * sum(q_i)
  kHarmonic,          // V = omega^2 |q|^2 / 2
  kSaddle,            // V = Omega^2 ((q1)^2 - (q2)^2) / 2, n = 2
  kCustomHomogeneous  // user callable with a declared degree
};

/// Canonical lowercase name used in configs ("zero", "kepler", ...).
std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Describes V(q). Built-in kinds carry a single real parameter and an
/// analytic gradient; custom potentials are differentiated numerically.
class Potential {
 public:
  using Function = std::function<double(const Vector&)>;

  static Potential zero();
  static Potential kepler(double alpha);
  static Potential inverse_square(double beta);
  static Potential linear_force(double g);
  static Potential harmonic(double omega);
  static Potential saddle(double omega);
  /// `degree` is only declared here; homogeneity_check verifies it.
  static Potential custom_homogeneous(double degree, Function v, std::string name = "custom");

  PotentialKind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  std::optional<double> degree() const { return degree_; }
  bool singular_at_origin() const;

  double value(const Vector& q) const;
  Vector gradient(const Vector& q) const;

  /// Stable textual description; part of DynamicalSystem::id().
  std::string descriptor() const;

 private:
  Potential(PotentialKind kind, double parameter, std::optional<double> degree)
      : kind_(kind), parameter_(parameter), degree_(degree) {}

  PotentialKind kind_;
  double parameter_;
  std::optional<double> degree_;
  Function custom_;
  std::string custom_name_;
};

struct PhaseState {
  Vector q;
  Vector qdot;
  double t = 0.0;
};

/// Lagrangian L = qdot^T M qdot / 2 - V(q) with constant symmetric
/// positive-definite M. Immutable after construction.
class DynamicalSystem {
 public:
  /// Radius below which singular potentials reject a state.
  static constexpr double kSingularRadius = 1e-12;

  DynamicalSystem(Matrix mass_matrix, Potential potential);
  /// Unit mass matrix of dimension n.
  DynamicalSystem(int n, Potential potential);

  int dim() const { return static_cast<int>(mass_.rows()); }
  const Matrix& mass_matrix() const { return mass_; }
  const Matrix& inverse_mass_matrix() const { return inverse_mass_; }
  const Potential& potential() const { return potential_; }
  std::optional<double> homogeneity_degree() const { return potential_.degree(); }
  bool is_free() const { return potential_.kind() == PotentialKind::kZero; }

  /// Identifies the system for trajectory/system consistency checks.
  const std::string& id() const { return id_; }

  /// Throws DomainError for |q| below kSingularRadius on singular potentials,
  /// UsageError on dimension mismatch.
  void check_position(const Vector& q) const;
  void check_state(const PhaseState& st) const;

  double kinetic_energy(const Vector& qdot) const;
  double potential_energy(const Vector& q) const;
  Vector potential_gradient(const Vector& q) const;

 private:
  Matrix mass_;
  Matrix inverse_mass_;
  Potential potential_;
  std::string id_;
};

double evaluate_lagrangian(const DynamicalSystem& sys, const PhaseState& st);
double evaluate_hamiltonian(const DynamicalSystem& sys, const PhaseState& st);
/// M^{-1} (-grad V).
Vector acceleration(const DynamicalSystem& sys, const PhaseState& st);

struct HomogeneityReport {
  double max_relative_error = 0.0;
  int samples = 0;
  bool pass = false;
};

inline constexpr double kHomogeneityTolerance = 1e-10;

/// Measures |V(mu q) - mu^k V(q)| / (1 + |V(q)|) over seeded samples with
/// |q| in [0.5, 2] and mu in {0.5, 2, 3}.
HomogeneityReport homogeneity_check(const DynamicalSystem& sys, int samples, std::uint64_t seed);

}  // namespace noether
