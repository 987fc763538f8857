#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noether/scaling.hpp"

namespace noether {

enum class Check { kCharge, kVirial, kSymmetryResidual, kMapping, kGenerator, kBargmann, kHomothety };

std::string to_string(Check check);
Check check_from_string(const std::string& name);

enum class PPWaveKind { kBrdicka, kIsotropic };

struct PPWaveSpec {
  PPWaveKind kind = PPWaveKind::kBrdicka;
  double omega = 1.0;
};

/// Pass thresholds of the individual checks.
struct Thresholds {
  double charge_drift = 1e-7;     // drift_rel of Q
  double route_agreement = 1e-8;  // pointwise gap between equivalent charge forms
  double virial = 1e-5;           // |<K> - (k/2)<V>| / (1 + |E|)
  double symmetry = 1e-10;
  double eom = 1e-6;
  double action_transport = 1e-9;  // relative to 1 + max |S'|
  double period_ratio = 1e-4;
  double generator = 1e-8;
  double generator_flow = 1e-6;
  double null_lift = 1e-8;
  double geodesic = 1e-7;     // upstairs geodesic vs lift, pointwise
  double conformal = 1e-9;    // Lie-derivative defect
  double homothety = 1e-8;    // drift of Q_hom
  double geodesic_eq = 1e-6;  // residual of the geodesic equations on mapped worldlines
};

/// Declarative description of one verification run. Either `potential` is
/// set or `ppwave` is, in which case the transverse system is the particle
/// motion the wave describes.
struct Scenario {
  std::string name;
  Matrix mass_matrix;
  std::optional<Potential> potential;
  std::optional<PPWaveSpec> ppwave;
  Vector q0;
  Vector qdot0;
  ScalingLaw law;
  double t_end = 0.0;
  double tol = kDefaultTolerance;
  std::size_t grid_intervals = kDefaultGridIntervals;
  std::vector<Check> checks;
  std::vector<double> lambda_values;
  std::uint64_t seed = 0;
  double s0 = 0.0;
  std::filesystem::path output_dir;
  Thresholds thresholds;

  DynamicalSystem system() const;
  bool has_check(Check check) const;
};

/// Parses a TOML or JSON scenario. Throws ConfigError with the position of the
/// offending entry when it is known.
Scenario parse_scenario(const std::string& text, bool json, const std::string& origin = "<config>");
/// Format chosen by extension: `.json` is JSON, anything else TOML.
Scenario load_scenario(const std::filesystem::path& path);

/// Systems the virial check admits: the harmonic potential with M a multiple
/// of the identity, and bound Kepler motion.
bool is_periodic_system(const DynamicalSystem& sys, const PhaseState& ic);

/// Semantic validation shared by parsing and built-ins; throws ConfigError.
void validate(const Scenario& sc);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string toml;
};

const std::vector<BuiltinScenario>& list_builtin_scenarios();
Scenario builtin_scenario(const std::string& name);

struct CheckResult {
  Check check = Check::kCharge;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string detail;
};

struct Report {
  std::string scenario;
  bool pass = false;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> artifacts;
  /// Extra scenario facts (e.g. the pp-wave profile) as key/value text.
  std::vector<std::pair<std::string, std::string>> facts;

  std::string to_json() const;
};

/// Runs every requested check and writes trajectory.csv, charge.csv,
/// report.json (plus worldline.csv for Bargmann checks) into output_dir.
/// Domain and integration failures propagate as exceptions.
Report run_scenario(const Scenario& sc);

}  // namespace noether
