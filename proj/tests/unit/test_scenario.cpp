#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "noether/scenario.hpp"

namespace noether {
namespace {

namespace fs = std::filesystem;

const char* kOscillator = R"(name = "osc"
t_end = 10.0
checks = ["charge", "virial"]

[potential]
kind = "harmonic"
omega = 1.0

[initial]
q = [1.0]
qdot = [0.5]

[scaling]
k = 2.0
)";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("noether-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const CheckResult* find(const Report& r, Check c) {
  for (const auto& cr : r.checks) {
    if (cr.check == c) return &cr;
  }
  return nullptr;
}

std::string fact(const Report& r, const std::string& key) {
  for (const auto& [k, v] : r.facts) {
    if (k == key) return v;
  }
  return {};
}

TEST(ParseScenario, Toml) {
  const auto sc = parse_scenario(kOscillator, false);
  EXPECT_EQ(sc.name, "osc");
  EXPECT_EQ(sc.t_end, 10.0);
  EXPECT_EQ(sc.tol, kDefaultTolerance);
  EXPECT_EQ(sc.grid_intervals, kDefaultGridIntervals);
  EXPECT_EQ(sc.law.a, 1.0);
  EXPECT_EQ(sc.law.b, 0.0);
  EXPECT_EQ(sc.law.c, 2.0);
  ASSERT_TRUE(sc.potential.has_value());
  EXPECT_EQ(sc.potential->kind(), PotentialKind::kHarmonic);
  EXPECT_TRUE(sc.has_check(Check::kVirial));
  EXPECT_FALSE(sc.has_check(Check::kBargmann));
  EXPECT_EQ(sc.mass_matrix, Matrix::Identity(1, 1));
}

TEST(ParseScenario, JsonEquivalent) {
  const char* json = R"({"name": "osc", "t_end": 10.0, "checks": ["charge", "virial"],
    "potential": {"kind": "harmonic", "omega": 1.0},
    "initial": {"q": [1.0], "qdot": [0.5]},
    "scaling": {"k": 2.0}})";
  const auto a = parse_scenario(json, true);
  const auto b = parse_scenario(kOscillator, false);
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.q0, b.q0);
  EXPECT_EQ(a.qdot0, b.qdot0);
  EXPECT_EQ(a.law.c, b.law.c);
  EXPECT_EQ(a.checks, b.checks);
}

TEST(ParseScenario, ExplicitExponentsAndMass) {
  const auto sc = parse_scenario(R"(name = "m"
t_end = 2.0
checks = ["charge"]
mass_matrix = [[2.0, 0.5], [0.5, 1.0]]
[potential]
kind = "zero"
[initial]
q = [1.0, 0.0]
qdot = [0.0, 1.0]
[scaling]
a = 2.0
b = 1.0
c = 3.0
[thresholds]
charge_drift = 1e-9
)", false);
  EXPECT_EQ(sc.law.b, 1.0);
  EXPECT_EQ(sc.mass_matrix(0, 1), 0.5);
  EXPECT_EQ(sc.thresholds.charge_drift, 1e-9);
}

TEST(ParseScenario, TomlSyntaxErrorHasPosition) {
  try {
    parse_scenario("name = \"broken\"\nt_end = 3.0\nchecks = [\"charge\"\n", false);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseScenario, JsonSyntaxErrorHasPosition) {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  \"t_end\": ,\n}", true);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseScenario, NegativeLambdaRejectedWithPosition) {
  std::string text = kOscillator;
  text.insert(text.find("\n[potential]"), "\nlambda_values = [2.0, -1.0]\n");
  try {
    parse_scenario(text, false);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda must be positive"), std::string::npos);
    EXPECT_EQ(e.line(), 5u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseScenario, ZeroLambdaRejected) {
  std::string text = kOscillator;
  text.insert(text.find("\n[potential]"), "\nlambda_values = [0.0]\n");
  EXPECT_THROW(parse_scenario(text, false), ConfigError);
}

TEST(ParseScenario, UnknownKeysRejected) {
  std::string text = kOscillator;
  text += "colour = \"blue\"\n";
  try {
    parse_scenario(text, false);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  EXPECT_THROW(parse_scenario(std::string(kOscillator).replace(0, 4, "nmae"), false), ConfigError);
}

TEST(ParseScenario, UnknownCheckAndPotential) {
  std::string bad_check = kOscillator;
  bad_check.replace(bad_check.find("\"virial\""), 8, "\"energy\"");
  EXPECT_THROW(parse_scenario(bad_check, false), ConfigError);
  std::string bad_kind = kOscillator;
  bad_kind.replace(bad_kind.find("harmonic"), 8, "yukawa");
  EXPECT_THROW(parse_scenario(bad_kind, false), ConfigError);
}

TEST(ParseScenario, InconsistentExponents) {
  std::string text = kOscillator;
  text.replace(text.find("k = 2.0"), 7, "a = 1.0\nb = 1.0\nc = 3.0");
  EXPECT_THROW(parse_scenario(text, false), ConfigError);
}

TEST(Validate, MappingNeedsLambdas) {
  std::string text = kOscillator;
  text.replace(text.find("\"virial\""), 8, "\"mapping\"");
  EXPECT_THROW(parse_scenario(text, false), ConfigError);
}

TEST(Validate, VirialNeedsPeriodicSystem) {
  std::string text = kOscillator;
  text.replace(text.find("harmonic"), 8, "kepler");
  text.replace(text.find("omega"), 5, "coupling");
  text.replace(text.find("k = 2.0"), 7, "k = -1.0");
  text.replace(text.find("qdot = [0.5]"), 12, "qdot = [3.0]");
  EXPECT_THROW(parse_scenario(text, false), ConfigError);

  std::string aniso = kOscillator;
  aniso.replace(aniso.find("q = [1.0]"), 9, "q = [1.0, 0.0]");
  aniso.replace(aniso.find("qdot = [0.5]"), 12, "qdot = [0.0, 0.5]");
  aniso.insert(aniso.find("\n[potential]"), "\nmass_matrix = [[2.0, 0.0], [0.0, 1.0]]\n");
  EXPECT_THROW(parse_scenario(aniso, false), ConfigError);
}

TEST(Validate, HomothetyNeedsItsLaw) {
  std::string text = kOscillator;
  text.replace(text.find("k = 2.0"), 7, "k = 0.0");
  text.replace(text.find("\"virial\""), 8, "\"homothety\"");
  EXPECT_THROW(parse_scenario(text, false), ConfigError);
}

TEST(IsPeriodicSystem, Catalog) {
  PhaseState bound{Vector::Unit(2, 0), 1.2 * Vector::Unit(2, 1), 0.0};
  PhaseState unbound{Vector::Unit(2, 0), 1.5 * Vector::Unit(2, 1), 0.0};
  EXPECT_TRUE(is_periodic_system(DynamicalSystem(2, Potential::kepler(1.0)), bound));
  EXPECT_FALSE(is_periodic_system(DynamicalSystem(2, Potential::kepler(1.0)), unbound));
  EXPECT_TRUE(is_periodic_system(DynamicalSystem(2, Potential::harmonic(1.0)), unbound));
  EXPECT_TRUE(is_periodic_system(DynamicalSystem(Matrix::Identity(2, 2) * 3.0, Potential::harmonic(1.0)), bound));
  EXPECT_FALSE(is_periodic_system(DynamicalSystem(2, Potential::zero()), bound));
  EXPECT_FALSE(is_periodic_system(DynamicalSystem(2, Potential::saddle(1.0)), bound));
}

TEST(CheckNames, RoundTrip) {
  for (auto c : {Check::kCharge, Check::kVirial, Check::kSymmetryResidual, Check::kMapping, Check::kGenerator,
                 Check::kBargmann, Check::kHomothety}) {
    EXPECT_EQ(check_from_string(to_string(c)), c);
  }
  EXPECT_EQ(to_string(Check::kSymmetryResidual), "symmetry_residual");
}

TEST(Builtins, Catalog) {
  const auto& catalog = list_builtin_scenarios();
  ASSERT_EQ(catalog.size(), 8u);
  const std::vector<std::string> names = {"free-dilation",      "inverse-square",          "kepler-rescale",
                                          "galilei-drop",       "oscillator-rescale",      "oscillator-1d-homothety",
                                          "brdicka-wave",       "isotropic-ppwave"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(catalog[i].name, names[i]);
    EXPECT_NO_THROW(builtin_scenario(names[i]));
  }
  EXPECT_THROW(builtin_scenario("nope"), ConfigError);
}

TEST(Builtins, GalileiLaw) {
  const auto sc = builtin_scenario("galilei-drop");
  EXPECT_EQ(sc.law.a, 2.0);
  EXPECT_EQ(sc.law.b, 1.0);
  EXPECT_EQ(sc.law.c, 3.0);
}

TEST(Builtins, BrdickaIsTraceless) {
  auto sc = builtin_scenario("brdicka-wave");
  ASSERT_TRUE(sc.ppwave.has_value());
  EXPECT_EQ(sc.ppwave->kind, PPWaveKind::kBrdicka);
  sc.output_dir = scratch("brdicka");
  const auto report = run_scenario(sc);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(fact(report, "vacuum"), "true");
  EXPECT_EQ(std::stod(fact(report, "profile_trace")), 0.0);
}

TEST(Builtins, IsotropicIsNotVacuum) {
  auto sc = builtin_scenario("isotropic-ppwave");
  sc.output_dir = scratch("isotropic");
  EXPECT_EQ(fact(run_scenario(sc), "vacuum"), "false");
}

TEST(RunScenario, KeplerRescalePasses) {
  auto sc = builtin_scenario("kepler-rescale");
  sc.output_dir = scratch("kepler");
  const auto report = run_scenario(sc);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.checks.size(), 6u);
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << to_string(c.check) << ": " << c.detail;
  for (const char* f : {"trajectory.csv", "charge.csv", "worldline.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(sc.output_dir / f)) << f;
  }
  const auto json = nlohmann::json::parse(slurp(sc.output_dir / "report.json"));
  EXPECT_EQ(json["pass"], true);
  EXPECT_EQ(json["scenario"], "kepler-rescale");
}

TEST(RunScenario, WrongLawFailsChargeCheck) {
  auto sc = builtin_scenario("kepler-rescale");
  sc.law = solve_exponents(0.0);
  sc.checks = {Check::kCharge};
  sc.output_dir = scratch("wrong-law");
  const auto report = run_scenario(sc);
  EXPECT_FALSE(report.pass);
  const auto* charge = find(report, Check::kCharge);
  ASSERT_NE(charge, nullptr);
  EXPECT_FALSE(charge->pass);
  EXPECT_FALSE(charge->detail.empty());
}

TEST(RunScenario, Deterministic) {
  auto sc = builtin_scenario("oscillator-1d-homothety");
  sc.output_dir = scratch("det-a");
  run_scenario(sc);
  const auto a = sc.output_dir;
  sc.output_dir = scratch("det-b");
  run_scenario(sc);
  for (const char* f : {"trajectory.csv", "charge.csv", "worldline.csv"}) {
    const auto lhs = slurp(a / f);
    EXPECT_FALSE(lhs.empty());
    EXPECT_EQ(lhs, slurp(sc.output_dir / f)) << f;
  }
}

TEST(RunScenario, AllBuiltinsPass) {
  for (const auto& b : list_builtin_scenarios()) {
    auto sc = builtin_scenario(b.name);
    sc.output_dir = scratch("all-" + b.name);
    const auto report = run_scenario(sc);
    EXPECT_TRUE(report.pass) << b.name;
    for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << b.name << "/" << to_string(c.check) << ": " << c.detail;
  }
}

TEST(LoadScenario, ByExtension) {
  const auto dir = scratch("load");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "osc.toml") << kOscillator;
  }
  EXPECT_EQ(load_scenario(dir / "osc.toml").name, "osc");
  EXPECT_THROW(load_scenario(dir / "missing.toml"), ConfigError);
}

}  // namespace
}  // namespace noether
