#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "noether/virial.hpp"
#include "oracles.hpp"

namespace noether {
namespace {

using std::numbers::pi;
using testing::vec;

Trajectory run(const DynamicalSystem& sys, const PhaseState& ic, double t_end) {
  IntegrateOptions opt;
  opt.tol = 1e-12;
  opt.grid_intervals = 2000;
  return integrate_trajectory(sys, ic, t_end, opt);
}

TEST(PeriodAverages, Oscillator) {
  const DynamicalSystem sys(1, Potential::harmonic(1.0));
  const auto avg = period_averages(run(sys, {vec({1.0}), vec({0.0}), 0.0}, 7.0), 2.0 * pi);
  EXPECT_NEAR(avg.avg_K, 0.25, 1e-9);
  EXPECT_NEAR(avg.avg_V, 0.25, 1e-9);
}

TEST(PeriodAverages, FreeParticle) {
  const DynamicalSystem sys(2, Potential::zero());
  const auto avg = period_averages(run(sys, {vec({1.0, 0.0}), vec({0.6, 0.8}), 0.0}, 4.0), 3.3);
  EXPECT_NEAR(avg.avg_K, 0.5, 1e-12);
  EXPECT_EQ(avg.avg_V, 0.0);
}

TEST(PeriodAverages, Kepler) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const Vector q0 = vec({1.0, 0.0}), v0 = vec({0.0, 1.2});
  const double T = testing::kepler_period(q0, v0, 1.0);
  const auto avg = period_averages(run(sys, {q0, v0, 0.0}, 1.1 * T), T);
  EXPECT_NEAR(avg.avg_K, 0.28, 1e-5);
  EXPECT_NEAR(avg.avg_V, -0.56, 1e-5);
}

TEST(PeriodAverages, PeriodBeyondTrajectory) {
  const DynamicalSystem sys(1, Potential::harmonic(1.0));
  const auto traj = run(sys, {vec({1.0}), vec({0.0}), 0.0}, 3.0);
  EXPECT_THROW(period_averages(traj, 4.0), UsageError);
  EXPECT_THROW(period_averages(traj, 0.0), UsageError);
}

TEST(VirialCheck, Oscillator) {
  const auto report = virial_check(2.0, {0.25, 0.25}, 1e-7, 2.0 * pi);
  EXPECT_TRUE(report.pass);
  EXPECT_DOUBLE_EQ(report.ratio, 1.0);
  EXPECT_DOUBLE_EQ(report.expected_ratio, 1.0);
  EXPECT_EQ(report.defect, 0.0);
}

TEST(VirialCheck, DefectAgainstTolerance) {
  const auto report = virial_check(-1.0, {0.28, -0.5}, 1e-5);
  EXPECT_FALSE(report.pass);
  EXPECT_NEAR(report.defect, 0.03, 1e-15);
}

TEST(PeriodicVirial, OscillatorRandomInitialConditions) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double omega : {0.5, 1.0, 2.0}) {
    const DynamicalSystem sys(2, Potential::harmonic(omega));
    for (int trial = 0; trial < 10; ++trial) {
      const PhaseState ic{vec({u(rng), u(rng)}), vec({u(rng), u(rng)}), 0.0};
      const double energy = evaluate_hamiltonian(sys, ic);
      const auto traj = run(sys, ic, 1.25 * 2.0 * pi / omega);
      std::string reason;
      const auto report = periodic_virial_check(traj, 1e-5 * (1.0 + std::abs(energy)), 1e-6, &reason);
      ASSERT_TRUE(report.has_value()) << reason;
      EXPECT_TRUE(report->pass) << "omega " << omega << " defect " << report->defect;
      EXPECT_NEAR(report->T, 2.0 * pi / omega, 1e-6);
      EXPECT_GE(report->avg_K, 0.0);
    }
  }
}

TEST(PeriodicVirial, KeplerRandomEllipses) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> speed(0.8, 1.3);
  std::uniform_real_distribution<double> tilt(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector q0 = vec({1.0, 0.0});
    const double v = speed(rng);
    const Vector v0 = vec({v * std::sin(tilt(rng)), v});
    const double energy = testing::kepler_energy(q0, v0, 1.0);
    const double T = testing::kepler_period(q0, v0, 1.0);
    const auto report = periodic_virial_check(run(sys, {q0, v0, 0.0}, 1.25 * T), 1e-5 * (1.0 + std::abs(energy)));
    ASSERT_TRUE(report.has_value());
    EXPECT_TRUE(report->pass) << "trial " << trial << " defect " << report->defect;
    EXPECT_NEAR(report->avg_K, -energy, 1e-5);
    EXPECT_NEAR(report->avg_V, 2.0 * energy, 1e-5);
  }
}

TEST(PeriodicVirial, FreeFallIsUnsupported) {
  const DynamicalSystem sys(1, Potential::linear_force(1.0));
  std::string reason;
  EXPECT_FALSE(periodic_virial_check(run(sys, {vec({0.0}), vec({1.0}), 0.0}, 3.0), 1e-5, 1e-6, &reason).has_value());
  EXPECT_FALSE(reason.empty());
}

TEST(PeriodicVirial, CustomPotentialUsesDeclaredDegree) {
  const auto pot = Potential::custom_homogeneous(2.0, [](const Vector& q) { return 0.5 * q.squaredNorm(); });
  const DynamicalSystem sys(1, pot);
  EXPECT_TRUE(periodic_virial_check(run(sys, {vec({1.0}), vec({0.0}), 0.0}, 8.0), 1e-5).has_value());
}

TEST(VirialJson, Keys) {
  const auto json = nlohmann::json::parse(to_json(virial_check(2.0, {0.25, 0.25}, 1e-7, 6.0)));
  for (const char* key : {"T", "avg_K", "avg_V", "defect", "pass"}) EXPECT_TRUE(json.contains(key)) << key;
  EXPECT_EQ(json["pass"], true);
  EXPECT_EQ(json["T"], 6.0);
}

}  // namespace
}  // namespace noether
