#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "noether/integrate.hpp"
#include "oracles.hpp"

namespace noether {
namespace {

using std::numbers::pi;
using testing::vec;

TEST(Ode, ExponentialDecay) {
  const auto rhs = [](double, const Vector& y, Vector& dy) { dy = -y; };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-12;
  ode::Stats stats;
  const auto sol = ode::integrate(rhs, 0.0, vec({1.0, 2.0}), 5.0, opt, &stats);
  EXPECT_NEAR(sol.value(5.0)[0], std::exp(-5.0), 1e-12);
  EXPECT_NEAR(sol.value(5.0)[1], 2.0 * std::exp(-5.0), 1e-12);
  EXPECT_GT(stats.steps_accepted, 0u);
  EXPECT_GT(stats.rhs_evaluations, stats.steps_accepted);
}

TEST(Ode, DenseOutputIsAccurateBetweenSteps) {
  const auto rhs = [](double, const Vector& y, Vector& dy) {
    dy.resize(2);
    dy << y[1], -y[0];
  };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-12;
  const auto sol = ode::integrate(rhs, 0.0, vec({0.0, 1.0}), 10.0, opt);
  double worst = 0.0;
  for (int i = 0; i <= 997; ++i) {
    const double t = 10.0 * i / 997.0;
    Vector y, dy;
    sol.evaluate(t, y, dy);
    worst = std::max({worst, std::abs(y[0] - std::sin(t)), std::abs(dy[0] - std::cos(t))});
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Ode, SegmentsAreContiguous) {
  const auto rhs = [](double t, const Vector&, Vector& dy) { dy = Vector::Constant(1, std::cos(t)); };
  const auto sol = ode::integrate(rhs, 0.0, vec({0.0}), 7.0, {});
  const auto times = sol.step_times();
  ASSERT_GE(times.size(), 2u);
  EXPECT_EQ(times.front(), 0.0);
  EXPECT_EQ(times.back(), 7.0);
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_LT(times[i - 1], times[i]);
}

TEST(Ode, BlowUpRaisesIntegrationError) {
  const auto rhs = [](double, const Vector& y, Vector& dy) { dy = y.cwiseProduct(y); };
  try {
    ode::integrate(rhs, 0.0, vec({1.0}), 2.0, {});
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_LT(e.last_t(), 1.0 + 1e-6);
    EXPECT_GT(e.last_t(), 0.9);
    EXPECT_EQ(e.last_state().size(), 1);
  }
}

TEST(Trajectory, FreeParticleIsLinear) {
  const DynamicalSystem sys(2, Potential::zero());
  const auto traj = integrate_trajectory(sys, {vec({0.0, 1.0}), vec({1.0, -0.5}), 0.0}, 2.0);
  const auto end = sample_at(traj, 2.0);
  EXPECT_NEAR(end.q[0], 2.0, 1e-12);
  EXPECT_NEAR(end.q[1], 0.0, 1e-12);
  EXPECT_NEAR(end.action, 0.5 * 1.25 * 2.0, 1e-12);
}

TEST(Trajectory, GalileiDrop) {
  const DynamicalSystem sys(1, Potential::linear_force(1.0));
  const auto traj = integrate_trajectory(sys, {vec({0.0}), vec({0.0}), 0.0}, 1.0);
  const auto end = sample_at(traj, 1.0);
  EXPECT_NEAR(end.q[0], -0.5, 1e-12);
  EXPECT_NEAR(end.qdot[0], -1.0, 1e-12);
  EXPECT_NEAR(end.action, 1.0 / 3.0, 1e-12);
}

TEST(Trajectory, OscillatorHalfPeriod) {
  const DynamicalSystem sys(1, Potential::harmonic(1.0));
  const auto traj = integrate_trajectory(sys, {vec({1.0}), vec({0.0}), 0.0}, pi);
  const auto end = sample_at(traj, pi);
  EXPECT_NEAR(end.q[0], -1.0, 1e-9);
  EXPECT_NEAR(end.action, 0.0, 1e-9);
}

TEST(Trajectory, GridLayout) {
  const DynamicalSystem sys(1, Potential::harmonic(1.0));
  IntegrateOptions opt;
  opt.grid_intervals = 40;
  const auto traj = integrate_trajectory(sys, {vec({1.0}), vec({0.0}), 0.0}, 2.0, opt);
  ASSERT_EQ(traj.samples.size(), 41u);
  EXPECT_EQ(traj.samples.front().t, 0.0);
  EXPECT_EQ(traj.samples.back().t, 2.0);
  EXPECT_EQ(traj.samples.front().q[0], 1.0);
  EXPECT_EQ(traj.samples.front().action, 0.0);
  EXPECT_DOUBLE_EQ(traj.samples[20].t, 1.0);
  EXPECT_EQ(traj.tol, opt.tol);
}

TEST(Trajectory, SampleAtGridReturnsStoredSample) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const auto traj = integrate_trajectory(sys, {vec({1.0, 0.0}), vec({0.0, 1.2}), 0.0}, 3.0);
  const auto& s = traj.samples[317];
  const auto v = sample_at(traj, s.t);
  EXPECT_EQ(v.q, s.q);
  EXPECT_EQ(v.qdot, s.qdot);
  EXPECT_EQ(v.action, s.action);
}

TEST(Trajectory, SampleAtOutOfRange) {
  const DynamicalSystem sys(1, Potential::zero());
  const auto traj = integrate_trajectory(sys, {vec({0.0}), vec({1.0}), 0.0}, 1.0);
  EXPECT_THROW(sample_at(traj, -0.1), UsageError);
  EXPECT_THROW(sample_at(traj, 1.1), UsageError);
}

TEST(Trajectory, ToleranceRange) {
  const DynamicalSystem sys(1, Potential::zero());
  const PhaseState ic{vec({0.0}), vec({1.0}), 0.0};
  IntegrateOptions opt;
  opt.tol = 1e-15;
  EXPECT_THROW(integrate_trajectory(sys, ic, 1.0, opt), UsageError);
  opt.tol = 1e-2;
  EXPECT_THROW(integrate_trajectory(sys, ic, 1.0, opt), UsageError);
  opt.tol = 1e-14;
  EXPECT_NO_THROW(integrate_trajectory(sys, ic, 1.0, opt));
}

TEST(Trajectory, SingularInitialState) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  EXPECT_THROW(integrate_trajectory(sys, {vec({0.0, 0.0}), vec({1.0, 0.0}), 0.0}, 1.0), DomainError);
}

TEST(Trajectory, CollisionRaisesIntegrationError) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  EXPECT_THROW(integrate_trajectory(sys, {vec({1.0, 0.0}), vec({0.0, 0.0}), 0.0}, 2.0), IntegrationError);
}

TEST(Trajectory, ActionIsAdditive) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const PhaseState ic{vec({1.0, 0.0}), vec({0.0, 1.2}), 0.0};
  IntegrateOptions opt;
  opt.tol = 1e-12;
  const auto full = integrate_trajectory(sys, ic, 4.0, opt);
  const auto first = integrate_trajectory(sys, ic, 1.5, opt);
  const auto mid = first.samples.back();
  opt.initial_action = mid.action;
  const auto rest = integrate_trajectory(sys, {mid.q, mid.qdot, 0.0}, 2.5, opt);
  EXPECT_NEAR(rest.samples.back().action, sample_at(full, 4.0).action, 1e-10);
  EXPECT_NEAR((rest.samples.back().q - sample_at(full, 4.0).q).norm(), 0.0, 1e-10);
}

TEST(Trajectory, TimeReversalReturnsToStart) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const PhaseState ic{vec({1.0, 0.0}), vec({0.0, 1.2}), 0.0};
  IntegrateOptions opt;
  opt.tol = 1e-12;
  const auto fwd = integrate_trajectory(sys, ic, 5.0, opt);
  const auto end = fwd.samples.back();
  const auto back = integrate_trajectory(sys, {end.q, -end.qdot, 0.0}, 5.0, opt);
  EXPECT_LE((back.samples.back().q - ic.q).norm(), 1e-9);
  EXPECT_LE((back.samples.back().qdot + ic.qdot).norm(), 1e-9);
  EXPECT_NEAR(back.samples.back().action, end.action, 1e-9);
}

TEST(Trajectory, EnergyIsConserved) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const PhaseState ic{vec({1.0, 0.0}), vec({0.0, 1.2}), 0.0};
  const auto traj = integrate_trajectory(sys, ic, 30.0);
  const double e0 = evaluate_hamiltonian(sys, ic);
  for (const auto& s : traj.samples) EXPECT_NEAR(evaluate_hamiltonian(sys, {s.q, s.qdot, s.t}), e0, 1e-9);
}

TEST(Period, Oscillator) {
  const DynamicalSystem sys(1, Potential::harmonic(2.0));
  const auto traj = integrate_trajectory(sys, {vec({1.0}), vec({0.0}), 0.0}, 4.0);
  const auto period = detect_period(traj);
  ASSERT_TRUE(period.has_value());
  EXPECT_NEAR(*period, pi, 1e-8);
}

TEST(Period, KeplerMatchesVisViva) {
  const DynamicalSystem sys(2, Potential::kepler(1.0));
  const Vector q0 = vec({1.0, 0.0});
  const Vector v0 = vec({0.0, 1.2});
  IntegrateOptions opt;
  opt.tol = 1e-12;
  const auto traj = integrate_trajectory(sys, {q0, v0, 0.0}, 18.0, opt);
  const auto period = detect_period(traj);
  ASSERT_TRUE(period.has_value());
  EXPECT_NEAR(*period, testing::kepler_period(q0, v0, 1.0), 1e-7);
}

TEST(Period, FreeParticleIsAperiodic) {
  const DynamicalSystem sys(2, Potential::zero());
  const auto traj = integrate_trajectory(sys, {vec({1.0, 0.0}), vec({0.3, 0.4}), 0.0}, 10.0);
  EXPECT_FALSE(detect_period(traj).has_value());
}

TEST(Period, TooShortIsAperiodic) {
  const DynamicalSystem sys(1, Potential::harmonic(1.0));
  const auto traj = integrate_trajectory(sys, {vec({1.0}), vec({0.0}), 0.0}, 5.0);
  EXPECT_FALSE(detect_period(traj).has_value());
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const DynamicalSystem sys(2, Potential::harmonic(1.0));
  IntegrateOptions opt;
  opt.grid_intervals = 10;
  const auto traj = integrate_trajectory(sys, {vec({1.0, 0.0}), vec({0.0, 1.0}), 0.0}, 1.0, opt);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,q1,q2,qd1,qd2,S");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 11);
}

}  // namespace
}  // namespace noether
