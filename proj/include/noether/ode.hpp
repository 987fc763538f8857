#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "noether/errors.hpp"

namespace noether::ode {

/// dy/dt = f(t, y). Must write all of `dydt`.
using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

struct Stats {
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Continuous extension of one accepted step, exact at both ends up to
/// rounding and of order 7 in between.
class DenseSegment {
 public:
  DenseSegment(double t0, double t1, Vector y0, Matrix coefficients)
      : t0_(t0), t1_(t1), y0_(std::move(y0)), coefficients_(std::move(coefficients)) {}

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  Vector value(double t) const;
  /// Value and time derivative of the interpolant.
  void evaluate(double t, Vector& y, Vector& dydt) const;

  /// Maps the segment under t -> time_factor * t and y_i -> factors_i * y_i.
  DenseSegment scaled(double time_factor, const Vector& factors) const;

 private:
  double t0_;
  double t1_;
  Vector y0_;
  Matrix coefficients_;  // n x 7
};

/// Piecewise dense output over [t_begin, t_end].
class DenseSolution {
 public:
  DenseSolution() = default;
  explicit DenseSolution(std::vector<DenseSegment> segments);

  bool empty() const { return segments_.empty(); }
  double t_begin() const { return segments_.front().t0(); }
  double t_end() const { return segments_.back().t1(); }
  const std::vector<DenseSegment>& segments() const { return segments_; }

  /// Times where accepted steps begin/end, including both endpoints.
  std::vector<double> step_times() const;

  Vector value(double t) const;
  void evaluate(double t, Vector& y, Vector& dydt) const;

  DenseSolution scaled(double time_factor, const Vector& factors) const;

 private:
  const DenseSegment& locate(double t) const;

  std::vector<DenseSegment> segments_;
};

/// Adaptive explicit Runge-Kutta 8(5,3) integration from t0 to t_end with
/// per-component error control |err_i| <= atol + rtol * |y_i|.
///
/// Throws IntegrationError when the step size underflows, the step budget is
/// exhausted, or the state becomes non-finite; a DomainError raised by the
/// right-hand side is rethrown as IntegrationError with the last good state.
DenseSolution integrate(const Rhs& rhs, double t0, const Vector& y0, double t_end,
                        const Options& options, Stats* stats = nullptr);

}  // namespace noether::ode
