#include "noether/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dop853_tableau.hpp"

namespace noether::ode {

namespace tab = dop853;

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

template <typename Eval>
double initial_step(const Eval& rhs, double t0, const Vector& y0, const Vector& f0, double span,
                    const Options& opt) {
  const Vector scale = (opt.atol + opt.rtol * y0.array().abs()).matrix();
  const double n = static_cast<double>(y0.size());
  const double d0 = (y0.array() / scale.array()).matrix().norm() / std::sqrt(n);
  const double d1 = (f0.array() / scale.array()).matrix().norm() / std::sqrt(n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Vector f1(y0.size());
  rhs(t0 + h0, y0 + h0 * f0, f1);
  const double d2 = ((f1 - f0).array() / scale.array()).matrix().norm() / std::sqrt(n) / h0;
  double h1;
  if (d1 <= 1e-15 && d2 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  }
  return std::min({100.0 * h0, h1, span, opt.max_step});
}

}  // namespace

Vector DenseSegment::value(double t) const {
  const double h = t1_ - t0_;
  const double x = (t - t0_) / h;
  Vector y = Vector::Zero(y0_.size());
  const auto power = static_cast<Eigen::Index>(coefficients_.cols());
  for (Eigen::Index i = 0; i < power; ++i) {
    y += coefficients_.col(power - 1 - i);
    y *= (i % 2 == 0) ? x : 1.0 - x;
  }
  return y + y0_;
}

void DenseSegment::evaluate(double t, Vector& y, Vector& dydt) const {
  // The nested product alternates factors x and (1 - x); carry d/dx along.
  const double h = t1_ - t0_;
  const double x = (t - t0_) / h;
  y = Vector::Zero(y0_.size());
  Vector dy = Vector::Zero(y0_.size());
  const auto power = static_cast<Eigen::Index>(coefficients_.cols());
  for (Eigen::Index i = 0; i < power; ++i) {
    y += coefficients_.col(power - 1 - i);
    if (i % 2 == 0) {
      dy = dy * x + y;
      y *= x;
    } else {
      dy = dy * (1.0 - x) - y;
      y *= 1.0 - x;
    }
  }
  y += y0_;
  dydt = dy / h;
}

DenseSegment DenseSegment::scaled(double time_factor, const Vector& factors) const {
  Matrix c = factors.asDiagonal() * coefficients_;
  return DenseSegment(time_factor * t0_, time_factor * t1_, factors.cwiseProduct(y0_), std::move(c));
}

DenseSolution::DenseSolution(std::vector<DenseSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw UsageError("dense solution needs at least one segment");
}

std::vector<double> DenseSolution::step_times() const {
  std::vector<double> times;
  times.reserve(segments_.size() + 1);
  times.push_back(segments_.front().t0());
  for (const auto& s : segments_) times.push_back(s.t1());
  return times;
}

const DenseSegment& DenseSolution::locate(double t) const {
  if (segments_.empty()) throw UsageError("empty dense solution");
  if (t < t_begin() || t > t_end()) throw UsageError("time outside the integrated interval");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const DenseSegment& s) { return value < s.t1(); });
  if (it == segments_.end()) --it;
  return *it;
}

Vector DenseSolution::value(double t) const { return locate(t).value(t); }

void DenseSolution::evaluate(double t, Vector& y, Vector& dydt) const { locate(t).evaluate(t, y, dydt); }

DenseSolution DenseSolution::scaled(double time_factor, const Vector& factors) const {
  std::vector<DenseSegment> out;
  out.reserve(segments_.size());
  for (const auto& s : segments_) out.push_back(s.scaled(time_factor, factors));
  return DenseSolution(std::move(out));
}

DenseSolution integrate(const Rhs& rhs, double t0, const Vector& y0, double t_end,
                        const Options& opt, Stats* stats_out) {
  if (!(t_end > t0)) throw UsageError("integration end time must exceed start time");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw UsageError("tolerances must be positive");
  if (!y0.allFinite()) throw UsageError("initial state is not finite");

  const auto n = y0.size();
  Stats stats;
  Matrix k(n, tab::kStagesExtended);  // stage derivatives, one per column
  Vector y = y0;
  Vector f(n);
  double t = t0;

  auto eval = [&](double time, const Vector& state, Vector& out) {
    try {
      rhs(time, state, out);
    } catch (const DomainError& e) {
      throw IntegrationError(std::string("right-hand side failed: ") + e.what(), t, y);
    }
    ++stats.rhs_evaluations;
  };

  eval(t, y, f);
  double h_abs = initial_step(eval, t, y, f, t_end - t0, opt);

  std::vector<DenseSegment> segments;
  Vector stage(n);
  Vector y_new(n);
  Vector f_new(n);

  while (t < t_end) {
    if (stats.steps_accepted + stats.steps_rejected >= opt.max_steps) {
      throw IntegrationError("step budget exhausted", t, y);
    }
    const double min_step = 10.0 * std::abs(std::nextafter(t, t_end) - t);
    h_abs = std::clamp(h_abs, min_step, opt.max_step);

    bool accepted = false;
    bool rejected = false;
    double h = 0.0;
    double t_new = t;
    while (!accepted) {
      if (h_abs < min_step) {
        std::ostringstream os;
        os.precision(17);
        os << "step size underflow at t = " << t;
        throw IntegrationError(os.str(), t, y);
      }
      t_new = std::min(t + h_abs, t_end);
      h = t_new - t;

      k.col(0) = f;
      for (std::size_t s = 1; s < tab::kStages; ++s) {
        stage = y;
        for (std::size_t j = 0; j < s; ++j) {
          if (tab::kA[s][j] != 0.0) stage += (h * tab::kA[s][j]) * k.col(static_cast<Eigen::Index>(j));
        }
        Vector out(n);
        eval(t + tab::kC[s] * h, stage, out);
        k.col(static_cast<Eigen::Index>(s)) = out;
      }
      y_new = y;
      for (std::size_t j = 0; j < tab::kStages; ++j) {
        if (tab::kB[j] != 0.0) y_new += (h * tab::kB[j]) * k.col(static_cast<Eigen::Index>(j));
      }

      bool finite = y_new.allFinite();
      if (finite) {
        eval(t_new, y_new, f_new);
        finite = f_new.allFinite();
      }
      if (!finite) {
        // Treat overflow inside a step as a rejection; persistent failure
        // runs into the underflow branch above.
        ++stats.steps_rejected;
        rejected = true;
        h_abs *= kMinFactor;
        continue;
      }
      k.col(static_cast<Eigen::Index>(tab::kStages)) = f_new;

      double error_norm = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double e5 = 0.0;
        double e3 = 0.0;
        for (std::size_t j = 0; j <= tab::kStages; ++j) {
          e5 += tab::kE5[j] * k(i, static_cast<Eigen::Index>(j));
          e3 += tab::kE3[j] * k(i, static_cast<Eigen::Index>(j));
        }
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        e5 /= scale;
        e3 /= scale;
        const double denom = std::sqrt(e5 * e5 + 0.01 * e3 * e3);
        const double err = denom > 0.0 ? std::abs(h) * e5 * e5 / denom : 0.0;
        error_norm = std::max(error_norm, err);
      }

      if (error_norm < 1.0) {
        double factor = error_norm == 0.0 ? kMaxFactor
                                          : std::min(kMaxFactor, kSafety * std::pow(error_norm, kErrorExponent));
        if (rejected) factor = std::min(1.0, factor);
        h_abs *= factor;
        accepted = true;
      } else {
        h_abs *= std::max(kMinFactor, kSafety * std::pow(error_norm, kErrorExponent));
        rejected = true;
        ++stats.steps_rejected;
      }
    }
    ++stats.steps_accepted;

    // Extra stages for the continuous extension.
    for (std::size_t s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
      stage = y;
      for (std::size_t j = 0; j < s; ++j) {
        if (tab::kA[s][j] != 0.0) stage += (h * tab::kA[s][j]) * k.col(static_cast<Eigen::Index>(j));
      }
      Vector out(n);
      eval(t + tab::kC[s] * h, stage, out);
      k.col(static_cast<Eigen::Index>(s)) = out;
    }
    Matrix coeff(n, tab::kInterpolatorPower);
    const Vector delta = y_new - y;
    coeff.col(0) = delta;
    coeff.col(1) = h * f - delta;
    coeff.col(2) = 2.0 * delta - h * (f_new + f);
    for (std::size_t r = 0; r < tab::kD.size(); ++r) {
      Vector acc = Vector::Zero(n);
      for (std::size_t j = 0; j < tab::kStagesExtended; ++j) {
        if (tab::kD[r][j] != 0.0) acc += tab::kD[r][j] * k.col(static_cast<Eigen::Index>(j));
      }
      coeff.col(static_cast<Eigen::Index>(3 + r)) = h * acc;
    }
    segments.emplace_back(t, t_new, y, std::move(coeff));

    t = t_new;
    y = y_new;
    f = f_new;
  }

  if (stats_out) *stats_out = stats;
  return DenseSolution(std::move(segments));
}

}  // namespace noether::ode
