#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace noether::testing {

/// Specific orbital energy of a planar Kepler state with unit mass.
inline double kepler_energy(const Eigen::VectorXd& q, const Eigen::VectorXd& v, double alpha) {
  return 0.5 * v.squaredNorm() - alpha / q.norm();
}

/// Period from vis-viva: a = -alpha / (2E), T = 2 pi sqrt(a^3 / alpha).
inline double kepler_period(const Eigen::VectorXd& q, const Eigen::VectorXd& v, double alpha) {
  const double semi_major = -alpha / (2.0 * kepler_energy(q, v, alpha));
  return 2.0 * std::numbers::pi * std::sqrt(semi_major * semi_major * semi_major / alpha);
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace noether::testing
