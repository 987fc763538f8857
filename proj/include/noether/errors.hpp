#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace noether {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state lies outside the domain of the model (e.g. a collision with a
/// singular centre).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an argument precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not continue. Carries the last accepted
/// state so callers can report where things went wrong.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_t, Vector last_state)
      : Error(what), last_t_(last_t), last_state_(std::move(last_state)) {}

  double last_t() const { return last_t_; }
  const Vector& last_state() const { return last_state_; }

 private:
  double last_t_;
  Vector last_state_;
};

/// Malformed scenario configuration. Line and column are 1-based; zero means
/// the position is unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace noether
