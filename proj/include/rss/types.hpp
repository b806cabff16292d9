#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rss {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when an integral that is being evaluated does not converge
/// mathematically (as opposed to a numerical failure).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature stopped before reaching its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved abs error " + std::to_string(achieved) + ")"),
        achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

/// A log-density or gradient evaluation produced a non-finite value.
/// Carries the state at which it happened.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, Vector where)
      : std::runtime_error(what), state(std::move(where)) {}
  Vector state;
};

}  // namespace rss
