#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace nehari {

/// Invalid user input: grid extents, coefficients, exponents, config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (factorization, degenerate fiber, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of budget. Carries the best iterate it saw so
/// callers can still report it.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best, double energy,
                   double residual)
      : NumericError(what), best_(std::move(best)), energy_(energy), residual_(residual) {}

  const Eigen::VectorXd& best() const noexcept { return best_; }
  double energy() const noexcept { return energy_; }
  double residual() const noexcept { return residual_; }

 private:
  Eigen::VectorXd best_;
  double energy_;
  double residual_;
};

}  // namespace nehari
