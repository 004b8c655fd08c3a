#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace heavy_anchor {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

// Malformed input: dimension mismatch, unknown fixture, bad parameter.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A condition required by a convergence result cannot be met.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear system without a unique solution.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, Eigen::Index rank, Eigen::Index dim)
      : std::runtime_error(what), rank_(rank), dim_(dim) {}
  Eigen::Index rank() const { return rank_; }
  Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index rank_;
  Eigen::Index dim_;
};

// Iterative solve that did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline void require_size(Eigen::Index actual, Eigen::Index expected, const char* what) {
  if (actual != expected) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(actual));
  }
}

}  // namespace heavy_anchor
