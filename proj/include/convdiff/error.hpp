#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace convdiff {

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

} // namespace detail

/// Raised when a discretization or solver cannot produce a usable result.
/// Precondition violations use std::invalid_argument instead.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class zero_pivot_error : public numerical_error {
public:
  explicit zero_pivot_error(std::size_t index)
      : numerical_error("zero pivot at elimination step " + std::to_string(index)),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

class convergence_error : public numerical_error {
public:
  convergence_error(std::size_t iterations, double residual)
      : numerical_error("iterative solver did not converge after " + std::to_string(iterations) +
                        " iterations (relative residual " + detail::sci(residual) + ")"),
        iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  std::size_t iterations_;
  double residual_;
};

} // namespace convdiff
