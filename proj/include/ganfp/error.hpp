#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ganfp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& where, std::size_t expected,
                    std::size_t actual)
      : Error(where + ": dimension mismatch (expected " +
              std::to_string(expected) + ", got " + std::to_string(actual) +
              ")") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised by the Cholesky-based positive definiteness test. `pivot` is the
// zero-based index of the first diagonal pivot that fell below threshold.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value, double threshold)
      : Error("matrix is not positive definite: pivot " +
              std::to_string(pivot) + " = " + std::to_string(value) +
              " <= threshold " + std::to_string(threshold)),
        pivot_(pivot),
        value_(value) {}

  std::size_t pivot() const { return pivot_; }
  double value() const { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_estimate,
                 std::size_t iterations)
      : Error(what), last_estimate_(last_estimate), iterations_(iterations) {}

  double last_estimate() const { return last_estimate_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double last_estimate_;
  std::size_t iterations_;
};

class NonFiniteIterate : public Error {
 public:
  explicit NonFiniteIterate(std::size_t step)
      : Error("non-finite iterate produced at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace ganfp
