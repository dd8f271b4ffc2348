#pragma once

#include <stdexcept>
#include <string>

namespace mledist {

/// Input outside the mathematical domain of an operation (non-finite values,
/// parameters or observations outside an open support interval).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A monotone equation had no sign change on the searched bracket.
class NoRootError : public std::runtime_error {
 public:
  NoRootError(const std::string& what, double f_lo, double f_hi)
      : std::runtime_error(what), f_at_lo_(f_lo), f_at_hi_(f_hi) {}

  double f_at_lo() const noexcept { return f_at_lo_; }
  double f_at_hi() const noexcept { return f_at_hi_; }

 private:
  double f_at_lo_;
  double f_at_hi_;
};

/// Quadrature did not reach its tolerance. Carries the best estimate.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// A model violates its contract (non-convex family, nonpositive information,
/// closed form disagreeing with the score equation).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating-point cancellation made an exact formula unusable; the caller
/// should fall back to the Monte Carlo oracle.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mledist
