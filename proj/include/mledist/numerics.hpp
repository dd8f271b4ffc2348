#pragma once

#include <functional>
#include <limits>

namespace mledist {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Standard normal CDF. Throws DomainError for non-finite x.
double std_normal_cdf(double x);

/// log Phi(x), accurate far into the lower tail.
double log_std_normal_cdf(double x);

/// phi(x) / Phi(x) (inverse Mills ratio), stable for very negative x.
double normal_hazard(double x);

/// P(G <= x) for G ~ Gamma(shape, 1).
double regularized_gamma_lower(double shape, double x);
/// P(G > x) for G ~ Gamma(shape, 1).
double regularized_gamma_upper(double shape, double x);

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const noexcept { return v > lo && v < hi; }
};

struct RootOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  /// Half-width of the first bracket around the hint.
  double initial_step = 1.0;
  int max_doublings = 60;
  /// The root is searched inside this open interval.
  Interval support{};
};

/// Root of a continuous nondecreasing function.
///
/// Starts from [hint - step, hint + step], doubles the step until f changes
/// sign (moving halfway towards a finite support end instead of crossing it),
/// then bisects. The returned point lies in a final bracket of width at most
/// max(atol, rtol*|root|), or is an exact zero of f. An exact-zero plateau
/// met while bracketing (underflow) is reported as NoRootError.
double find_root_monotone(const std::function<double(double)>& f, double hint,
                          const RootOptions& options = {});

struct QuadratureOptions {
  double abs_tol = 1e-9;
  /// Relative tolerance requested from the adaptive rule.
  double rel_tol = 1e-12;
  unsigned max_depth = 18;
};

struct QuadratureResult {
  double value;
  double error;
};

/// Adaptive Gauss-Kronrod (15 points) on (lo, hi). Infinite endpoints are
/// mapped to a finite interval with t/(1-t) (half line) or t/(1-t^2) (real
/// line). Throws AccuracyError when the error estimate exceeds
/// max(abs_tol, rel_tol * L1 norm).
QuadratureResult integrate_1d_detail(const std::function<double(double)>& g, double lo,
                                     double hi, const QuadratureOptions& options = {});

inline double integrate_1d(const std::function<double(double)>& g, double lo, double hi,
                           const QuadratureOptions& options = {}) {
  return integrate_1d_detail(g, lo, hi, options).value;
}

/// Central difference derivative of order 1 or 2 with step
/// max(|z|,1)*eps^(1/3) (order 1) or max(|z|,1)*eps^(1/4) (order 2).
double finite_diff(const std::function<double(double)>& f, double z, int order);

/// Same stencil with an explicit step.
double finite_diff_step(const std::function<double(double)>& f, double z, int order,
                        double h);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace mledist
