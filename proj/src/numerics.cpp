#include "mledist/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mledist/error.hpp"

namespace mledist {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kLogInvSqrt2Pi = -0.91893853320467274178;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

// log Phi(x) for x < -20 from the asymptotic series of the Mills ratio:
// Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...).
double log_ndtr_lower_tail(double x) {
  const double inv2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    series += term;
  }
  return kLogInvSqrt2Pi - 0.5 * x * x - std::log(-x) + std::log(series);
}

}  // namespace

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x * kSqrt1_2);
}

double log_std_normal_cdf(double x) {
  require_finite(x, "log_std_normal_cdf");
  if (x > -20.0) {
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x * kSqrt1_2));
    return std::log(0.5 * std::erfc(-x * kSqrt1_2));
  }
  return log_ndtr_lower_tail(x);
}

double normal_hazard(double x) {
  require_finite(x, "normal_hazard");
  if (x > -20.0) return std_normal_pdf(x) / (0.5 * std::erfc(-x * kSqrt1_2));
  return std::exp(kLogInvSqrt2Pi - 0.5 * x * x - log_ndtr_lower_tail(x));
}

double regularized_gamma_lower(double shape, double x) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("regularized_gamma_lower: shape must be positive");
  }
  if (!(x >= 0.0)) throw DomainError("regularized_gamma_lower: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(shape, x);
}

double regularized_gamma_upper(double shape, double x) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("regularized_gamma_upper: shape must be positive");
  }
  if (!(x >= 0.0)) throw DomainError("regularized_gamma_upper: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(shape, x);
}

double find_root_monotone(const std::function<double(double)>& f, double hint,
                          const RootOptions& options) {
  const Interval& support = options.support;
  if (!std::isfinite(hint) || !support.contains(hint)) {
    if (std::isfinite(support.lo) && std::isfinite(support.hi)) {
      hint = 0.5 * (support.lo + support.hi);
    } else if (std::isfinite(support.lo)) {
      hint = support.lo + 1.0;
    } else if (std::isfinite(support.hi)) {
      hint = support.hi - 1.0;
    } else {
      hint = 0.0;
    }
  }

  const auto eval = [&f](double x) {
    const double v = f(x);
    if (std::isnan(v)) throw DomainError("find_root_monotone: function returned NaN");
    return v;
  };

  const double f_hint = eval(hint);
  if (f_hint == 0.0) return hint;

  // Walk away from the hint towards the root; a finite support end is
  // approached by halving the remaining distance instead of being crossed.
  const bool go_up = f_hint < 0.0;
  const double bound = go_up ? support.hi : support.lo;
  double prev = hint;
  double f_prev = f_hint;
  double step = options.initial_step > 0.0 ? options.initial_step : 1.0;
  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (int k = 0; k <= options.max_doublings; ++k) {
    double candidate = go_up ? hint + step : hint - step;
    if (go_up ? candidate >= bound : candidate <= bound) {
      candidate = 0.5 * (prev + bound);
    }
    if (candidate == prev) break;
    const double f_candidate = eval(candidate);
    if (f_candidate == 0.0) {
      // A zero that persists one step further is an underflow plateau, not a
      // crossing.
      double probe = go_up ? candidate + step : candidate - step;
      if (go_up ? probe >= bound : probe <= bound) probe = 0.5 * (candidate + bound);
      if (probe == candidate || eval(probe) != 0.0) return candidate;
      std::ostringstream msg;
      msg << "find_root_monotone: f keeps one sign up to " << prev
          << " and is identically zero from " << candidate << " on; no sign change";
      throw NoRootError(msg.str(), go_up ? f_prev : 0.0, go_up ? 0.0 : f_prev);
    }
    if ((f_candidate > 0.0) == go_up) {
      lo = go_up ? prev : candidate;
      hi = go_up ? candidate : prev;
      bracketed = true;
      break;
    }
    prev = candidate;
    f_prev = f_candidate;
    step *= 2.0;
  }
  if (!bracketed) {
    const double lo_end = go_up ? hint : prev;
    const double hi_end = go_up ? prev : hint;
    const double f_lo = go_up ? f_hint : f_prev;
    const double f_hi = go_up ? f_prev : f_hint;
    std::ostringstream msg;
    msg << "find_root_monotone: no sign change on [" << lo_end << ", " << hi_end
        << "]: f is " << (f_lo < 0.0 ? "negative" : "positive") << " at the lower end and "
        << (f_hi < 0.0 ? "negative" : "positive") << " at the upper end";
    throw NoRootError(msg.str(), f_lo, f_hi);
  }

  // Invariant: f(lo) < 0 < f(hi).
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= std::max(options.atol, options.rtol * std::abs(mid)) || mid <= lo ||
        mid >= hi) {
      return mid;
    }
    const double fm = eval(mid);
    if (fm == 0.0) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
}

QuadratureResult integrate_1d_detail(const std::function<double(double)>& g, double lo,
                                     double hi, const QuadratureOptions& options) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("integrate_1d: NaN limit");
  if (lo == hi) return {0.0, 0.0};
  if (lo > hi) {
    auto r = integrate_1d_detail(g, hi, lo, options);
    return {-r.value, r.error};
  }
  double error = 0.0;
  double l1 = 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double value =
      Rule::integrate(g, lo, hi, options.max_depth, options.rel_tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(options.abs_tol, options.rel_tol * l1)) {
    std::ostringstream msg;
    msg << "integrate_1d: error estimate " << error << " exceeds tolerance";
    throw AccuracyError(msg.str(), value, error);
  }
  return {value, error};
}

double finite_diff_step(const std::function<double(double)>& f, double z, int order,
                        double h) {
  if (order == 1) return (f(z + h) - f(z - h)) / (2.0 * h);
  if (order == 2) return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
  throw DomainError("finite_diff: order must be 1 or 2");
}

double finite_diff(const std::function<double(double)>& f, double z, int order) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(std::abs(z), 1.0);
  if (order == 1) return finite_diff_step(f, z, 1, scale * std::cbrt(eps));
  if (order == 2) return finite_diff_step(f, z, 2, scale * std::pow(eps, 0.25));
  throw DomainError("finite_diff: order must be 1 or 2");
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

}  // namespace mledist
