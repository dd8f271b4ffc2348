#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mledist/numerics.hpp"

namespace mledist {

/// Strictly increasing, finite evaluation points.
class Grid {
 public:
  Grid() = default;
  /// Throws DomainError unless points are finite and strictly increasing.
  explicit Grid(std::vector<double> points);

  /// `steps` equispaced points on [lo, hi] (steps >= 2, or 1 with lo == hi).
  static Grid linspace(double lo, double hi, std::size_t steps);
  /// Parses "lo:hi:steps".
  static Grid parse(std::string_view spec);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  /// Throws DomainError if any point lies outside the open interval.
  void require_inside(const Interval& support, std::string_view what) const;

 private:
  std::vector<double> points_;
};

enum class CurveMethod {
  refined,
  normal,
  edgeworth,
  exact_exponential,
  empirical,
  wlb_exact,
  wlb_normal,
  wlb_fisher,
  wlb_oracle,
};

std::string_view to_string(CurveMethod method) noexcept;

struct CurveMeta {
  std::string model_id;
  std::size_t n = 0;
  double theta_star = 0.0;
  std::string moments;
  std::uint64_t seed = 0;
};

/// Estimated distribution function on a grid.
struct CdfCurve {
  Grid grid;
  std::vector<double> values;
  CurveMethod method = CurveMethod::refined;
  CurveMeta meta;
  /// Points whose value was forced to 0/1 or clipped into [0, 1].
  std::size_t saturated = 0;
  std::vector<std::string> warnings;
};

struct DensityCurve {
  Grid grid;
  std::vector<double> values;
};

/// Empirical CDF of `sample` at each grid point: #{s <= z} / size.
std::vector<double> empirical_cdf(std::span<const double> sample, const Grid& grid);

/// max_i |a_i - b_i|.
double sup_distance(std::span<const double> a, std::span<const double> b);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Trapezoid rule over the grid.
double trapezoid(const Grid& grid, std::span<const double> values);

}  // namespace mledist
