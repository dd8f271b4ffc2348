#include "mledist/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "mledist/error.hpp"

namespace mledist {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw DomainError("Grid: non-finite point");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw DomainError("Grid: points must be strictly increasing");
    }
  }
}

Grid Grid::linspace(double lo, double hi, std::size_t steps) {
  if (steps == 0) throw DomainError("Grid::linspace: steps must be positive");
  if (steps == 1) {
    if (lo != hi) throw DomainError("Grid::linspace: one step needs lo == hi");
    return Grid({lo});
  }
  if (!(hi > lo)) throw DomainError("Grid::linspace: need lo < hi");
  std::vector<double> pts(steps);
  const double h = (hi - lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) pts[i] = lo + h * static_cast<double>(i);
  pts.back() = hi;
  return Grid(std::move(pts));
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Grid Grid::parse(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw DomainError("grid spec must be lo:hi:steps, got '" + std::string(spec) + "'");
  }
  const double lo = parse_double(spec.substr(0, c1));
  const double hi = parse_double(spec.substr(c1 + 1, c2 - c1 - 1));
  const double steps = parse_double(spec.substr(c2 + 1));
  if (!(steps >= 1.0) || steps != std::floor(steps)) {
    throw DomainError("grid steps must be a positive integer");
  }
  return linspace(lo, hi, static_cast<std::size_t>(steps));
}

void Grid::require_inside(const Interval& support, std::string_view what) const {
  for (double z : points_) {
    if (!support.contains(z)) {
      throw DomainError(std::string(what) + ": grid point " + std::to_string(z) +
                        " outside the parameter space");
    }
  }
}

std::string_view to_string(CurveMethod method) noexcept {
  switch (method) {
    case CurveMethod::refined: return "refined";
    case CurveMethod::normal: return "normal";
    case CurveMethod::edgeworth: return "edgeworth";
    case CurveMethod::exact_exponential: return "exact";
    case CurveMethod::empirical: return "empirical";
    case CurveMethod::wlb_exact: return "wlb_exact";
    case CurveMethod::wlb_normal: return "wlb_approx";
    case CurveMethod::wlb_fisher: return "wlb_fisher";
    case CurveMethod::wlb_oracle: return "wlb_oracle";
  }
  return "unknown";
}

std::vector<double> empirical_cdf(std::span<const double> sample, const Grid& grid) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(grid.size());
  const double inv = sorted.empty() ? 0.0 : 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[i]);
    out[i] = static_cast<double>(it - sorted.begin()) * inv;
  }
  return out;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("sup_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double trapezoid(const Grid& grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw DomainError("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return s;
}

}  // namespace mledist
