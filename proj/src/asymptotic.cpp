#include "mledist/asymptotic.hpp"

#include <cmath>
#include <limits>

#include "mledist/error.hpp"
#include "mledist/mle.hpp"

namespace mledist {

namespace {

PivotMoments mean_and_variance(const std::vector<double>& v) {
  PivotMoments m;
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(v.size() - 1);
  }
  return m;
}

}  // namespace

CdfCurve refined_cdf(const MomentEvaluator& evaluator, std::size_t n, const Grid& grid) {
  if (n == 0) throw DomainError("refined_cdf: n must be >= 1");
  const Model& model = evaluator.model();
  grid.require_inside(model.param_support(), "refined_cdf");

  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::refined;
  curve.meta = {model.id(), n, evaluator.theta_star(), evaluator.method().to_string(),
                evaluator.method().seed};
  curve.values.resize(grid.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ScoreMoments m = evaluator.at(grid[i]);
    if (m.variance_clamped) ++clamped;
    const double arg = root_n * m.d / std::sqrt(m.variance);
    if (std::abs(arg) > kSaturationArgument) {
      curve.values[i] = arg > 0.0 ? 1.0 : 0.0;
      ++curve.saturated;
    } else {
      curve.values[i] = std_normal_cdf(arg);
    }
  }
  if (clamped > 0) {
    curve.warnings.push_back(std::to_string(clamped) +
                             " grid points had V - D^2 clamped to 1e-12");
  }
  // D / sqrt(V - D^2) need not increase in z even though D does.
  std::size_t decreasing = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (curve.values[i] < curve.values[i - 1] - 1e-9) ++decreasing;
  }
  if (decreasing > 0) {
    curve.warnings.push_back("curve decreases at " + std::to_string(decreasing) +
                             " grid points; not a distribution function there");
  }
  return curve;
}

CdfCurve refined_cdf(const Model& model, double theta_star, std::size_t n, const Grid& grid,
                     MomentMethod moments) {
  return refined_cdf(MomentEvaluator(model, theta_star, moments), n, grid);
}

CdfCurve normal_cdf_approx(const Model& model, double theta_star, std::size_t n,
                           const Grid& grid, MomentMethod moments) {
  if (n == 0) throw DomainError("normal_cdf_approx: n must be >= 1");
  grid.require_inside(model.param_support(), "normal_cdf_approx");
  const double scale = std::sqrt(static_cast<double>(n) * fisher_info(model, theta_star, moments));
  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::normal;
  curve.meta = {model.id(), n, theta_star, moments.to_string(), moments.seed};
  curve.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    curve.values[i] = std_normal_cdf((grid[i] - theta_star) * scale);
  }
  return curve;
}

CdfCurve exact_exponential_cdf(double theta_star, std::size_t n, const Grid& grid) {
  if (n == 0) throw DomainError("exact_exponential_cdf: n must be >= 1");
  if (!(theta_star > 0.0)) throw DomainError("exact_exponential_cdf: theta* must be positive");
  if (!grid.empty() && !(grid.front() > 0.0)) {
    throw DomainError("exact_exponential_cdf: grid points must be positive");
  }
  const double shape = static_cast<double>(n);
  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::exact_exponential;
  curve.meta = {"exponential", n, theta_star, "", 0};
  curve.values.resize(grid.size());
  // 1 - Gamma_n(n theta* / z), computed as the upper tail.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    curve.values[i] = regularized_gamma_upper(shape, shape * theta_star / grid[i]);
  }
  return curve;
}

double edgeworth_coefficient(const MomentPartials& partials, double v_at_star) {
  if (!(v_at_star > 0.0)) throw ModelError("edgeworth_coefficient: V(theta*, theta*) <= 0");
  return partials.d2D_dz2 * std::pow(v_at_star, -1.5) - partials.dV_dz / v_at_star;
}

EdgeworthCurve edgeworth_cdf(const Model& model, double theta_star, std::size_t n,
                             const Grid& x_grid, MomentMethod moments, PartialsRoute route) {
  if (n == 0) throw DomainError("edgeworth_cdf: n must be >= 1");
  const PartialsResult pr = moment_partials(model, theta_star, moments, route);
  EdgeworthCurve out;
  out.c = edgeworth_coefficient(pr.partials, pr.v_at_star);
  out.fisher = pr.v_at_star;

  CdfCurve& curve = out.standardized;
  curve.grid = x_grid;
  curve.method = CurveMethod::edgeworth;
  curve.meta = {model.id(), n, theta_star, moments.to_string(), moments.seed};
  curve.warnings = pr.warnings;
  curve.values.resize(x_grid.size());
  out.theta_scale.resize(x_grid.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  const double to_theta = 1.0 / std::sqrt(static_cast<double>(n) * out.fisher);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    double v = std_normal_cdf(x) + 0.5 * out.c * std_normal_pdf(x) * x * x / root_n;
    if (v < 0.0 || v > 1.0) {
      v = v < 0.0 ? 0.0 : 1.0;
      ++curve.saturated;
    }
    curve.values[i] = v;
    out.theta_scale[i] = theta_star + x * to_theta;
  }
  if (curve.saturated > 0) {
    curve.warnings.push_back(std::to_string(curve.saturated) +
                             " expansion values overshot [0, 1] and were clipped");
  }
  return out;
}

Grid standardize_grid(const Grid& z_grid, double theta_star, std::size_t n, double fisher) {
  const double scale = std::sqrt(static_cast<double>(n) * fisher);
  std::vector<double> x(z_grid.size());
  for (std::size_t i = 0; i < z_grid.size(); ++i) x[i] = (z_grid[i] - theta_star) * scale;
  return Grid(std::move(x));
}

DensityCurve cdf_to_density(const Grid& grid, std::span<const double> cdf) {
  if (grid.size() != cdf.size()) throw DomainError("cdf_to_density: size mismatch");
  DensityCurve out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  const std::size_t m = grid.size();
  if (m < 2) return out;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == m ? m - 1 : i + 1;
    const double d = (cdf[hi] - cdf[lo]) / (grid[hi] - grid[lo]);
    out.values[i] = d > 0.0 ? d : 0.0;
  }
  return out;
}

DensityCurve cdf_to_density(const CdfCurve& curve) {
  return cdf_to_density(curve.grid, curve.values);
}

PivotStudy pivot_study(std::size_t n, std::size_t reps, std::uint64_t seed) {
  if (reps < 2) throw DomainError("pivot_study: reps must be >= 2");
  if (n == 0) throw DomainError("pivot_study: n must be >= 1");
  const Model model = model_skew_normal();
  const double hazard0 = std_normal_pdf(0.0) / 0.5;
  const double info0 = hazard0 * hazard0;
  const double root_n = std::sqrt(static_cast<double>(n));

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<PivotSample> samples(reps, PivotSample{nan, nan});
  parallel_for(reps, [&](std::size_t r) {
    RngStream rng(seed, r);
    std::vector<double> x(n);
    for (auto& v : x) v = model.sample(0.0, rng);
    double theta_hat = 0.0;
    try {
      theta_hat = solve_mle(model, Dataset(std::move(x)));
    } catch (const NoRootError&) {
      return;
    }
    ScoreMoments m;
    try {
      m = score_moments(model, theta_hat, 0.0, MomentMethod::quadrature());
    } catch (const AccuracyError&) {
      m = score_moments(model, theta_hat, 0.0,
                        MomentMethod::monte_carlo(1'000'000, derive_seed(seed, r)));
    }
    samples[r] = {root_n * m.d / std::sqrt(m.variance), root_n * theta_hat * std::sqrt(info0)};
  });

  PivotStudy study;
  study.n = n;
  std::vector<double> t, tn;
  for (const auto& s : samples) {
    if (std::isnan(s.t_refined)) {
      ++study.failures;
      continue;
    }
    study.samples.push_back(s);
    t.push_back(s.t_refined);
    tn.push_back(s.t_normal);
  }
  study.refined = mean_and_variance(t);
  study.normal = mean_and_variance(tn);
  return study;
}

}  // namespace mledist
