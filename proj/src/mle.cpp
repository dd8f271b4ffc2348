#include "mledist/mle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mledist/error.hpp"

namespace mledist {

Dataset::Dataset(std::vector<double> observations) : x_(std::move(observations)) {
  if (x_.empty()) throw DomainError("Dataset: need at least one observation");
  for (double v : x_) {
    if (!std::isfinite(v)) throw DomainError("Dataset: non-finite observation");
  }
}

void Dataset::validate(const Model& model) const {
  for (double v : x_) model.check_datum(v);
}

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
  bool any_positive = false;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("WeightVector: weights must be finite and nonnegative");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw DomainError("WeightVector: need a positive weight");
}

double mean_score(const Model& model, std::span<const double> data, double theta) {
  double s = 0.0;
  for (double x : data) s += model.score_unchecked(x, theta);
  return s / static_cast<double>(data.size());
}

namespace {

RootOptions root_options_for(const Model& model) {
  RootOptions opts;
  opts.support = model.param_support();
  return opts;
}

}  // namespace

double solve_mle(const Model& model, const Dataset& data) {
  data.validate(model);
  const auto x = data.values();
  if (model.closed().mle) {
    const double theta = model.closed().mle(x);
    if (!std::isfinite(theta) || !model.param_support().contains(theta)) {
      throw NoRootError(model.id() + ": closed-form MLE outside the parameter space", 0.0, 0.0);
    }
    const double residual = mean_score(model, x, theta);
    double magnitude = 0.0;
    for (double v : x) magnitude += std::abs(model.score_unchecked(v, theta));
    magnitude /= static_cast<double>(x.size());
    if (!(std::abs(residual) <= 1e-8 * (1.0 + magnitude))) {
      throw ModelError(model.id() + ": closed-form MLE has score residual " +
                       std::to_string(residual));
    }
    return theta;
  }
  return find_root_monotone([&](double th) { return mean_score(model, x, th); },
                            model.typical_theta(), root_options_for(model));
}

double solve_weighted_mle(const Model& model, const Dataset& data, const WeightVector& w,
                          std::optional<double> hint) {
  if (w.size() != data.size()) throw DomainError("solve_weighted_mle: weight length != n");
  data.validate(model);
  const auto x = data.values();
  const auto wv = w.values();
  double total = 0.0;
  for (double v : wv) total += v;
  auto score = [&](double th) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (wv[i] != 0.0) s += wv[i] * model.score_unchecked(x[i], th);
    }
    return s / total;
  };
  return find_root_monotone(score, hint.value_or(model.typical_theta()),
                            root_options_for(model));
}

Grid quantile_grid(std::span<const double> sorted, std::size_t points, double lo_q,
                   double hi_q) {
  if (sorted.empty()) throw DomainError("quantile_grid: empty sample");
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
  };
  double lo = quantile(lo_q);
  double hi = quantile(hi_q);
  if (!(hi > lo)) {
    const double pad = 0.05 * std::max(std::abs(lo), 1.0);
    lo -= pad;
    hi += pad;
  }
  return Grid::linspace(lo, hi, points);
}

EmpiricalMleDistribution empirical_mle_distribution(const Model& model, double theta_star,
                                                    std::size_t n, std::size_t reps,
                                                    std::uint64_t seed,
                                                    std::optional<Grid> grid) {
  if (reps == 0) throw DomainError("empirical_mle_distribution: reps must be >= 1");
  if (n == 0) throw DomainError("empirical_mle_distribution: n must be >= 1");
  model.check_param(theta_star);

  std::vector<double> fits(reps, std::numeric_limits<double>::quiet_NaN());
  parallel_for(reps, [&](std::size_t r) {
    RngStream rng(seed, r);
    std::vector<double> x(n);
    for (auto& v : x) v = model.sample(theta_star, rng);
    try {
      fits[r] = solve_mle(model, Dataset(std::move(x)));
    } catch (const NoRootError&) {
      // Counted below.
    }
  });

  EmpiricalMleDistribution out;
  for (double f : fits) {
    if (std::isnan(f)) {
      ++out.failures;
    } else {
      out.estimates.push_back(f);
    }
  }
  if (out.estimates.empty()) {
    throw NoRootError(model.id() + ": no replicate produced an interior MLE", 0.0, 0.0);
  }
  std::sort(out.estimates.begin(), out.estimates.end());
  out.curve.grid = grid ? std::move(*grid) : quantile_grid(out.estimates);
  out.curve.values = empirical_cdf(out.estimates, out.curve.grid);
  out.curve.method = CurveMethod::empirical;
  out.curve.meta = {model.id(), n, theta_star, "", seed};
  if (out.failures > 0) {
    out.curve.warnings.push_back(std::to_string(out.failures) +
                                 " replicates without an interior MLE were dropped");
  }
  return out;
}

double parametric_bootstrap_sample(const Model& model, double theta_hat, std::size_t n,
                                   RngStream& rng) {
  if (n == 0) throw DomainError("parametric_bootstrap_sample: n must be >= 1");
  model.check_param(theta_hat);
  std::vector<double> x(n);
  for (auto& v : x) v = model.sample(theta_hat, rng);
  return solve_mle(model, Dataset(std::move(x)));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mledist
