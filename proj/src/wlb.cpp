#include "mledist/wlb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mledist/error.hpp"
#include "mledist/simd/kernels.hpp"

namespace mledist {

std::size_t separate_rates(std::vector<double>& rates) {
  if (rates.size() < 2) return 0;
  std::vector<std::size_t> order(rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rates[a] < rates[b]; });
  std::size_t moved = 0;
  double prev = rates[order[0]];
  for (std::size_t k = 1; k < order.size(); ++k) {
    double& r = rates[order[k]];
    if (r - prev < kWlbDuplicateGap * prev) {
      r = prev * (1.0 + kWlbPerturbation);
      ++moved;
    }
    prev = r;
  }
  return moved;
}

WlbPartition partition_scores(const Model& model, const Dataset& data, double z) {
  model.check_param(z);
  data.validate(model);
  WlbPartition p;
  p.z = z;
  p.gammas.resize(data.size());
  double max_abs = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    p.gammas[i] = model.score_unchecked(data[i], z);
    if (!std::isfinite(p.gammas[i])) {
      throw DomainError("partition_scores: non-finite score at z = " + std::to_string(z));
    }
    max_abs = std::max(max_abs, std::abs(p.gammas[i]));
  }
  if (max_abs == 0.0) throw DomainError("partition_scores: every score is zero (degenerate)");
  const double zero_tol = kWlbZeroTol * max_abs;
  for (std::size_t i = 0; i < p.gammas.size(); ++i) {
    const double g = p.gammas[i];
    if (g > zero_tol) {
      p.pos_idx.push_back(i);
      p.pos_rates.push_back(1.0 / g);
    } else if (g < -zero_tol) {
      p.neg_idx.push_back(i);
      p.neg_rates.push_back(-1.0 / g);
    } else {
      p.zero_idx.push_back(i);
    }
  }
  p.perturbed = separate_rates(p.pos_rates) + separate_rates(p.neg_rates);
  return p;
}

HypoexpCoeffs hypoexp_coefficients(std::span<const double> rates) {
  HypoexpCoeffs c;
  c.sign.assign(rates.size(), 1);
  c.log_abs.assign(rates.size(), 0.0);
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("hypoexp: rates must be positive");
    c.log_rate_product += std::log(r);
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    for (std::size_t k = 0; k < rates.size(); ++k) {
      if (k == i) continue;
      const double d = rates[k] - rates[i];
      if (d == 0.0) throw DomainError("hypoexp: duplicate rates");
      if (d < 0.0) c.sign[i] = -c.sign[i];
      c.log_abs[i] -= std::log(std::abs(d));
    }
  }
  return c;
}

namespace {

constexpr double kTermUlps = 8.0;

// Uniformization of the phase chain 1 -> 2 -> ... -> m -> absorbed with
// Lambda = max rate: a Poisson mixture of nonnegative terms, free of the
// cancellation in the partial fractions.
double hypoexp_density_uniformized(std::span<const double> rates, double t) {
  const std::size_t m = rates.size();
  const double big = *std::max_element(rates.begin(), rates.end());
  const double mean = big * t;
  std::vector<double> p(m, 0.0), next(m);
  p[0] = 1.0;
  double sum = 0.0;
  const double log_mean = std::log(mean);
  for (std::size_t k = 0;; ++k) {
    if (k + 1 >= m) {
      const double log_pois = -mean + static_cast<double>(k) * log_mean - std::lgamma(k + 1.0);
      const double term = std::exp(log_pois) * p[m - 1];
      sum += term;
      if (static_cast<double>(k) > mean && term <= 1e-18 * sum) break;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double stay = 1.0 - rates[i] / big;
      next[i] = p[i] * stay + (i > 0 ? p[i - 1] * rates[i - 1] / big : 0.0);
    }
    p.swap(next);
  }
  return rates[m - 1] * sum;
}

}  // namespace

double hypoexp_density(std::span<const double> rates, double t) {
  if (rates.empty()) throw DomainError("hypoexp_density: no rates");
  if (!(t >= 0.0)) throw DomainError("hypoexp_density: t must be nonnegative");
  const HypoexpCoeffs c = hypoexp_coefficients(rates);
  if (t == 0.0) return rates.size() == 1 ? rates[0] : 0.0;
  CompensatedSum sum;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double term = c.sign[i] * std::exp(c.log_rate_product + c.log_abs[i] - rates[i] * t);
    sum.add(term);
    magnitude += std::abs(term);
  }
  const double value = sum.value();
  const double bound = magnitude * std::numeric_limits<double>::epsilon() *
                       (static_cast<double>(rates.size()) + kTermUlps);
  if (bound <= 1e-12 * std::abs(value)) return value;
  return hypoexp_density_uniformized(rates, t);
}

namespace {

struct Evaluation {
  double value;
  double error_bound;
  double magnitude;
};

Evaluation exceedance_double_sum(std::span<const double> pos_rates,
                                 std::span<const double> neg_rates) {
  const HypoexpCoeffs c1 = hypoexp_coefficients(pos_rates);
  const HypoexpCoeffs c2 = hypoexp_coefficients(neg_rates);
  const double log_prod = c1.log_rate_product + c2.log_rate_product;
  CompensatedSum sum;
  double magnitude = 0.0;
  for (std::size_t l = 0; l < pos_rates.size(); ++l) {
    const double lam_l = pos_rates[l];
    const double base = log_prod + c1.log_abs[l] - std::log(lam_l);
    for (std::size_t j = 0; j < neg_rates.size(); ++j) {
      const double term =
          c1.sign[l] * c2.sign[j] * std::exp(base + c2.log_abs[j] - std::log(lam_l + neg_rates[j]));
      sum.add(term);
      magnitude += std::abs(term);
    }
  }
  // Each term carries a few ulps of relative error from exp/log.
  const double bound = magnitude * std::numeric_limits<double>::epsilon() *
                       (static_cast<double>(pos_rates.size() + neg_rates.size()) + kTermUlps);
  return {sum.value(), bound, magnitude};
}

// P(S_a >= S_b) as E[survival of S_a at S_b]: only the coefficients of `a`
// enter, the Laplace factors prod mu / (mu + lambda) are all in (0, 1).
Evaluation exceedance_single_sum(std::span<const double> a, std::span<const double> b) {
  const HypoexpCoeffs c = hypoexp_coefficients(a);
  double log_b = 0.0;
  for (double mu : b) log_b += std::log(mu);
  CompensatedSum sum;
  double magnitude = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    double log_term = c.log_rate_product + c.log_abs[l] - std::log(a[l]) + log_b;
    for (double mu : b) log_term -= std::log(mu + a[l]);
    const double term = c.sign[l] * std::exp(log_term);
    sum.add(term);
    magnitude += std::abs(term);
  }
  const double bound = magnitude * std::numeric_limits<double>::epsilon() *
                       (static_cast<double>(a.size() + b.size()) + kTermUlps);
  return {sum.value(), bound, magnitude};
}

}  // namespace

double hypoexp_exceedance(std::span<const double> pos_rates,
                          std::span<const double> neg_rates) {
  if (pos_rates.empty()) return 0.0;
  if (neg_rates.empty()) return 1.0;
  Evaluation best = exceedance_double_sum(pos_rates, neg_rates);
  if (best.error_bound > 1e-9) {
    // Algebraically identical rearrangements that avoid the coefficients of
    // one side; keep whichever has the smallest rounding bound.
    const Evaluation a = exceedance_single_sum(pos_rates, neg_rates);
    Evaluation b = exceedance_single_sum(neg_rates, pos_rates);
    b.value = 1.0 - b.value;
    if (a.error_bound < best.error_bound) best = a;
    if (b.error_bound < best.error_bound) best = b;
  }
  if (best.value < -1e-6 || best.value > 1.0 + 1e-6 || best.error_bound > 1e-6) {
    std::ostringstream msg;
    msg << "hypoexp_exceedance: cancellation (value " << best.value << ", term magnitude "
        << best.magnitude << "); use the Monte Carlo oracle";
    throw StabilityError(msg.str());
  }
  return std::clamp(best.value, 0.0, 1.0);
}

double wlb_exact_at(const Model& model, const Dataset& data, double z) {
  const WlbPartition p = partition_scores(model, data, z);
  return hypoexp_exceedance(p.pos_rates, p.neg_rates);
}

CdfCurve wlb_exact_cdf(const Model& model, const Dataset& data, const Grid& grid) {
  grid.require_inside(model.param_support(), "wlb_exact_cdf");
  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::wlb_exact;
  curve.meta = {model.id(), data.size(), 0.0, "", 0};
  curve.values.resize(grid.size());
  std::size_t perturbed_points = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const WlbPartition p = partition_scores(model, data, grid[i]);
    if (p.perturbed > 0) ++perturbed_points;
    curve.values[i] = hypoexp_exceedance(p.pos_rates, p.neg_rates);
  }
  if (perturbed_points > 0) {
    curve.warnings.push_back(std::to_string(perturbed_points) +
                             " grid points needed near-duplicate rates separated");
  }
  return curve;
}

std::vector<OracleEstimate> wlb_mc_oracle_grid(const Model& model, const Dataset& data,
                                               const Grid& grid, std::size_t draws,
                                               RngStream& rng) {
  if (draws < 1000) throw DomainError("wlb_mc_oracle: need at least 1000 draws");
  grid.require_inside(model.param_support(), "wlb_mc_oracle");
  data.validate(model);
  const std::size_t n = data.size();
  std::vector<std::vector<double>> gammas(grid.size(), std::vector<double>(n));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) gammas[g][i] = model.score_unchecked(data[i], grid[g]);
  }

  constexpr std::size_t kChunk = 4096;
  std::vector<double> weights(kChunk * n);
  std::vector<std::size_t> counts(grid.size(), 0);
  for (std::size_t done = 0; done < draws;) {
    const std::size_t rows = std::min(kChunk, draws - done);
    // Weight vector r is drawn contiguously from the stream.
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < n; ++c) weights[c * rows + r] = rng.exponential();
    }
    const std::span<const double> block(weights.data(), rows * n);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      counts[g] += simd::count_nonneg_combinations(block, rows, gammas[g]);
    }
    done += rows;
  }

  std::vector<OracleEstimate> out(grid.size());
  const double total = static_cast<double>(draws);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double p = static_cast<double>(counts[g]) / total;
    out[g] = {p, std::sqrt(p * (1.0 - p) / total)};
  }
  return out;
}

OracleEstimate wlb_mc_oracle(const Model& model, const Dataset& data, double z,
                             std::size_t draws, RngStream& rng) {
  return wlb_mc_oracle_grid(model, data, Grid({z}), draws, rng).front();
}

double wlb_sample(const Model& model, const Dataset& data, RngStream& rng,
                  std::optional<double> hint) {
  std::vector<double> v(data.size());
  for (auto& w : v) w = rng.exponential();
  return solve_weighted_mle(model, data, WeightVector(std::move(v)), hint);
}

std::vector<double> wlb_samples(const Model& model, const Dataset& data, std::size_t draws,
                                std::uint64_t seed) {
  const double theta_hat = solve_mle(model, data);
  std::vector<double> out(draws);
  parallel_for(draws, [&](std::size_t k) {
    RngStream rng(seed, k);
    out[k] = wlb_sample(model, data, rng, theta_hat);
  });
  return out;
}

CdfCurve wlb_normal_approx(const Model& model, const Dataset& data, const Grid& grid) {
  grid.require_inside(model.param_support(), "wlb_normal_approx");
  data.validate(model);
  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::wlb_normal;
  curve.meta = {model.id(), data.size(), 0.0, "", 0};
  curve.values.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    double ss = 0.0;
    for (double x : data.values()) {
      const double gamma = model.score_unchecked(x, grid[g]);
      s += gamma;
      ss += gamma * gamma;
    }
    if (ss == 0.0) throw DomainError("wlb_normal_approx: every score is zero");
    curve.values[g] = std_normal_cdf(s / std::sqrt(ss));
  }
  return curve;
}

CdfCurve wlb_fisher_approx(const Model& model, const Dataset& data, const Grid& grid,
                           MomentMethod moments) {
  grid.require_inside(model.param_support(), "wlb_fisher_approx");
  const double theta_hat = solve_mle(model, data);
  const double root_n = std::sqrt(static_cast<double>(data.size()));
  CdfCurve curve;
  curve.grid = grid;
  curve.method = CurveMethod::wlb_fisher;
  curve.meta = {model.id(), data.size(), theta_hat, moments.to_string(), moments.seed};
  curve.values.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double z = grid[g];
    curve.values[g] = std_normal_cdf(root_n * (z - theta_hat) * std::sqrt(fisher_info(model, z, moments)));
  }
  return curve;
}

double probability_matching_solve(const Model& model, std::size_t n, double theta_hat,
                                  double zeta, MomentMethod moments) {
  model.check_param(theta_hat);
  if (!std::isfinite(zeta)) throw DomainError("probability_matching_solve: non-finite zeta");
  if (zeta == 0.0) return theta_hat;
  const double root_n = std::sqrt(static_cast<double>(n));
  auto pivot = [&](double th) {
    return root_n * (th - theta_hat) * std::sqrt(fisher_info(model, th, moments));
  };
  RootOptions opts;
  opts.support = model.param_support();
  opts.initial_step = 10.0 / std::sqrt(static_cast<double>(n) * fisher_info(model, theta_hat, moments));
  const double root = find_root_monotone([&](double th) { return pivot(th) - zeta; }, theta_hat, opts);

  // The pivot must increase between theta_hat and the root.
  const double lo = std::min(theta_hat, root);
  const double hi = std::max(theta_hat, root);
  constexpr int kChecks = 16;
  double prev = pivot(lo);
  for (int k = 1; k <= kChecks; ++k) {
    const double th = lo + (hi - lo) * k / kChecks;
    const double cur = pivot(th);
    if (cur < prev - 1e-12 * (1.0 + std::abs(prev))) {
      std::ostringstream msg;
      msg << "probability_matching_solve: pivot not monotone on [" << lo << ", " << hi << "]";
      throw ModelError(msg.str());
    }
    prev = cur;
  }
  return root;
}

double probability_matching_sample(const Model& model, const Dataset& data, RngStream& rng,
                                   MomentMethod moments) {
  const double theta_hat = solve_mle(model, data);
  return probability_matching_solve(model, data.size(), theta_hat, rng.normal(), moments);
}

std::vector<double> probability_matching_samples(const Model& model, const Dataset& data,
                                                 std::size_t draws, std::uint64_t seed,
                                                 MomentMethod moments) {
  const double theta_hat = solve_mle(model, data);
  std::vector<double> out(draws);
  parallel_for(draws, [&](std::size_t k) {
    RngStream rng(seed, k);
    out[k] = probability_matching_solve(model, data.size(), theta_hat, rng.normal(), moments);
  });
  return out;
}

DensityCurve jeffreys_posterior_exponential(const Dataset& data, const Grid& grid) {
  double rate = 0.0;
  for (double x : data.values()) {
    if (!(x > 0.0)) throw DomainError("jeffreys_posterior_exponential: data must be positive");
    rate += x;
  }
  const double shape = static_cast<double>(data.size());
  const double log_norm = shape * std::log(rate) - std::lgamma(shape);
  DensityCurve out;
  out.grid = grid;
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double th = grid[i];
    out.values[i] = th > 0.0 ? std::exp(log_norm + (shape - 1.0) * std::log(th) - rate * th) : 0.0;
  }
  return out;
}

}  // namespace mledist
