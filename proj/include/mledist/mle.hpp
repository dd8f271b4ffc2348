#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mledist/grid.hpp"
#include "mledist/models.hpp"

namespace mledist {

/// Observations x_1..x_n, n >= 1.
class Dataset {
 public:
  explicit Dataset(std::vector<double> observations);

  std::span<const double> values() const noexcept { return x_; }
  std::size_t size() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }

  /// Throws DomainError if any observation lies outside the model's data support.
  void validate(const Model& model) const;

 private:
  std::vector<double> x_;
};

/// Nonnegative weights with at least one positive entry.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);

  std::span<const double> values() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.size(); }

 private:
  std::vector<double> w_;
};

/// T_n(theta) = n^-1 sum l'(x_i; theta).
double mean_score(const Model& model, std::span<const double> data, double theta);

/// Root of the mean score. Uses the model's closed-form MLE when available and
/// verifies its score residual (ModelError if > 1e-8); otherwise bisects the
/// increasing mean score. Throws NoRootError when the score keeps one sign on
/// the parameter space.
double solve_mle(const Model& model, const Dataset& data);

/// Root of sum w_i l'(x_i; theta).
double solve_weighted_mle(const Model& model, const Dataset& data, const WeightVector& w,
                          std::optional<double> hint = std::nullopt);

struct EmpiricalMleDistribution {
  CdfCurve curve;
  /// Successful estimates, sorted.
  std::vector<double> estimates;
  /// Replicates without an interior MLE.
  std::size_t failures = 0;
};

/// Default grid: 201 equispaced points between the 0.001 and 0.999 empirical
/// quantiles of a sorted sample.
Grid quantile_grid(std::span<const double> sorted, std::size_t points = 201,
                   double lo_q = 0.001, double hi_q = 0.999);

/// Simulates `reps` datasets of size n from f(.; theta*), replicate r drawing
/// from RngStream(seed, r), and returns the empirical CDF of the fitted MLEs.
EmpiricalMleDistribution empirical_mle_distribution(const Model& model, double theta_star,
                                                    std::size_t n, std::size_t reps,
                                                    std::uint64_t seed,
                                                    std::optional<Grid> grid = std::nullopt);

/// Draws x~ of size n from f(.; theta_hat) and returns its MLE.
double parametric_bootstrap_sample(const Model& model, double theta_hat, std::size_t n,
                                   RngStream& rng);

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
/// Each index must write only its own output slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mledist
