#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mledist/grid.hpp"
#include "mledist/mle.hpp"
#include "mledist/models.hpp"
#include "mledist/moments.hpp"

namespace mledist {

/// Scores gamma_i(z) = l'(x_i; z) split by sign, with rates 1/|gamma_i|.
struct WlbPartition {
  double z = 0.0;
  std::vector<double> gammas;
  std::vector<std::size_t> pos_idx;
  std::vector<std::size_t> neg_idx;
  std::vector<std::size_t> zero_idx;
  /// Rates of the positive block, in pos_idx order (after perturbation).
  std::vector<double> pos_rates;
  /// Rates of the negative block, in neg_idx order (after perturbation).
  std::vector<double> neg_rates;
  /// Number of rates moved to separate near-duplicates.
  std::size_t perturbed = 0;

  std::size_t m() const noexcept { return pos_idx.size(); }
};

inline constexpr double kWlbZeroTol = 1e-12;
inline constexpr double kWlbDuplicateGap = 1e-9;
inline constexpr double kWlbPerturbation = 1e-8;

/// Throws DomainError if z is outside the parameter space and DomainError if
/// every gamma_i is zero.
WlbPartition partition_scores(const Model& model, const Dataset& data, double z);

/// Rates whose relative gap to the previous (sorted) rate is below
/// kWlbDuplicateGap are moved to previous*(1 + kWlbPerturbation). Returns the
/// number of rates moved; order of the input is preserved.
std::size_t separate_rates(std::vector<double>& rates);

/// Coefficients q_i = prod_{k != i} 1 / (lambda_k - lambda_i) as sign and log|q_i|.
struct HypoexpCoeffs {
  std::vector<int> sign;
  std::vector<double> log_abs;
  /// sum log lambda_i.
  double log_rate_product = 0.0;
};

/// Throws DomainError on non-positive or duplicate rates.
HypoexpCoeffs hypoexp_coefficients(std::span<const double> rates);

/// Density of sum v_i / lambda_i for independent standard exponentials v_i.
/// Partial fractions when their rounding bound is within 1e-12 of the value,
/// otherwise uniformization (a Poisson mixture of nonnegative terms).
double hypoexp_density(std::span<const double> rates, double t);

/// P(S1 >= S2) for independent hypoexponentials with the given rates:
/// (prod lambda) sum_l sum_j q1_l q2_j / (lambda_l (lambda_l + lambda_j)).
/// When that sum cancels badly, the equivalent single sum over the better
/// conditioned side is used. Values within 1e-6 outside [0, 1] are clipped;
/// beyond that, or with a rounding bound above 1e-6, StabilityError.
double hypoexp_exceedance(std::span<const double> pos_rates,
                          std::span<const double> neg_rates);

/// Exact WLB distribution P(theta_w <= z) on the grid.
CdfCurve wlb_exact_cdf(const Model& model, const Dataset& data, const Grid& grid);

/// Exact WLB probability at a single point.
double wlb_exact_at(const Model& model, const Dataset& data, double z);

struct OracleEstimate {
  double p = 0.0;
  double se = 0.0;
};

/// Monte Carlo estimate of P(sum v_i gamma_i(z) >= 0), v_i ~ Exp(1).
OracleEstimate wlb_mc_oracle(const Model& model, const Dataset& data, double z,
                             std::size_t draws, RngStream& rng);

/// Grid version. One set of weight vectors is drawn and reused at every grid
/// point, so each estimate is individually unbiased with binomial error.
std::vector<OracleEstimate> wlb_mc_oracle_grid(const Model& model, const Dataset& data,
                                               const Grid& grid, std::size_t draws,
                                               RngStream& rng);

/// One WLB draw: v_i ~ Exp(1), root of sum v_i l'(x_i; theta).
double wlb_sample(const Model& model, const Dataset& data, RngStream& rng,
                  std::optional<double> hint = std::nullopt);

/// `draws` WLB draws, draw k using RngStream(seed, k).
std::vector<double> wlb_samples(const Model& model, const Dataset& data, std::size_t draws,
                                std::uint64_t seed);

/// Phi(sum gamma_i(z) / sqrt(sum gamma_i(z)^2)).
CdfCurve wlb_normal_approx(const Model& model, const Dataset& data, const Grid& grid);

/// Phi(sqrt(n) (z - theta_hat) sqrt(I(z))).
CdfCurve wlb_fisher_approx(const Model& model, const Dataset& data, const Grid& grid,
                           MomentMethod moments = {});

/// Solves sqrt(n) (theta - theta_hat) sqrt(I(theta)) = zeta.
double probability_matching_solve(const Model& model, std::size_t n, double theta_hat,
                                  double zeta, MomentMethod moments = {});

/// Draws zeta ~ N(0, 1) and solves the matching equation.
double probability_matching_sample(const Model& model, const Dataset& data, RngStream& rng,
                                   MomentMethod moments = {});

/// `draws` matching draws, draw k using RngStream(seed, k).
std::vector<double> probability_matching_samples(const Model& model, const Dataset& data,
                                                 std::size_t draws, std::uint64_t seed,
                                                 MomentMethod moments = {});

/// Gamma(shape n, rate sum x_i) density: the exponential-model posterior
/// under the prior proportional to 1/theta.
DensityCurve jeffreys_posterior_exponential(const Dataset& data, const Grid& grid);

}  // namespace mledist
