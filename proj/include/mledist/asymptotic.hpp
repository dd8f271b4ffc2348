#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mledist/grid.hpp"
#include "mledist/models.hpp"
#include "mledist/moments.hpp"

namespace mledist {

/// |argument| of Phi beyond which the refined CDF is reported as exactly 0 or 1.
inline constexpr double kSaturationArgument = 8.3;

/// Phi(sqrt(n) D(z, theta*) / sqrt(V - D^2)) at every grid point.
///
/// With closed-form moments on an exponential family this is
/// Phi(sqrt(n) (b'(z) - b'(theta*)) / sqrt(b''(theta*))).
CdfCurve refined_cdf(const Model& model, double theta_star, std::size_t n, const Grid& grid,
                     MomentMethod moments = {});

/// Same, reusing an evaluator (shares Monte Carlo draws across calls).
CdfCurve refined_cdf(const MomentEvaluator& evaluator, std::size_t n, const Grid& grid);

/// Phi((z - theta*) sqrt(n I(theta*))).
CdfCurve normal_cdf_approx(const Model& model, double theta_star, std::size_t n,
                           const Grid& grid, MomentMethod moments = {});

/// Exact law of the exponential-model MLE: 1 - Gamma_n(n theta* / z).
CdfCurve exact_exponential_cdf(double theta_star, std::size_t n, const Grid& grid);

/// c = d2D/dz2 V^(-3/2) - dV/dz V^(-1), all at (theta*, theta*).
double edgeworth_coefficient(const MomentPartials& partials, double v_at_star);

struct EdgeworthCurve {
  /// On the standardized scale x: P(sqrt(n)(theta_hat - theta*) sqrt(I) <= x).
  CdfCurve standardized;
  /// The same values against z = theta* + x / sqrt(n I(theta*)).
  std::vector<double> theta_scale;
  double c = 0.0;
  double fisher = 0.0;
};

/// Phi(x) + c phi(x) x^2 / (2 sqrt(n)) on the standardized grid, clipped to [0, 1].
EdgeworthCurve edgeworth_cdf(const Model& model, double theta_star, std::size_t n,
                             const Grid& x_grid, MomentMethod moments = {},
                             PartialsRoute route = PartialsRoute::automatic);

/// Maps a theta-scale grid to the standardized scale used by edgeworth_cdf.
Grid standardize_grid(const Grid& z_grid, double theta_star, std::size_t n, double fisher);

/// Central differences inside, one-sided at the ends; negatives clipped to 0.
DensityCurve cdf_to_density(const CdfCurve& curve);
DensityCurve cdf_to_density(const Grid& grid, std::span<const double> cdf);

struct PivotSample {
  double t_refined;
  double t_normal;
};

struct PivotMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct PivotStudy {
  std::size_t n = 0;
  std::vector<PivotSample> samples;
  PivotMoments refined;
  PivotMoments normal;
  std::size_t failures = 0;
};

/// Skew-normal pivot comparison at theta = 0: for each replicate r, draws n
/// standard normals from RngStream(seed, r), fits theta_hat, and records
/// T_N = sqrt(n) theta_hat sqrt(I(0)) and
/// T = sqrt(n) D(theta_hat, 0) / sqrt(V(theta_hat, 0) - D^2) with D, V by
/// quadrature. Moments are (mean, sample variance).
PivotStudy pivot_study(std::size_t n, std::size_t reps, std::uint64_t seed);

}  // namespace mledist
