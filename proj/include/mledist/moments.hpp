#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mledist/models.hpp"

namespace mledist {

/// How D and V are evaluated.
///
/// `closed` uses the model's closed forms and falls back to quadrature when
/// the model has none; the method recorded in ScoreMoments says which ran.
struct MomentMethod {
  enum class Kind { closed, quadrature, monte_carlo };

  Kind kind = Kind::closed;
  std::size_t draws = 1'000'000;
  std::uint64_t seed = 0;

  static MomentMethod closed_form() { return {}; }
  static MomentMethod quadrature() { return {Kind::quadrature, 0, 0}; }
  static MomentMethod monte_carlo(std::size_t draws, std::uint64_t seed) {
    return {Kind::monte_carlo, draws, seed};
  }
  /// "closed" | "quad" | "mc:<draws>"; the MC seed is supplied separately.
  static MomentMethod parse(std::string_view text, std::uint64_t seed = 0);
  std::string to_string() const;
};

struct ScoreMoments {
  double d = 0.0;
  double v = 0.0;
  /// V - D^2, floored at 1e-12 when Monte Carlo noise drives it negative.
  double variance = 0.0;
  MomentMethod method;
  /// Monte Carlo standard errors of D and V.
  std::optional<double> se_d;
  std::optional<double> se_v;
  /// Set when V - D^2 was clamped.
  bool variance_clamped = false;
};

/// Evaluates D(z, theta*) and V(z, theta*) for a fixed (model, theta*).
///
/// Monte Carlo draws from f(.; theta*) are generated once from stream
/// (seed, 0) and reused for every z, so curves built from it are smooth in z.
class MomentEvaluator {
 public:
  MomentEvaluator(const Model& model, double theta_star, MomentMethod method);

  ScoreMoments at(double z) const;

  const Model& model() const noexcept { return model_; }
  double theta_star() const noexcept { return theta_star_; }
  const MomentMethod& method() const noexcept { return method_; }
  /// The method that actually runs (closed falls back to quadrature).
  MomentMethod::Kind effective_kind() const noexcept { return effective_; }

 private:
  ScoreMoments quadrature_at(double z) const;
  ScoreMoments monte_carlo_at(double z) const;

  Model model_;
  double theta_star_;
  MomentMethod method_;
  MomentMethod::Kind effective_;
  std::vector<double> draws_;
};

/// One-shot D, V evaluation. Throws DomainError if z or theta* is outside
/// the parameter space, and rejects Monte Carlo with fewer than 100 draws.
ScoreMoments score_moments(const Model& model, double z, double theta_star,
                           MomentMethod method = {});

enum class PartialsRoute { automatic, finite_difference };

struct PartialsResult {
  MomentPartials partials;
  /// V(theta*, theta*), needed alongside the partials.
  double v_at_star = 0.0;
  bool finite_difference = false;
  std::vector<std::string> warnings;
};

/// dD/dz, d2D/dz2, dV/dz at z = theta*. `automatic` uses closed forms when
/// the model has them; otherwise central differences over z -> D, V with steps
/// scaled by I(theta*)^(-1/2).
PartialsResult moment_partials(const Model& model, double theta_star,
                               MomentMethod method = {},
                               PartialsRoute route = PartialsRoute::automatic);

/// I(theta) = V(theta, theta). Throws ModelError when not positive.
double fisher_info(const Model& model, double theta, MomentMethod method = {});

}  // namespace mledist
