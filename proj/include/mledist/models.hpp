#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mledist/numerics.hpp"
#include "mledist/rng.hpp"

namespace mledist {

/// D(z, theta*) = E[l'(X; z)], V(z, theta*) = E[l'(X; z)^2] under f(.; theta*).
struct MomentPair {
  double d = 0.0;
  double v = 0.0;
  /// V - D^2; closed forms supply it directly to avoid cancellation.
  double variance = 0.0;
};

/// z-partials of D and V at z = theta*.
struct MomentPartials {
  double dD_dz = 0.0;
  double d2D_dz2 = 0.0;
  double dV_dz = 0.0;
};

/// Exponential family c(x) exp{t(x) theta - b(theta)}.
struct ExponentialFamilySpec {
  std::string name;
  Interval param_support;
  Interval data_support;
  std::function<double(double)> t;
  std::function<double(double)> log_c;
  std::function<double(double)> b;
  std::function<double(double)> db;
  std::function<double(double)> d2b;
  std::function<double(double)> d3b;
  /// Optional exact sampler.
  std::function<double(double theta, RngStream&)> sampler;
  /// Compact sub-interval of the parameter space for randomized checks.
  Interval test_range{0.5, 2.0};
};

/// Optional closed forms a model may carry.
struct ClosedForms {
  std::function<double(std::span<const double>)> mle;
  std::function<double(double)> fisher_info;
  std::function<MomentPair(double z, double theta_star)> moments;
  std::function<MomentPartials(double theta_star)> partials;
};

/// Scalar-parameter family with l(x; theta) = -log f(x; theta) strictly
/// convex in theta for every x. Immutable once built.
class Model {
 public:
  using Loss = std::function<double(double x, double theta)>;
  using Sampler = std::function<double(double theta, RngStream&)>;

  Model(std::string id, Interval param_support, Interval data_support, Loss loss,
        Loss score, Sampler sampler, double typical_theta, Interval test_range);

  const std::string& id() const noexcept { return id_; }
  const Interval& param_support() const noexcept { return param_support_; }
  const Interval& data_support() const noexcept { return data_support_; }
  /// Starting point for root searches when no closed-form MLE exists.
  double typical_theta() const noexcept { return typical_theta_; }
  /// Compact sub-interval of the parameter space for randomized checks.
  const Interval& test_range() const noexcept { return test_range_; }

  /// l(x; theta). Throws DomainError outside the supports.
  double loss(double x, double theta) const;
  /// l'(x; theta) = dl/dtheta. Throws DomainError outside the supports.
  double score(double x, double theta) const;
  /// f(x; theta) = exp(-l(x; theta)).
  double density(double x, double theta) const;
  double sample(double theta, RngStream& rng) const;

  /// Unchecked variants for inner loops over validated inputs.
  double score_unchecked(double x, double theta) const { return score_(x, theta); }
  double loss_unchecked(double x, double theta) const { return loss_(x, theta); }

  void check_param(double theta) const;
  void check_datum(double x) const;

  const ClosedForms& closed() const noexcept { return closed_; }
  const std::optional<ExponentialFamilySpec>& expfam() const noexcept { return expfam_; }

  Model with_closed_forms(ClosedForms forms) const;
  Model with_expfam(ExponentialFamilySpec spec) const;
  Model with_id(std::string id) const;

 private:
  std::string id_;
  Interval param_support_;
  Interval data_support_;
  Loss loss_;
  Loss score_;
  Sampler sampler_;
  double typical_theta_;
  Interval test_range_;
  ClosedForms closed_;
  std::optional<ExponentialFamilySpec> expfam_;
};

/// f(x; theta) = theta exp(-x theta), x > 0, theta > 0.
Model model_exponential();
/// f(x; theta) = theta x^(theta-1), 0 < x < 1, theta > 0.
Model model_power();
/// Fisk (log-logistic) f(x; theta) = theta x^(theta-1) / (1 + x^theta)^2.
Model model_fisk();
/// Skew normal f(x; theta) = 2 phi(x) Phi(theta x), theta real.
Model model_skew_normal();
/// f(x; theta) = exp(theta - x e^theta), x > 0, theta real.
Model model_gumbel_rate();
/// Generic exponential-family model with closed-form D, V, partials and
/// Fisher information. Throws ModelError if b'' <= 0 at a probed point.
Model model_from_expfam(ExponentialFamilySpec spec);

ExponentialFamilySpec expfam_exponential();
ExponentialFamilySpec expfam_power();
/// N(theta, 1): t(x) = x, b(theta) = theta^2 / 2.
ExponentialFamilySpec expfam_normal_mean();

/// Resolves CLI ids: exponential, power, fisk, skew_normal, gumbel_rate,
/// expfam:<exponential|power|normal_mean>.
Model model_by_id(std::string_view id);
std::vector<std::string> model_ids();

struct ConvexityWitness {
  double x;
  double theta;
  double theta_prime;
  std::string violated;
};

struct ConvexityReport {
  bool passed = true;
  std::size_t trials = 0;
  std::optional<ConvexityWitness> witness;
};

/// Randomized check of the supporting-line inequality
/// l(x; t) >= l(x; t') + (t - t') l'(x; t') and of monotonicity of l' in theta,
/// on x drawn from the model and (t, t') uniform on its test range.
ConvexityReport check_convexity(const Model& model, RngStream& rng, std::size_t trials);

}  // namespace mledist
