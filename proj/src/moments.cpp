#include "mledist/moments.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "mledist/error.hpp"
#include "mledist/simd/kernels.hpp"

namespace mledist {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr std::size_t kMinMcDraws = 100;

void finish_variance(ScoreMoments& m) {
  if (m.variance < kVarianceFloor) {
    m.variance = kVarianceFloor;
    m.variance_clamped = true;
  }
}

}  // namespace

MomentMethod MomentMethod::parse(std::string_view text, std::uint64_t seed) {
  if (text == "closed") return closed_form();
  if (text == "quad") return quadrature();
  if (text.starts_with("mc:")) {
    const auto digits = text.substr(3);
    std::size_t draws = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), draws);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw DomainError("bad Monte Carlo draw count in '" + std::string(text) + "'");
    }
    return monte_carlo(draws, seed);
  }
  throw DomainError("moment method must be closed|quad|mc:<draws>, got '" +
                    std::string(text) + "'");
}

std::string MomentMethod::to_string() const {
  switch (kind) {
    case Kind::closed: return "closed";
    case Kind::quadrature: return "quad";
    case Kind::monte_carlo: return "mc:" + std::to_string(draws);
  }
  return "unknown";
}

MomentEvaluator::MomentEvaluator(const Model& model, double theta_star, MomentMethod method)
    : model_(model), theta_star_(theta_star), method_(method), effective_(method.kind) {
  model_.check_param(theta_star_);
  if (effective_ == MomentMethod::Kind::closed && !model_.closed().moments) {
    effective_ = MomentMethod::Kind::quadrature;
  }
  if (effective_ == MomentMethod::Kind::monte_carlo) {
    if (method_.draws < kMinMcDraws) {
      throw DomainError("Monte Carlo moments need at least 100 draws");
    }
    RngStream rng(method_.seed, 0);
    draws_.resize(method_.draws);
    for (auto& x : draws_) x = model_.sample(theta_star_, rng);
  }
}

ScoreMoments MomentEvaluator::at(double z) const {
  model_.check_param(z);
  switch (effective_) {
    case MomentMethod::Kind::closed: {
      const MomentPair p = model_.closed().moments(z, theta_star_);
      ScoreMoments m;
      m.d = p.d;
      m.v = p.v;
      m.variance = p.variance;
      m.method = MomentMethod::closed_form();
      finish_variance(m);
      return m;
    }
    case MomentMethod::Kind::quadrature:
      return quadrature_at(z);
    case MomentMethod::Kind::monte_carlo:
      return monte_carlo_at(z);
  }
  throw DomainError("unknown moment method");
}

ScoreMoments MomentEvaluator::quadrature_at(double z) const {
  const Model& model = model_;
  const double ts = theta_star_;
  // l'(x; z)^k f(x; theta*); the density vanishing wins over a diverging score.
  auto integrand = [&model, ts, z](double x, int power) {
    const double f = std::exp(-model.loss_unchecked(x, ts));
    if (f == 0.0 || !std::isfinite(f)) return 0.0;
    const double g = model.score_unchecked(x, z);
    const double v = power == 1 ? g * f : g * g * f;
    return std::isfinite(v) ? v : 0.0;
  };
  const Interval& support = model.data_support();
  QuadratureOptions opts;
  opts.abs_tol = 1e-9;
  ScoreMoments m;
  const double inf = std::numeric_limits<double>::infinity();
  // Positive supports are integrated in u = log x, which turns heavy
  // polynomial tails into exponential ones.
  auto moment = [&](int power) {
    if (support.lo == 0.0 && support.hi == inf) {
      return integrate_1d(
          [&](double u) {
            const double x = std::exp(u);
            return x > 0.0 && std::isfinite(x) ? integrand(x, power) * x : 0.0;
          },
          -inf, inf, opts);
    }
    if (support.lo == 0.0 && support.hi == 1.0) {
      return integrate_1d(
          [&](double u) {
            const double x = std::exp(-u);
            return x > 0.0 && x < 1.0 ? integrand(x, power) * x : 0.0;
          },
          0.0, inf, opts);
    }
    auto g = [&](double x) { return integrand(x, power); };
    if (support.lo == -inf && support.hi == inf) {
      // Two half lines keep the mapped integrand smooth near the origin.
      return integrate_1d(g, -inf, 0.0, opts) + integrate_1d(g, 0.0, inf, opts);
    }
    return integrate_1d(g, support.lo, support.hi, opts);
  };
  m.d = moment(1);
  m.v = moment(2);
  m.variance = m.v - m.d * m.d;
  m.method = MomentMethod::quadrature();
  finish_variance(m);
  return m;
}

ScoreMoments MomentEvaluator::monte_carlo_at(double z) const {
  std::vector<double> scores(draws_.size());
  for (std::size_t i = 0; i < draws_.size(); ++i) {
    scores[i] = model_.score_unchecked(draws_[i], z);
  }
  const simd::PowerSums s = simd::power_sums(scores);
  const double n = static_cast<double>(draws_.size());
  ScoreMoments m;
  m.d = s.sum / n;
  m.v = s.sum_sq / n;
  m.variance = m.v - m.d * m.d;
  m.method = method_;
  m.se_d = std::sqrt(std::max(m.variance, 0.0) / n);
  m.se_v = std::sqrt(std::max(s.sum_quad / n - m.v * m.v, 0.0) / n);
  finish_variance(m);
  return m;
}

ScoreMoments score_moments(const Model& model, double z, double theta_star,
                           MomentMethod method) {
  model.check_param(z);
  return MomentEvaluator(model, theta_star, method).at(z);
}

PartialsResult moment_partials(const Model& model, double theta_star, MomentMethod method,
                               PartialsRoute route) {
  model.check_param(theta_star);
  PartialsResult out;
  const ClosedForms& closed = model.closed();
  if (route == PartialsRoute::automatic && method.kind == MomentMethod::Kind::closed &&
      closed.partials && closed.moments) {
    out.partials = closed.partials(theta_star);
    out.v_at_star = closed.moments(theta_star, theta_star).v;
    return out;
  }

  const MomentEvaluator eval(model, theta_star, method);
  const ScoreMoments at_star = eval.at(theta_star);
  out.v_at_star = at_star.v;
  out.finite_difference = true;
  if (!(at_star.v > 0.0)) throw ModelError(model.id() + ": V(theta*, theta*) not positive");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = 1.0 / std::sqrt(at_star.v);
  double h1 = scale * std::cbrt(eps);
  double h2 = scale * std::pow(eps, 0.25);
  const Interval& support = model.param_support();
  auto shrink = [&](double& h, const char* which) {
    int halvings = 0;
    while (!(support.contains(theta_star - 2.0 * h) && support.contains(theta_star + 2.0 * h))) {
      h *= 0.5;
      if (++halvings > 200) {
        throw ModelError(model.id() + ": finite-difference stencil cannot fit in the parameter space");
      }
    }
    if (halvings > 0) {
      out.warnings.push_back(std::string(which) + " step shrunk " + std::to_string(halvings) +
                             " times to stay inside the parameter space");
    }
  };
  shrink(h1, "first-order");
  shrink(h2, "second-order");

  const ScoreMoments p1 = eval.at(theta_star + h1);
  const ScoreMoments m1 = eval.at(theta_star - h1);
  const ScoreMoments p2 = eval.at(theta_star + h2);
  const ScoreMoments m2 = eval.at(theta_star - h2);
  out.partials.dD_dz = (p1.d - m1.d) / (2.0 * h1);
  out.partials.dV_dz = (p1.v - m1.v) / (2.0 * h1);
  out.partials.d2D_dz2 = (p2.d - 2.0 * at_star.d + m2.d) / (h2 * h2);
  return out;
}

double fisher_info(const Model& model, double theta, MomentMethod method) {
  model.check_param(theta);
  double info = 0.0;
  if (method.kind == MomentMethod::Kind::closed && model.closed().fisher_info) {
    info = model.closed().fisher_info(theta);
  } else {
    info = MomentEvaluator(model, theta, method).at(theta).v;
  }
  if (!(info > 0.0) || !std::isfinite(info)) {
    throw ModelError(model.id() + ": Fisher information not positive at theta = " +
                     std::to_string(theta));
  }
  return info;
}

}  // namespace mledist
