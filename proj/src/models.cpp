#include "mledist/models.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mledist/error.hpp"

namespace mledist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

const Interval kPositive{0.0, kInf};
const Interval kReal{-kInf, kInf};
const Interval kUnit{0.0, 1.0};

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

}  // namespace

Model::Model(std::string id, Interval param_support, Interval data_support, Loss loss,
             Loss score, Sampler sampler, double typical_theta, Interval test_range)
    : id_(std::move(id)),
      param_support_(param_support),
      data_support_(data_support),
      loss_(std::move(loss)),
      score_(std::move(score)),
      sampler_(std::move(sampler)),
      typical_theta_(typical_theta),
      test_range_(test_range) {}

void Model::check_param(double theta) const {
  if (!std::isfinite(theta) || !param_support_.contains(theta)) {
    std::ostringstream msg;
    msg << id_ << ": parameter " << theta << " outside (" << param_support_.lo << ", "
        << param_support_.hi << ")";
    throw DomainError(msg.str());
  }
}

void Model::check_datum(double x) const {
  if (!std::isfinite(x) || !data_support_.contains(x)) {
    std::ostringstream msg;
    msg << id_ << ": observation " << x << " outside (" << data_support_.lo << ", "
        << data_support_.hi << ")";
    throw DomainError(msg.str());
  }
}

double Model::loss(double x, double theta) const {
  check_datum(x);
  check_param(theta);
  return loss_(x, theta);
}

double Model::score(double x, double theta) const {
  check_datum(x);
  check_param(theta);
  return score_(x, theta);
}

double Model::density(double x, double theta) const { return std::exp(-loss(x, theta)); }

double Model::sample(double theta, RngStream& rng) const {
  check_param(theta);
  if (!sampler_) throw ModelError(id_ + ": no sampler");
  return sampler_(theta, rng);
}

Model Model::with_closed_forms(ClosedForms forms) const {
  Model m = *this;
  m.closed_ = std::move(forms);
  return m;
}

Model Model::with_expfam(ExponentialFamilySpec spec) const {
  Model m = *this;
  m.expfam_ = std::move(spec);
  return m;
}

Model Model::with_id(std::string id) const {
  Model m = *this;
  m.id_ = std::move(id);
  return m;
}

ExponentialFamilySpec expfam_exponential() {
  ExponentialFamilySpec s;
  s.name = "exponential";
  s.param_support = kPositive;
  s.data_support = kPositive;
  s.t = [](double x) { return -x; };
  s.log_c = [](double) { return 0.0; };
  s.b = [](double th) { return -std::log(th); };
  s.db = [](double th) { return -1.0 / th; };
  s.d2b = [](double th) { return 1.0 / (th * th); };
  s.d3b = [](double th) { return -2.0 / (th * th * th); };
  s.sampler = [](double th, RngStream& rng) { return rng.exponential() / th; };
  s.test_range = {0.2, 5.0};
  return s;
}

ExponentialFamilySpec expfam_power() {
  ExponentialFamilySpec s;
  s.name = "power";
  s.param_support = kPositive;
  s.data_support = kUnit;
  s.t = [](double x) { return std::log(x); };
  s.log_c = [](double x) { return -std::log(x); };
  s.b = [](double th) { return -std::log(th); };
  s.db = [](double th) { return -1.0 / th; };
  s.d2b = [](double th) { return 1.0 / (th * th); };
  s.d3b = [](double th) { return -2.0 / (th * th * th); };
  // Inverse CDF x = u^(1/theta).
  s.sampler = [](double th, RngStream& rng) { return std::exp(-rng.exponential() / th); };
  s.test_range = {0.3, 5.0};
  return s;
}

ExponentialFamilySpec expfam_normal_mean() {
  ExponentialFamilySpec s;
  s.name = "normal_mean";
  s.param_support = kReal;
  s.data_support = kReal;
  s.t = [](double x) { return x; };
  s.log_c = [](double x) { return -0.5 * x * x - kLogSqrt2Pi; };
  s.b = [](double th) { return 0.5 * th * th; };
  s.db = [](double th) { return th; };
  s.d2b = [](double) { return 1.0; };
  s.d3b = [](double) { return 0.0; };
  s.sampler = [](double th, RngStream& rng) { return th + rng.normal(); };
  s.test_range = {-2.0, 2.0};
  return s;
}

Model model_from_expfam(ExponentialFamilySpec spec) {
  if (!spec.t || !spec.log_c || !spec.b || !spec.db || !spec.d2b || !spec.d3b) {
    throw ModelError("expfam:" + spec.name + ": t, log_c and b..b''' are required");
  }
  // b'' > 0 on a probe of the test range.
  for (int k = 0; k <= 8; ++k) {
    const double th = spec.test_range.lo + (spec.test_range.hi - spec.test_range.lo) * k / 8.0;
    if (spec.param_support.contains(th) && !(spec.d2b(th) > 0.0)) {
      throw ModelError("expfam:" + spec.name + ": b'' not positive at theta = " +
                       std::to_string(th));
    }
  }

  const auto t = spec.t;
  const auto log_c = spec.log_c;
  const auto b = spec.b;
  const auto db = spec.db;
  const auto d2b = spec.d2b;
  const auto d3b = spec.d3b;
  const std::string name = spec.name;

  auto checked_d2b = [d2b, name](double th) {
    const double v = d2b(th);
    if (!(v > 0.0)) {
      throw ModelError("expfam:" + name + ": b'' not positive at theta = " + std::to_string(th));
    }
    return v;
  };

  Model::Loss loss = [t, log_c, b](double x, double th) { return -log_c(x) - t(x) * th + b(th); };
  Model::Loss score = [t, db](double x, double th) { return -t(x) + db(th); };

  const double typical = 0.5 * (spec.test_range.lo + spec.test_range.hi);
  Model model("expfam:" + spec.name, spec.param_support, spec.data_support, std::move(loss),
              std::move(score), spec.sampler, typical, spec.test_range);

  ClosedForms forms;
  forms.fisher_info = checked_d2b;
  forms.moments = [db, checked_d2b](double z, double theta_star) {
    const double var = checked_d2b(theta_star);
    const double d = db(z) - db(theta_star);
    return MomentPair{d, var + d * d, var};
  };
  forms.partials = [checked_d2b, d3b](double theta_star) {
    return MomentPartials{checked_d2b(theta_star), d3b(theta_star), 0.0};
  };
  return model.with_closed_forms(std::move(forms)).with_expfam(std::move(spec));
}

Model model_exponential() {
  Model base = model_from_expfam(expfam_exponential());
  ClosedForms forms = base.closed();
  forms.mle = [](std::span<const double> x) {
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    return static_cast<double>(x.size()) / sum;
  };
  return base.with_closed_forms(std::move(forms)).with_id("exponential");
}

Model model_power() {
  Model base = model_from_expfam(expfam_power());
  ClosedForms forms = base.closed();
  forms.mle = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::log(v);
    return -static_cast<double>(x.size()) / s;
  };
  return base.with_closed_forms(std::move(forms)).with_id("power");
}

Model model_fisk() {
  // With L = log x: l = 2 log(1 + e^{theta L}) - (theta - 1) L - log theta and
  // l' = 2 L x^theta / (1 + x^theta) - L - 1/theta = L tanh(theta L / 2) - 1/theta.
  Model::Loss loss = [](double x, double th) {
    const double L = std::log(x);
    return 2.0 * softplus(th * L) - (th - 1.0) * L - std::log(th);
  };
  Model::Loss score = [](double x, double th) {
    const double L = std::log(x);
    return L * std::tanh(0.5 * th * L) - 1.0 / th;
  };
  // Inverse CDF of F(x) = x^theta / (1 + x^theta).
  Model::Sampler sampler = [](double th, RngStream& rng) {
    const double u = rng.uniform();
    return std::exp((std::log(u) - std::log1p(-u)) / th);
  };
  return Model("fisk", kPositive, kPositive, std::move(loss), std::move(score),
               std::move(sampler), 1.0, {0.5, 5.0});
}

Model model_skew_normal() {
  Model::Loss loss = [](double x, double th) {
    return -kLn2 + 0.5 * x * x + kLogSqrt2Pi - log_std_normal_cdf(th * x);
  };
  Model::Loss score = [](double x, double th) { return -x * normal_hazard(th * x); };
  // X = Z1 if Z2 <= theta Z1, else -Z1, has density 2 phi(x) Phi(theta x).
  Model::Sampler sampler = [](double th, RngStream& rng) {
    const double z1 = rng.normal();
    if (th == 0.0) return z1;
    const double z2 = rng.normal();
    return z2 <= th * z1 ? z1 : -z1;
  };
  return Model("skew_normal", kReal, kReal, std::move(loss), std::move(score),
               std::move(sampler), 0.0, {-3.0, 3.0});
}

Model model_gumbel_rate() {
  Model::Loss loss = [](double x, double th) { return x * std::exp(th) - th; };
  Model::Loss score = [](double x, double th) { return x * std::exp(th) - 1.0; };
  Model::Sampler sampler = [](double th, RngStream& rng) {
    return rng.exponential() * std::exp(-th);
  };
  Model model("gumbel_rate", kReal, kPositive, std::move(loss), std::move(score),
              std::move(sampler), 0.0, {-2.0, 2.0});

  // x e^theta* ~ Exp(1) under f(.; theta*); with u = e^{z - theta*}:
  // D = u - 1, V = 2u^2 - 2u + 1, V - D^2 = u^2.
  ClosedForms forms;
  forms.mle = [](std::span<const double> x) {
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    return -std::log(sum / static_cast<double>(x.size()));
  };
  forms.fisher_info = [](double) { return 1.0; };
  forms.moments = [](double z, double theta_star) {
    const double u = std::exp(z - theta_star);
    const double d = u - 1.0;
    return MomentPair{d, 2.0 * u * u - 2.0 * u + 1.0, u * u};
  };
  forms.partials = [](double) { return MomentPartials{1.0, 1.0, 2.0}; };
  return model.with_closed_forms(std::move(forms));
}

Model model_by_id(std::string_view id) {
  if (id == "exponential") return model_exponential();
  if (id == "power") return model_power();
  if (id == "fisk") return model_fisk();
  if (id == "skew_normal") return model_skew_normal();
  if (id == "gumbel_rate") return model_gumbel_rate();
  if (id.starts_with("expfam:")) {
    const auto name = id.substr(7);
    if (name == "exponential") return model_from_expfam(expfam_exponential());
    if (name == "power") return model_from_expfam(expfam_power());
    if (name == "normal_mean") return model_from_expfam(expfam_normal_mean());
  }
  throw DomainError("unknown model id '" + std::string(id) + "'");
}

std::vector<std::string> model_ids() {
  return {"exponential",        "power",        "fisk",
          "skew_normal",        "gumbel_rate",  "expfam:exponential",
          "expfam:power",       "expfam:normal_mean"};
}

ConvexityReport check_convexity(const Model& model, RngStream& rng, std::size_t trials) {
  ConvexityReport report;
  const Interval& r = model.test_range();
  auto uniform_theta = [&] { return r.lo + (r.hi - r.lo) * rng.uniform(); };
  for (std::size_t k = 0; k < trials; ++k) {
    ++report.trials;
    const double x = model.sample(uniform_theta(), rng);
    const double th = uniform_theta();
    const double thp = uniform_theta();
    if (th == thp || !model.data_support().contains(x)) continue;

    const double l_th = model.loss(x, th);
    const double l_thp = model.loss(x, thp);
    const double s_th = model.score(x, th);
    const double s_thp = model.score(x, thp);
    const double scale = 1.0 + std::abs(l_th) + std::abs(l_thp);

    const double gap = l_th - (l_thp + (th - thp) * s_thp);
    if (!(gap >= -1e-12 * scale)) {
      report.passed = false;
      report.witness = ConvexityWitness{x, th, thp, "supporting line"};
      return report;
    }
    const double monotone = (th - thp) * (s_th - s_thp);
    if (!(monotone >= -1e-12 * (1.0 + std::abs(s_th) + std::abs(s_thp)))) {
      report.passed = false;
      report.witness = ConvexityWitness{x, th, thp, "score monotonicity"};
      return report;
    }
  }
  return report;
}

}  // namespace mledist
