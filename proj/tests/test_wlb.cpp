#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mledist/error.hpp"
#include "mledist/simd/kernels.hpp"
#include "mledist/wlb.hpp"

using namespace mledist;

// References: P(sum c_i E_i > 0) = sum_{c_i > 0} prod_{j != i} c_i / (c_i - c_j)
// for independent standard exponentials, evaluated with 50-digit arithmetic.

TEST_CASE("exact WLB CDF against high-precision references") {
  const Dataset e({0.5, 1.0, 2.0, 3.0});
  const auto ce = wlb_exact_cdf(model_exponential(), e, Grid({0.4, 0.8, 1.5}));
  CHECK(ce.values[0] == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(ce.values[1] == doctest::Approx(0.790625).epsilon(1e-12));
  CHECK(ce.values[2] == doctest::Approx(0.997530864197530864).epsilon(1e-12));

  const Dataset p({0.2, 0.45, 0.7, 0.9, 0.95});
  const auto cp = wlb_exact_cdf(model_power(), p, Grid({1.0, 2.0, 4.0}));
  CHECK(cp.values[0] == doctest::Approx(0.0579412061819989647).epsilon(1e-11));
  CHECK(cp.values[1] == doctest::Approx(0.593542111979452930).epsilon(1e-11));
  CHECK(cp.values[2] == doctest::Approx(0.949796003026412549).epsilon(1e-11));

  const Dataset g({0.1, 0.4, 0.8, 1.5, 2.2, 0.05});
  const auto cg = wlb_exact_cdf(model_gumbel_rate(), g, Grid({-0.5, 0.0, 0.7}));
  CHECK(cg.values[0] == doctest::Approx(0.00639292845037438523).epsilon(1e-10));
  CHECK(cg.values[1] == doctest::Approx(0.283867499863441192).epsilon(1e-11));
  CHECK(cg.values[2] == doctest::Approx(0.883566916832212018).epsilon(1e-11));
}

TEST_CASE("two-point closed form") {
  RngStream rng(2, 0);
  for (int k = 0; k < 200; ++k) {
    const double a = std::exp(4 * rng.normal());
    const double b = std::exp(4 * rng.normal());
    const std::vector<double> pos = {a}, neg = {b};
    CHECK(std::abs(hypoexp_exceedance(pos, neg) - b / (a + b)) <= 1e-12);
  }
}

TEST_CASE("hypoexponential density") {
  const std::vector<double> rates = {1.0, 2.5, 4.0};
  const double mass = integrate_1d([&](double t) { return hypoexp_density(rates, t); }, 0.0,
                                   std::numeric_limits<double>::infinity());
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  // Two rates: a b (e^-at - e^-bt) / (b - a).
  const std::vector<double> two = {1.0, 3.0};
  CHECK(hypoexp_density(two, 0.7) ==
        doctest::Approx(3.0 * (std::exp(-0.7) - std::exp(-2.1)) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(hypoexp_coefficients(std::vector<double>{1.0, 1.0}), DomainError);
}

TEST_CASE("hypoexponential density with near-equal rates") {
  // 60-digit partial fractions.
  const std::vector<double> rates = {1.0, 1.0 + 1e-4, 1.0 + 2e-4, 3.0};
  CHECK(hypoexp_density(rates, 0.5) == doctest::Approx(0.030058525501165045139).epsilon(1e-11));
  CHECK(hypoexp_density(rates, 2.0) == doctest::Approx(0.25285669018602108967).epsilon(1e-11));
  CHECK(hypoexp_density(rates, 8.0) == doctest::Approx(0.014208745747785699178).epsilon(1e-11));
  CHECK(hypoexp_density(rates, 0.0) == 0.0);
  CHECK(hypoexp_density(std::vector<double>{2.0}, 0.0) == 2.0);
}

TEST_CASE("exceedance is symmetric") {
  RngStream rng(4, 0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(1 + k % 4), b(1 + k % 5);
    for (auto& v : a) v = std::exp(rng.normal());
    for (auto& v : b) v = std::exp(rng.normal());
    CHECK(hypoexp_exceedance(a, b) + hypoexp_exceedance(b, a) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("clustered rates on one side stay accurate") {
  // One rate against nine nearly equal ones: the double sum cancels, the
  // single sum over the lone rate is exact: prod mu / (mu + lambda).
  std::vector<double> neg;
  double expected = 1.0;
  for (int j = 0; j < 9; ++j) {
    neg.push_back(1.0 / (14.5 + 0.07 * j));
    expected *= neg.back() / (neg.back() + 1.0 / 0.53);
  }
  const std::vector<double> pos = {1.0 / 0.53};
  CHECK(hypoexp_exceedance(pos, neg) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("partition and degenerate scores") {
  const Dataset d({0.5, 1.0, 2.0});
  const auto p = partition_scores(model_exponential(), d, 1.0);
  CHECK(p.pos_idx == std::vector<std::size_t>{2});
  CHECK(p.neg_idx == std::vector<std::size_t>{0});
  CHECK(p.zero_idx == std::vector<std::size_t>{1});
  // All scores of one sign.
  CHECK(wlb_exact_at(model_exponential(), d, 0.1) == 0.0);
  CHECK(wlb_exact_at(model_exponential(), d, 100.0) == 1.0);
  // Duplicate observations are separated.
  const auto q = partition_scores(model_exponential(), Dataset({2.0, 2.0, 0.5}), 1.0);
  CHECK(q.perturbed == 1);
  std::vector<double> r = {1.0, 1.0 + 1e-12, 3.0};
  CHECK(separate_rates(r) == 1);
  CHECK(r[1] > r[0]);
}

TEST_CASE("exact CDF is monotone and matches the oracle") {
  RngStream rng(8, 0);
  const Model m = model_power();
  std::vector<double> x(10);
  for (auto& v : x) v = m.sample(2.0, rng);
  const Dataset d(x);
  const Grid g = Grid::linspace(0.6, 6.0, 28);
  const auto c = wlb_exact_cdf(m, d, g);
  CHECK(std::is_sorted(c.values.begin(), c.values.end()));
  RngStream orng(9, 0);
  const auto o = wlb_mc_oracle_grid(m, d, g, 200000, orng);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(c.values[i] - o[i].p) <= std::max(4 * o[i].se, 2e-3));
  }
}

TEST_CASE("oracle is deterministic and independent of the kernel variant") {
  const Dataset d({0.3, 0.5, 0.9, 0.2});
  const Grid g({1.0, 2.0});
  RngStream a(5, 0);
  const auto x = wlb_mc_oracle_grid(model_power(), d, g, 10000, a);
  const auto before = simd::active_isa();
  simd::set_active_isa(simd::Isa::scalar);
  RngStream b(5, 0);
  const auto y = wlb_mc_oracle_grid(model_power(), d, g, 10000, b);
  simd::set_active_isa(before);
  CHECK(x[0].p == y[0].p);
  CHECK(x[1].p == y[1].p);
  RngStream c(5, 0);
  CHECK_THROWS_AS(wlb_mc_oracle(model_power(), d, 1.0, 10, c), DomainError);
}

TEST_CASE("samplers") {
  const Dataset d({0.4, 1.1, 2.3, 0.7, 1.9});
  const auto s = wlb_samples(model_exponential(), d, 500, 3);
  CHECK(s == wlb_samples(model_exponential(), d, 500, 3));
  // Exponential WLB draws are sum w / sum w x, inside [1/max x, 1/min x].
  for (double v : s) {
    CHECK(v >= 1.0 / 2.3);
    CHECK(v <= 1.0 / 0.4);
  }
  const double theta_hat = solve_mle(model_gumbel_rate(), d);
  CHECK(probability_matching_solve(model_gumbel_rate(), d.size(), theta_hat, 0.0) ==
        doctest::Approx(theta_hat).epsilon(1e-10));
  // gumbel_rate has I = 1: theta = theta_hat + zeta / sqrt(n).
  CHECK(probability_matching_solve(model_gumbel_rate(), 100, 0.3, 1.5) ==
        doctest::Approx(0.45).epsilon(1e-9));
  // Exponential: sqrt(n) (theta - theta_hat) / theta = zeta.
  const double t = probability_matching_solve(model_exponential(), 25, 2.0, 1.0);
  CHECK(5.0 * (t - 2.0) / t == doctest::Approx(1.0).epsilon(1e-9));
  const auto pm = probability_matching_samples(model_gumbel_rate(), d, 200, 4);
  CHECK(pm == probability_matching_samples(model_gumbel_rate(), d, 200, 4));
}

TEST_CASE("approximations and Jeffreys posterior") {
  const Dataset d({0.4, 1.1, 2.3, 0.7, 1.9});
  const Grid g = Grid::linspace(0.01, 6.0, 3000);
  const auto j = jeffreys_posterior_exponential(d, g);
  CHECK(trapezoid(g, j.values) == doctest::Approx(1.0).epsilon(1e-4));
  const auto a = wlb_normal_approx(model_exponential(), d, Grid({1.0 / 1.28}));
  CHECK(a.values[0] == doctest::Approx(0.5));
  const auto f = wlb_fisher_approx(model_exponential(), d, Grid({1.0 / 1.28}));
  CHECK(f.values[0] == doctest::Approx(0.5));
}
