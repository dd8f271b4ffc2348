#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mledist/csv.hpp"
#include "mledist/experiments.hpp"

using namespace mledist;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& dir) {
  ExperimentConfig c;
  c.out_dir = fs::path("exp_test_out") / dir;
  return c;
}

std::vector<double> column(const ExperimentConfig& c, const std::string& id,
                           const std::string& file, const std::string& name) {
  return csv::read_table(c.out_dir / id / file).numeric_column(name);
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

std::pair<double, double> mean_var(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, ss / (v.size() - 1)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_close(double summary, double recomputed) {
  CHECK(summary == doctest::Approx(recomputed).epsilon(1e-12).scale(1.0));
}

}  // namespace

TEST_CASE("fig1 summary is recomputable") {
  const auto c = small_config("fig1");
  const auto r = run_fig1(c);
  const auto z = column(c, "fig1", "exact.csv", "z");
  const auto exact = column(c, "fig1", "exact.csv", "value");
  const auto refined = column(c, "fig1", "refined.csv", "value");
  const auto normal = column(c, "fig1", "normal.csv", "value");
  const auto edge = column(c, "fig1", "edgeworth.csv", "value");
  CHECK(z.size() == 261);
  check_close(r.summary.at("sup_gap_refined"), sup_gap(refined, exact));
  check_close(r.summary.at("sup_gap_normal"), sup_gap(normal, exact));
  check_close(r.summary.at("sup_gap_edgeworth"), sup_gap(edge, exact));
  std::vector<double> closed(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    closed[i] = std_normal_cdf(std::sqrt(10.0) * (1.0 - 1.0 / z[i]));
  }
  check_close(r.summary.at("refined_vs_closed_form"), sup_gap(refined, closed));
  CHECK(r.passed());
}

TEST_CASE("fig2 summary is recomputable") {
  auto c = small_config("fig2");
  c.reps = 2000;
  c.moments = "mc:20000";
  const auto r = run_fig2(c);
  const auto emp = column(c, "fig2", "empirical.csv", "value");
  const auto ref = column(c, "fig2", "refined.csv", "value");
  const auto z = column(c, "fig2", "refined.csv", "z");
  check_close(r.summary.at("sup_gap"), sup_gap(emp, ref));
  auto crossing = [](const std::vector<double>& v) {
    return std::size_t(std::find_if(v.begin(), v.end(), [](double x) { return x >= 0.5; }) - v.begin());
  };
  check_close(r.summary.at("median_empirical"), z[crossing(emp)]);
  check_close(r.summary.at("median_refined"), z[crossing(ref)]);
  CHECK(r.config.at("reps") == "2000");
}

TEST_CASE("fig3 summary is recomputable") {
  auto c = small_config("fig3");
  c.n = 15;
  c.reps = 300;
  const auto r = run_fig3(c);
  const auto t = column(c, "fig3", "n15_pivots.csv", "t_refined");
  const auto tn = column(c, "fig3", "n15_pivots.csv", "t_normal");
  check_close(r.summary.at("n15_mean_t"), mean_var(t).first);
  check_close(r.summary.at("n15_var_t"), mean_var(t).second);
  check_close(r.summary.at("n15_mean_t_normal"), mean_var(tn).first);
  check_close(r.summary.at("n15_var_t_normal"), mean_var(tn).second);
  CHECK(t.size() + r.summary.at("n15_dropped") == 300);
  const auto counts = column(c, "fig3", "n15_histogram.csv", "count_t");
  double total = 0.0;
  for (double k : counts) total += k;
  CHECK(total <= t.size());
}

TEST_CASE("wlb-beta summary is recomputable") {
  auto c = small_config("wlb-beta");
  c.draws = 300;
  c.reps = 20000;
  const auto r = run_wlb_beta(c);
  const auto z = column(c, "wlb-beta", "exact.csv", "z");
  const auto exact = column(c, "wlb-beta", "exact.csv", "value");
  const auto draws = column(c, "wlb-beta", "sampler_draws.csv", "theta");
  CHECK(draws.size() == 300);
  std::vector<double> ecdf(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    ecdf[i] = std::count_if(draws.begin(), draws.end(), [&](double d) { return d <= z[i]; }) /
              double(draws.size());
  }
  check_close(r.summary.at("sup_gap_sampler"), sup_gap(exact, ecdf));
  const auto oz = column(c, "wlb-beta", "oracle.csv", "z");
  const auto op = column(c, "wlb-beta", "oracle.csv", "value");
  const auto se = column(c, "wlb-beta", "oracle.csv", "se");
  double worst = 0.0;
  for (std::size_t i = 0; i < oz.size(); ++i) {
    const auto k = std::size_t(std::find(z.begin(), z.end(), oz[i]) - z.begin());
    REQUIRE(k < z.size());
    worst = std::max(worst, std::abs(exact[k] - op[i]) / std::max(3 * se[i], 1e-3));
  }
  check_close(r.summary.at("oracle_worst_ratio"), worst);
}

TEST_CASE("wlb-jeffreys summary is recomputable") {
  const auto c = small_config("wlb-jeffreys");
  const auto r = run_wlb_jeffreys(c);
  const auto z = column(c, "wlb-jeffreys", "jeffreys_density.csv", "z");
  auto moments = [&](const std::vector<double>& f) {
    const Grid g(z);
    std::vector<double> t(z.size());
    const double mass = trapezoid(g, f);
    for (std::size_t i = 0; i < z.size(); ++i) t[i] = z[i] * f[i];
    const double mean = trapezoid(g, t) / mass;
    for (std::size_t i = 0; i < z.size(); ++i) t[i] = (z[i] - mean) * (z[i] - mean) * f[i];
    return std::array<double, 3>{mass, mean, trapezoid(g, t) / mass};
  };
  const auto j = moments(column(c, "wlb-jeffreys", "jeffreys_density.csv", "value"));
  const auto w = moments(column(c, "wlb-jeffreys", "wlb_density.csv", "value"));
  check_close(r.summary.at("jeffreys_mass"), j[0]);
  check_close(r.summary.at("jeffreys_variance"), j[2]);
  check_close(r.summary.at("wlb_mass"), w[0]);
  check_close(r.summary.at("wlb_variance"), w[2]);
  // Jeffreys posterior variance n / (sum x)^2.
  const auto x = column(c, "wlb-jeffreys", "data.csv", "x");
  double s = 0.0;
  for (double v : x) s += v;
  CHECK(j[2] == doctest::Approx(x.size() / (s * s)).epsilon(1e-6));
}

TEST_CASE("probmatch summary is recomputable") {
  auto c = small_config("probmatch");
  c.draws = 200;
  const auto r = run_probmatch(c);
  const auto a = column(c, "probmatch", "wlb_draws.csv", "theta");
  const auto b = column(c, "probmatch", "match_draws.csv", "theta");
  check_close(r.summary.at("ks_distance"), ks_two_sample(a, b));
  check_close(r.summary.at("mean_wlb"), mean_var(a).first);
  check_close(r.summary.at("sd_match"), std::sqrt(mean_var(b).second));
}

TEST_CASE("experiments are byte-deterministic") {
  auto c = small_config("det_a");
  c.draws = 200;
  auto d = c;
  d.out_dir = fs::path("exp_test_out") / "det_b";
  for (const char* id : {"fig1", "probmatch"}) {
    const auto ra = run_experiment(id, c);
    const auto rb = run_experiment(id, d);
    REQUIRE(ra.csv_paths.size() == rb.csv_paths.size());
    for (std::size_t i = 0; i < ra.csv_paths.size(); ++i) {
      CHECK(slurp(ra.csv_paths[i]) == slurp(rb.csv_paths[i]));
    }
  }
  CHECK(experiment_seed(42, "fig1") != experiment_seed(42, "fig2"));
  CHECK_THROWS(run_experiment("fig9", c));
}

TEST_CASE("manifest") {
  const auto c = small_config("manifest");
  const std::vector<ExperimentReport> reports = {run_fig1(c)};
  const std::string m = manifest_json(reports, c);
  CHECK(m.find("\"id\": \"fig1\"") != std::string::npos);
  CHECK(m.find("\"sup_gap_refined\"") != std::string::npos);
  CHECK(m.find("\"seed\": 42") != std::string::npos);
}
