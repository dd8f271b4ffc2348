// Acceptance suite: one pass/fail line per criterion.
//
//   mledist_acceptance          run every criterion
//   mledist_acceptance 3 7      run the listed ones
//
// Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mledist/asymptotic.hpp"
#include "mledist/csv.hpp"
#include "mledist/error.hpp"
#include "mledist/experiments.hpp"
#include "mledist/wlb.hpp"

using namespace mledist;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Dataset draw(const Model& model, double theta, std::size_t n, RngStream& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = model.sample(theta, rng);
  return Dataset(std::move(x));
}

ExperimentConfig experiment_config(const std::string& dir) {
  ExperimentConfig c;
  c.seed = kSeed;
  c.out_dir = fs::path("acceptance_out") / dir;
  return c;
}

Outcome c1_dominance() {
  const Grid g = Grid::linspace(0.4, 3.0, 261);
  const auto exact = exact_exponential_cdf(1.0, 10, g);
  const auto refined = refined_cdf(model_exponential(), 1.0, 10, g);
  const auto normal = normal_cdf_approx(model_exponential(), 1.0, 10, g);
  const double a = sup_distance(refined.values, exact.values);
  const double b = sup_distance(normal.values, exact.values);
  return {a < b, "sup|F_refined - F*| = " + num(a) + ", sup|F_normal - F*| = " + num(b)};
}

Outcome c2_generic_path() {
  const Grid g = Grid::linspace(0.4, 3.0, 261);
  const auto q = refined_cdf(model_exponential(), 1.0, 10, g, MomentMethod::quadrature());
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double closed = std_normal_cdf(std::sqrt(10.0) * (1.0 - 1.0 / g[i]));
    worst = std::max(worst, std::abs(q.values[i] - closed));
  }
  return {worst <= 1e-8, "quadrature vs closed form sup = " + num(worst)};
}

Outcome c3_edgeworth() {
  const Model m = model_exponential();
  const auto fd = moment_partials(m, 1.0, MomentMethod::closed_form(),
                                  PartialsRoute::finite_difference);
  const auto cl = moment_partials(m, 1.0);
  const double c_fd = edgeworth_coefficient(fd.partials, fd.v_at_star);
  const double c_cl = edgeworth_coefficient(cl.partials, cl.v_at_star);
  const bool ok = fd.finite_difference && !cl.finite_difference &&
                  std::abs(c_fd + 2.0) <= 1e-4 && std::abs(c_cl + 2.0) <= 1e-12;
  return {ok, "finite differences c = " + num(c_fd) + " (|c+2| = " + num(std::abs(c_fd + 2)) +
                  "), closed c + 2 = " + num(c_cl + 2.0)};
}

Outcome c4_wlb_oracle() {
  struct Setup {
    Model model;
    double theta;
  };
  const std::vector<Setup> setups = {
      {model_exponential(), 1.0}, {model_power(), 2.0}, {model_gumbel_rate(), std::log(3.0)}};
  std::size_t points = 0, failures = 0, stability = 0, above_3sigma = 0;
  double worst_ratio = 0.0;
  std::ostringstream where;
  for (std::size_t s = 0; s < setups.size(); ++s) {
    const auto& [model, theta] = setups[s];
    for (std::size_t k = 0; k < 20; ++k) {
      RngStream rng(derive_seed(kSeed, 400 + s), k);
      const Dataset data = draw(model, theta, 10, rng);
      // Grid strictly inside the range of the single-observation roots,
      // where the WLB law puts all its mass.
      const double theta_hat = solve_mle(model, data);
      std::vector<double> roots;
      for (double x : data.values()) {
        roots.push_back(find_root_monotone(
            [&](double t) { return model.score_unchecked(x, t); }, theta_hat,
            {1e-12, 1e-12, 1.0, 60, model.param_support()}));
      }
      const double lo = *std::min_element(roots.begin(), roots.end());
      const double hi = *std::max_element(roots.begin(), roots.end());
      std::vector<double> z(21);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = lo + (hi - lo) * (i + 1.0) / 22.0;
      const Grid grid(z);
      RngStream orng(derive_seed(kSeed, 450 + s), k);
      const auto oracle = wlb_mc_oracle_grid(model, data, grid, 1'000'000, orng);
      for (std::size_t i = 0; i < z.size(); ++i) {
        ++points;
        double exact = 0.0;
        try {
          exact = wlb_exact_at(model, data, z[i]);
        } catch (const StabilityError&) {
          ++stability;
          ++failures;
          continue;
        }
        const double resid = std::abs(exact - oracle[i].p);
        const double tol = std::max(3.0 * oracle[i].se, 1e-3);
        if (oracle[i].se > 0 && resid > 3.0 * oracle[i].se) ++above_3sigma;
        const double ratio = resid / tol;
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          where.str("");
          where << model.id() << " dataset " << k << " z=" << num(z[i]) << " exact=" << num(exact)
                << " oracle=" << num(oracle[i].p) << " se=" << num(oracle[i].se);
        }
        if (resid > tol) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(points) + " points, " + std::to_string(failures) +
                             " over tolerance (" + std::to_string(stability) +
                             " stability errors, " + std::to_string(above_3sigma) +
                             " beyond 3 se); worst residual/tolerance " + num(worst_ratio) +
                             " at " + where.str()};
}

Outcome c5_two_point() {
  RngStream rng(derive_seed(kSeed, 5), 0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double a = std::exp(6.0 * (rng.uniform() - 0.5));
    const double b = std::exp(6.0 * (rng.uniform() - 0.5));
    const std::vector<double> pos = {a}, neg = {b};
    worst = std::max(worst, std::abs(hypoexp_exceedance(pos, neg) - b / (a + b)));
  }
  return {worst <= 1e-12, "1000 pairs, max |error| = " + num(worst)};
}

Outcome c6_normalization() {
  RngStream rng(derive_seed(kSeed, 6), 0);
  double worst = 0.0;
  std::size_t sets = 0;
  for (std::size_t m = 2; m <= 10; ++m) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> rates(m);
      for (auto& r : rates) r = std::exp(3.0 * (rng.uniform() - 0.5));
      std::sort(rates.begin(), rates.end());
      if (std::adjacent_find(rates.begin(), rates.end()) != rates.end()) continue;
      const double mass = integrate_1d([&](double t) { return hypoexp_density(rates, t); }, 0.0,
                                       std::numeric_limits<double>::infinity());
      worst = std::max(worst, std::abs(mass - 1.0));
      ++sets;
    }
  }
  return {worst <= 1e-8, std::to_string(sets) + " rate sets of size 2..10, max |mass - 1| = " +
                             num(worst)};
}

Outcome c7_pivots() {
  auto c = experiment_config("pivots");
  c.reps = 5000;
  bool ok = true;
  std::ostringstream d;
  for (std::size_t n : {15, 25}) {
    c.n = n;
    const auto r = run_fig3(c);
    const std::string tag = "n" + std::to_string(n);
    const double vt = r.summary.at(tag + "_var_t");
    const double vtn = r.summary.at(tag + "_var_t_normal");
    const bool pass = n == 15 ? (vtn >= 1.6 && vtn <= 2.0 && vt >= 0.70 && vt <= 0.90)
                              : (vt >= 0.78 && vt <= 0.93 && vtn >= 1.28 && vtn <= 1.48);
    ok = ok && pass;
    d << tag << ": Var(T_N) = " << num(vtn) << ", Var(T) = " << num(vt) << "; ";
  }
  return {ok, d.str()};
}

Outcome c8_fisk() {
  const auto r = run_fig2(experiment_config("fisk"));
  const double gap = r.summary.at("sup_gap");
  return {gap <= 0.05, "sup gap = " + num(gap) + " (reps " + r.config.at("reps") + ", moments " +
                           r.config.at("moments") + ")"};
}

Outcome c9_sampler() {
  const Model m = model_power();
  RngStream rng(derive_seed(kSeed, 9), 0);
  const Dataset data = draw(m, 2.0, 10, rng);
  auto draws = wlb_samples(m, data, 100'000, derive_seed(kSeed, 90));
  std::sort(draws.begin(), draws.end());
  // Kolmogorov distance: the exact CDF at every order statistic.
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = wlb_exact_at(m, data, draws[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d <= 0.0086, "Kolmogorov distance over 1e5 draws = " + num(d)};
}

Outcome c10_variance_order() {
  const auto r = run_wlb_jeffreys(experiment_config("jeffreys"));
  const double w = r.summary.at("wlb_variance");
  const double j = r.summary.at("jeffreys_variance");
  const auto x = csv::read_column(experiment_config("jeffreys").out_dir / "wlb-jeffreys" / "data.csv");
  double s = 0.0, ss = 0.0;
  for (double v : x) s += v;
  const double mean = s / x.size();
  for (double v : x) ss += (v - mean) * (v - mean);
  const double cv2 = ss / (x.size() - 1) / (mean * mean);
  return {w < j, "Var(WLB) = " + num(w) + ", Var(Jeffreys) = " + num(j) +
                     ", dataset squared coefficient of variation = " + num(cv2)};
}

Outcome c11_probmatch() {
  const auto r = run_probmatch(experiment_config("probmatch"));
  const double ks = r.summary.at("ks_distance");
  return {ks <= 0.10, "two-sample KS = " + num(ks) + " (1000 draws each)"};
}

Outcome c12_normal_limit() {
  const double n = 1e4;
  std::vector<double> z;
  for (double d : {-2.0, -1.0, 0.0, 1.0, 2.0}) z.push_back(1.0 + d / std::sqrt(n));
  const auto r = refined_cdf(model_exponential(), 1.0, 10000, Grid(z));
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    worst = std::max(worst, std::abs(r.values[i] - std_normal_cdf(-2.0 + i)));
  }
  return {worst <= 0.02, "max |F_refined - Phi(d)| = " + num(worst)};
}

std::map<fs::path, std::string> read_tree(const fs::path& root) {
  std::map<fs::path, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root)] = s.str();
  }
  return files;
}

Outcome c13_determinism() {
  const fs::path a = fs::absolute("acceptance_out/determinism_a");
  const fs::path b = fs::absolute("acceptance_out/determinism_b");
  for (const auto& dir : {a, b}) {
    fs::remove_all(dir);
    const std::string cmd = std::string("\"") + MLEDIST_PAPER_REPRO + "\" all --seed 42 --out \"" +
                            dir.string() + "\" > \"" + dir.string() + ".log\" 2>&1";
    const int status = std::system(cmd.c_str());
    // Exit 2 means some experiment assertion failed; outputs are still complete.
    if (status == -1 || (WEXITSTATUS(status) != 0 && WEXITSTATUS(status) != 2)) {
      return {false, "paper-repro failed, see " + dir.string() + ".log"};
    }
  }
  const auto fa = read_tree(a);
  const auto fb = read_tree(b);
  std::size_t differing = 0;
  for (const auto& [path, contents] : fa) {
    auto it = fb.find(path);
    if (it == fb.end() || it->second != contents) ++differing;
  }
  const bool ok = !fa.empty() && fa.size() == fb.size() && differing == 0;
  return {ok, std::to_string(fa.size()) + " CSV files, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Exponential-model dominance", 1.0, c1_dominance},
      {2, "Generic-path consistency", 10.0, c2_generic_path},
      {3, "Edgeworth coefficient", 0.0, c3_edgeworth},
      {4, "WLB exact vs oracle", 300.0, c4_wlb_oracle},
      {5, "Two-point closed form", 0.0, c5_two_point},
      {6, "Hypoexponential normalization", 10.0, c6_normalization},
      {7, "Skew-normal pivot moments", 120.0, c7_pivots},
      {8, "Fisk closeness", 180.0, c8_fisk},
      {9, "WLB sampler law", 120.0, c9_sampler},
      {10, "Variance ordering", 0.0, c10_variance_order},
      {11, "Probability matching vs WLB", 0.0, c11_probmatch},
      {12, "Normal-limit recovery", 0.0, c12_normal_limit},
      {13, "Determinism", 0.0, c13_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& c : criteria) selected.push_back(c.id);
  }

  bool all = true;
  for (int id : selected) {
    auto it = std::find_if(criteria.begin(), criteria.end(),
                           [id](const Criterion& c) { return c.id == id; });
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (it->time_limit_s > 0 && secs > it->time_limit_s) {
      out.passed = false;
      out.detail += "; runtime over the " + num(it->time_limit_s) + " s limit";
    }
    std::printf("[%s] %2d %s: %s [%.2f s]\n", out.passed ? "PASS" : "FAIL", it->id,
                it->title.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && out.passed;
  }
  return all ? 0 : 1;
}
