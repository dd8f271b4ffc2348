#include "mledist/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

#include <json.hpp>

#include "mledist/asymptotic.hpp"
#include "mledist/csv.hpp"
#include "mledist/error.hpp"
#include "mledist/mle.hpp"
#include "mledist/wlb.hpp"

namespace mledist {

namespace {

namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fmt(double v) { return csv::format_double(v); }

/// Collects outputs for one experiment.
class Recorder {
 public:
  Recorder(std::string id, const ExperimentConfig& config)
      : start_(std::chrono::steady_clock::now()) {
    report_.id = std::move(id);
    report_.seed = experiment_seed(config.seed, report_.id);
    dir_ = config.out_dir / report_.id;
  }

  std::uint64_t seed() const { return report_.seed; }

  void write(const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    csv::write_file(path, contents);
    report_.csv_paths.push_back(path);
  }

  void summary(const std::string& key, double value) { report_.summary[key] = value; }
  void config(const std::string& key, const std::string& value) { report_.config[key] = value; }

  void check(const std::string& name, bool passed, const std::string& detail) {
    report_.assertions.push_back({name, passed, detail});
  }

  ExperimentReport finish() {
    report_.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(report_);
  }

 private:
  ExperimentReport report_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
};

MomentMethod moments_or(const ExperimentConfig& config, const std::string& fallback,
                        std::uint64_t seed) {
  return MomentMethod::parse(config.moments.value_or(fallback), seed);
}

/// Index of the first grid point where the curve reaches 1/2.
std::size_t median_index(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= 0.5) return i;
  }
  return values.size() - 1;
}

double median_crossing(const Grid& grid, std::span<const double> values) {
  return grid[median_index(values)];
}

bool nondecreasing(std::span<const double> v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - slack) return false;
  }
  return true;
}

std::string between(double v, double lo, double hi) {
  std::ostringstream s;
  s << v << " in [" << lo << ", " << hi << "]";
  return s.str();
}

std::string less(double a, double b) {
  std::ostringstream s;
  s << a << " < " << b;
  return s.str();
}

struct PosteriorSummary {
  double mass;
  double mean;
  double variance;
};

PosteriorSummary summarize_density(const Grid& grid, std::span<const double> f) {
  const double mass = trapezoid(grid, f);
  std::vector<double> tmp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) tmp[i] = grid[i] * f[i];
  const double mean = trapezoid(grid, tmp) / mass;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tmp[i] = (grid[i] - mean) * (grid[i] - mean) * f[i];
  }
  return {mass, mean, trapezoid(grid, tmp) / mass};
}

Dataset draw_dataset(const Model& model, double theta, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = model.sample(theta, rng);
  return Dataset(std::move(x));
}

std::string dataset_csv(const Dataset& data) {
  std::string s = "x\n";
  for (double v : data.values()) s += fmt(v) + "\n";
  return s;
}

}  // namespace

bool ExperimentReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.passed; });
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"fig1",     "fig2",         "fig3",
                                               "wlb-beta", "wlb-jeffreys", "probmatch"};
  return ids;
}

std::uint64_t experiment_seed(std::uint64_t seed, const std::string& id) {
  return derive_seed(seed, fnv1a(id));
}

ExperimentReport run_fig1(const ExperimentConfig& config) {
  Recorder rec("fig1", config);
  const std::size_t n = config.n.value_or(10);
  const double theta_star = 1.0;
  const MomentMethod moments = moments_or(config, "closed", rec.seed());
  const Model model = model_exponential();
  const Grid grid = Grid::linspace(0.4, 3.0, 261);
  rec.config("model", model.id());
  rec.config("n", std::to_string(n));
  rec.config("theta_star", fmt(theta_star));
  rec.config("moments", moments.to_string());

  const CdfCurve refined = refined_cdf(model, theta_star, n, grid, moments);
  const CdfCurve normal = normal_cdf_approx(model, theta_star, n, grid, moments);
  const CdfCurve exact = exact_exponential_cdf(theta_star, n, grid);

  const double fisher = fisher_info(model, theta_star, moments);
  const EdgeworthCurve edge =
      edgeworth_cdf(model, theta_star, n, standardize_grid(grid, theta_star, n, fisher), moments);
  std::string edge_csv = "x,z,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    edge_csv += fmt(edge.standardized.grid[i]) + "," + fmt(grid[i]) + "," +
                fmt(edge.standardized.values[i]) + "\n";
  }

  rec.write("refined.csv", csv::curve_csv(refined));
  rec.write("normal.csv", csv::curve_csv(normal));
  rec.write("exact.csv", csv::curve_csv(exact));
  rec.write("edgeworth.csv", edge_csv);

  // Closed form Phi(sqrt(n) theta* (1/theta* - 1/z)).
  std::vector<double> closed(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    closed[i] = std_normal_cdf(std::sqrt(static_cast<double>(n)) * theta_star *
                               (1.0 / theta_star - 1.0 / grid[i]));
  }
  const double gap_refined = sup_distance(refined.values, exact.values);
  const double gap_normal = sup_distance(normal.values, exact.values);
  const double gap_edge = sup_distance(edge.standardized.values, exact.values);
  const double closed_gap = sup_distance(refined.values, closed);
  rec.summary("sup_gap_refined", gap_refined);
  rec.summary("sup_gap_normal", gap_normal);
  rec.summary("sup_gap_edgeworth", gap_edge);
  rec.summary("refined_vs_closed_form", closed_gap);
  rec.summary("median_refined", median_crossing(grid, refined.values));
  rec.summary("median_normal", median_crossing(grid, normal.values));
  rec.summary("median_exact", median_crossing(grid, exact.values));

  rec.check("refined closer to exact than normal", gap_refined < gap_normal,
            less(gap_refined, gap_normal));
  rec.check("refined equals closed form", closed_gap <= 1e-12,
            "sup difference " + fmt(closed_gap));
  return rec.finish();
}

ExperimentReport run_fig2(const ExperimentConfig& config) {
  Recorder rec("fig2", config);
  const std::size_t n = config.n.value_or(10);
  const std::size_t reps = config.reps.value_or(100'000);
  const double theta_star = 2.0;
  const MomentMethod moments = moments_or(config, "mc:1000000", derive_seed(rec.seed(), 1));
  const Model model = model_fisk();
  rec.config("model", model.id());
  rec.config("n", std::to_string(n));
  rec.config("reps", std::to_string(reps));
  rec.config("theta_star", fmt(theta_star));
  rec.config("moments", moments.to_string());

  const EmpiricalMleDistribution emp =
      empirical_mle_distribution(model, theta_star, n, reps, derive_seed(rec.seed(), 2));
  const Grid& grid = emp.curve.grid;
  const CdfCurve refined = refined_cdf(model, theta_star, n, grid, moments);
  rec.write("empirical.csv", csv::curve_csv(emp.curve));
  rec.write("refined.csv", csv::curve_csv(refined));

  const double gap = sup_distance(emp.curve.values, refined.values);
  const std::size_t i_emp = median_index(emp.curve.values);
  const std::size_t i_ref = median_index(refined.values);
  const std::size_t cells = i_emp > i_ref ? i_emp - i_ref : i_ref - i_emp;
  rec.summary("sup_gap", gap);
  rec.summary("median_empirical", grid[i_emp]);
  rec.summary("median_refined", grid[i_ref]);
  rec.summary("median_cells_apart", static_cast<double>(cells));
  rec.summary("dropped_replicates", static_cast<double>(emp.failures));

  rec.check("sup gap <= 0.05", gap <= 0.05, "sup gap " + fmt(gap));
  // 201 equispaced points: 5 cells is 2.5% of the simulated range.
  rec.check("medians within 5 grid cells", cells <= 5,
            "empirical " + fmt(grid[i_emp]) + ", refined " + fmt(grid[i_ref]) + ", " +
                std::to_string(cells) + " cells apart");
  return rec.finish();
}

ExperimentReport run_fig3(const ExperimentConfig& config) {
  Recorder rec("fig3", config);
  const std::size_t reps = config.reps.value_or(5000);
  std::vector<std::size_t> sizes = {15, 25, 100};
  if (config.n) sizes = {*config.n};
  rec.config("model", "skew_normal");
  rec.config("reps", std::to_string(reps));
  rec.config("theta_star", "0");

  for (std::size_t n : sizes) {
    const PivotStudy study = pivot_study(n, reps, derive_seed(rec.seed(), n));
    const std::string tag = "n" + std::to_string(n);

    std::string samples = "index,t_refined,t_normal\n";
    for (std::size_t i = 0; i < study.samples.size(); ++i) {
      samples += std::to_string(i) + "," + fmt(study.samples[i].t_refined) + "," +
                 fmt(study.samples[i].t_normal) + "\n";
    }
    rec.write(tag + "_pivots.csv", samples);

    // Histogram on [-5, 5] in 40 bins, with the N(0,1) bin probability.
    constexpr int kBins = 40;
    constexpr double kLo = -5.0;
    constexpr double kWidth = 0.25;
    std::vector<std::size_t> count_t(kBins, 0), count_tn(kBins, 0);
    auto bin_of = [&](double v) {
      const double k = std::floor((v - kLo) / kWidth);
      return (k >= 0 && k < kBins) ? static_cast<int>(k) : -1;
    };
    for (const auto& s : study.samples) {
      if (int b = bin_of(s.t_refined); b >= 0) ++count_t[b];
      if (int b = bin_of(s.t_normal); b >= 0) ++count_tn[b];
    }
    std::string hist = "bin_lo,bin_hi,count_t,count_t_normal,normal_probability\n";
    for (int b = 0; b < kBins; ++b) {
      const double lo = kLo + kWidth * b;
      const double hi = lo + kWidth;
      hist += fmt(lo) + "," + fmt(hi) + "," + std::to_string(count_t[b]) + "," +
              std::to_string(count_tn[b]) + "," + fmt(std_normal_cdf(hi) - std_normal_cdf(lo)) +
              "\n";
    }
    rec.write(tag + "_histogram.csv", hist);

    rec.summary(tag + "_mean_t", study.refined.mean);
    rec.summary(tag + "_var_t", study.refined.variance);
    rec.summary(tag + "_mean_t_normal", study.normal.mean);
    rec.summary(tag + "_var_t_normal", study.normal.variance);
    rec.summary(tag + "_dropped", static_cast<double>(study.failures));

    const double vt = study.refined.variance;
    const double vtn = study.normal.variance;
    if (n == 15) {
      rec.check("n=15 Var(T_N) in [1.6, 2.0]", vtn >= 1.6 && vtn <= 2.0, between(vtn, 1.6, 2.0));
      rec.check("n=15 Var(T) in [0.70, 0.90]", vt >= 0.70 && vt <= 0.90, between(vt, 0.70, 0.90));
    } else if (n == 25) {
      rec.check("n=25 Var(T) in [0.78, 0.93]", vt >= 0.78 && vt <= 0.93, between(vt, 0.78, 0.93));
      rec.check("n=25 Var(T_N) in [1.28, 1.48]", vtn >= 1.28 && vtn <= 1.48,
                between(vtn, 1.28, 1.48));
    } else if (n == 100) {
      rec.check("n=100 Var(T) in [1.1, 1.4]", vt >= 1.1 && vt <= 1.4, between(vt, 1.1, 1.4));
      rec.check("n=100 Var(T_N) in [1.1, 1.4]", vtn >= 1.1 && vtn <= 1.4, between(vtn, 1.1, 1.4));
    }
  }
  return rec.finish();
}

ExperimentReport run_wlb_beta(const ExperimentConfig& config) {
  Recorder rec("wlb-beta", config);
  const std::size_t n = config.n.value_or(10);
  const std::size_t draws = config.draws.value_or(1000);
  const std::size_t oracle_draws = config.reps.value_or(1'000'000);
  const Model model = model_power();
  // beta(2, 1) is the power model at theta = 2.
  const Dataset data = draw_dataset(model, 2.0, n, derive_seed(rec.seed(), 1));
  rec.config("model", model.id());
  rec.config("n", std::to_string(n));
  rec.config("draws", std::to_string(draws));
  rec.config("oracle_draws", std::to_string(oracle_draws));
  rec.write("data.csv", dataset_csv(data));

  // Every WLB draw lies between the smallest and largest single-datum roots -1/log x_i.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double x : data.values()) {
    lo = std::min(lo, -1.0 / std::log(x));
    hi = std::max(hi, -1.0 / std::log(x));
  }
  const double pad = 0.05 * (hi - lo);
  const Grid grid = Grid::linspace(std::max(lo - pad, 0.5 * lo), hi + pad, 201);

  const CdfCurve exact = wlb_exact_cdf(model, data, grid);
  const std::vector<double> samples = wlb_samples(model, data, draws, derive_seed(rec.seed(), 2));
  const std::vector<double> ecdf = empirical_cdf(samples, grid);
  std::vector<double> sub;
  for (std::size_t i = 0; i < grid.size(); i += 10) sub.push_back(grid[i]);
  const Grid oracle_grid(sub);
  RngStream oracle_rng(derive_seed(rec.seed(), 3), 0);
  const auto oracle = wlb_mc_oracle_grid(model, data, oracle_grid, oracle_draws, oracle_rng);

  rec.write("exact.csv", csv::curve_csv(exact));
  rec.write("sampler_draws.csv", csv::draws_csv(samples));
  rec.write("sampler_ecdf.csv", csv::curve_csv(grid, ecdf, "empirical"));
  std::string oracle_csv = "z,value,se\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < oracle_grid.size(); ++i) {
    oracle_csv += fmt(oracle_grid[i]) + "," + fmt(oracle[i].p) + "," + fmt(oracle[i].se) + "\n";
    const double resid = std::abs(exact.values[i * 10] - oracle[i].p);
    worst = std::max(worst, resid / std::max(3.0 * oracle[i].se, 1e-3));
  }
  rec.write("oracle.csv", oracle_csv);

  const double gap = sup_distance(exact.values, ecdf);
  const double bound = 1.36 * 2.0 / std::sqrt(static_cast<double>(draws));
  rec.summary("sup_gap_sampler", gap);
  rec.summary("oracle_worst_ratio", worst);
  rec.check("sampler within Kolmogorov bound", gap <= bound,
            "sup gap " + fmt(gap) + " <= " + fmt(bound));
  rec.check("exact curve monotone", nondecreasing(exact.values, 1e-9), "");
  rec.check("exact within max(3se, 1e-3) of oracle", worst <= 1.0,
            "worst residual / tolerance " + fmt(worst));
  return rec.finish();
}

ExperimentReport run_wlb_jeffreys(const ExperimentConfig& config) {
  Recorder rec("wlb-jeffreys", config);
  const std::size_t n = config.n.value_or(10);
  const double theta_true = 1.0 / 3.0;
  const Model model = model_exponential();
  const Dataset data = draw_dataset(model, theta_true, n, derive_seed(rec.seed(), 1));
  rec.config("model", model.id());
  rec.config("n", std::to_string(n));
  rec.config("theta_true", fmt(theta_true));
  rec.write("data.csv", dataset_csv(data));

  double sum = 0.0;
  double max_root = 0.0;
  for (double x : data.values()) {
    sum += x;
    max_root = std::max(max_root, 1.0 / x);
  }
  const double post_mean = static_cast<double>(n) / sum;
  const double post_sd = std::sqrt(static_cast<double>(n)) / sum;
  const double hi = std::max(1.05 * max_root, post_mean + 12.0 * post_sd);
  const Grid grid = Grid::linspace(hi * 1e-4, hi, 4001);

  const CdfCurve wlb_cdf = wlb_exact_cdf(model, data, grid);
  const DensityCurve wlb_density = cdf_to_density(wlb_cdf);
  const DensityCurve jeffreys = jeffreys_posterior_exponential(data, grid);
  rec.write("wlb_cdf.csv", csv::curve_csv(wlb_cdf));
  rec.write("wlb_density.csv", csv::curve_csv(grid, wlb_density.values, "wlb_density"));
  rec.write("jeffreys_density.csv", csv::curve_csv(grid, jeffreys.values, "jeffreys_density"));

  const PosteriorSummary w = summarize_density(grid, wlb_density.values);
  const PosteriorSummary j = summarize_density(grid, jeffreys.values);
  rec.summary("wlb_mass", w.mass);
  rec.summary("wlb_mean", w.mean);
  rec.summary("wlb_variance", w.variance);
  rec.summary("jeffreys_mass", j.mass);
  rec.summary("jeffreys_mean", j.mean);
  rec.summary("jeffreys_variance", j.variance);

  const double min_density = *std::min_element(wlb_density.values.begin(), wlb_density.values.end());
  rec.check("WLB variance below Jeffreys variance", w.variance < j.variance,
            less(w.variance, j.variance));
  rec.check("Jeffreys density mass >= 0.999", j.mass >= 0.999, "mass " + fmt(j.mass));
  rec.check("WLB density nonnegative", min_density >= 0.0, "min " + fmt(min_density));
  return rec.finish();
}

ExperimentReport run_probmatch(const ExperimentConfig& config) {
  Recorder rec("probmatch", config);
  const std::size_t n = config.n.value_or(100);
  const std::size_t draws = config.draws.value_or(1000);
  const double theta_true = std::log(3.0);
  const MomentMethod moments = moments_or(config, "closed", rec.seed());
  const Model model = model_gumbel_rate();
  const Dataset data = draw_dataset(model, theta_true, n, derive_seed(rec.seed(), 1));
  rec.config("model", model.id());
  rec.config("n", std::to_string(n));
  rec.config("draws", std::to_string(draws));
  rec.config("theta_true", fmt(theta_true));
  rec.config("moments", moments.to_string());
  rec.write("data.csv", dataset_csv(data));

  const std::vector<double> wlb = wlb_samples(model, data, draws, derive_seed(rec.seed(), 2));
  const std::vector<double> match =
      probability_matching_samples(model, data, draws, derive_seed(rec.seed(), 3), moments);
  rec.write("wlb_draws.csv", csv::draws_csv(wlb));
  rec.write("match_draws.csv", csv::draws_csv(match));

  auto mean_sd = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
  };
  const auto [mw, sw] = mean_sd(wlb);
  const auto [mm, sm] = mean_sd(match);
  const double ks = ks_two_sample(wlb, match);
  rec.summary("ks_distance", ks);
  rec.summary("mean_wlb", mw);
  rec.summary("sd_wlb", sw);
  rec.summary("mean_match", mm);
  rec.summary("sd_match", sm);

  const double mean_tol = 3.0 * std::max(sw, sm) / std::sqrt(static_cast<double>(draws));
  rec.check("two-sample KS <= 0.10", ks <= 0.10, "KS " + fmt(ks));
  rec.check("means agree within 3 sd/sqrt(draws)", std::abs(mw - mm) <= mean_tol,
            "|" + fmt(mw) + " - " + fmt(mm) + "| <= " + fmt(mean_tol));
  return rec.finish();
}

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config) {
  if (id == "fig1") return run_fig1(config);
  if (id == "fig2") return run_fig2(config);
  if (id == "fig3") return run_fig3(config);
  if (id == "wlb-beta") return run_wlb_beta(config);
  if (id == "wlb-jeffreys") return run_wlb_jeffreys(config);
  if (id == "probmatch") return run_probmatch(config);
  throw DomainError("unknown experiment '" + id + "'");
}

std::vector<ExperimentReport> run_all(const ExperimentConfig& config, bool parallel) {
  std::vector<ExperimentReport> reports;
  if (parallel) {
    std::vector<std::future<ExperimentReport>> futures;
    for (const auto& id : experiment_ids()) {
      futures.push_back(std::async(std::launch::async, [&config, id] { return run_experiment(id, config); }));
    }
    for (auto& f : futures) reports.push_back(f.get());
  } else {
    for (const auto& id : experiment_ids()) reports.push_back(run_experiment(id, config));
  }
  csv::write_file(config.out_dir / "manifest.json", manifest_json(reports, config));
  return reports;
}

std::string manifest_json(const std::vector<ExperimentReport>& reports,
                          const ExperimentConfig& config) {
  nlohmann::ordered_json root;
  root["seed"] = config.seed;
  root["out_dir"] = config.out_dir.string();
  auto& list = root["experiments"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json e;
    e["id"] = r.id;
    e["seed"] = r.seed;
    e["passed"] = r.passed();
    e["config"] = r.config;
    e["summary"] = r.summary;
    auto& checks = e["assertions"] = nlohmann::ordered_json::array();
    for (const auto& a : r.assertions) {
      checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    }
    auto& files = e["csv"] = nlohmann::ordered_json::array();
    for (const auto& p : r.csv_paths) files.push_back(p.string());
    e["wall_clock_s"] = r.wall_clock_s;
    list.push_back(std::move(e));
  }
  return root.dump(2) + "\n";
}

}  // namespace mledist
