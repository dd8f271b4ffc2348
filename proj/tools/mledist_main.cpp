// mledist: MLE distribution curves and weighted likelihood bootstrap draws.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mledist/asymptotic.hpp"
#include "mledist/csv.hpp"
#include "mledist/error.hpp"
#include "mledist/mle.hpp"
#include "mledist/wlb.hpp"

using namespace mledist;

namespace {

struct Options {
  std::string model = "exponential";
  std::string data;
  std::string out;
  std::string moments = "closed";
  std::string grid;
  std::string method = "refined";
  double theta_star = 1.0;
  std::size_t n = 10;
  std::size_t reps = 10000;
  std::size_t draws = 1000;
  std::uint64_t seed = 42;
};

void emit(const Options& opt, const std::string& contents) {
  if (opt.out.empty()) {
    std::fwrite(contents.data(), 1, contents.size(), stdout);
  } else {
    csv::write_file(opt.out, contents);
  }
}

void warn(const CdfCurve& curve) {
  for (const auto& w : curve.warnings) std::cerr << "warning: " << w << "\n";
}

Dataset load(const Options& opt, const Model& model) {
  Dataset data(csv::read_column(opt.data));
  data.validate(model);
  return data;
}

MomentMethod moments_of(const Options& opt) { return MomentMethod::parse(opt.moments, opt.seed); }

void mle_fit(const Options& opt) {
  const Model model = model_by_id(opt.model);
  const Dataset data = load(opt, model);
  const double theta_hat = solve_mle(model, data);
  std::cout << "theta_hat," << csv::format_double(theta_hat) << "\n";
  std::cout << "n," << data.size() << "\n";
}

void mle_simdist(const Options& opt) {
  const Model model = model_by_id(opt.model);
  const auto dist = empirical_mle_distribution(model, opt.theta_star, opt.n, opt.reps, opt.seed);
  if (dist.failures > 0) {
    std::cerr << "warning: " << dist.failures << " replicates had no interior MLE\n";
  }
  emit(opt, csv::curve_csv(dist.curve));
}

void asymp_curve(const Options& opt) {
  const Model model = model_by_id(opt.model);
  const Grid grid = Grid::parse(opt.grid);
  const MomentMethod moments = moments_of(opt);
  CdfCurve curve;
  if (opt.method == "refined") {
    curve = refined_cdf(model, opt.theta_star, opt.n, grid, moments);
  } else if (opt.method == "normal") {
    curve = normal_cdf_approx(model, opt.theta_star, opt.n, grid, moments);
  } else if (opt.method == "exact") {
    if (model.id() != "exponential") {
      throw DomainError("method 'exact' is only available for the exponential model");
    }
    curve = exact_exponential_cdf(opt.theta_star, opt.n, grid);
  } else if (opt.method == "edgeworth") {
    const double fisher = fisher_info(model, opt.theta_star, moments);
    const EdgeworthCurve e = edgeworth_cdf(
        model, opt.theta_star, opt.n, standardize_grid(grid, opt.theta_star, opt.n, fisher), moments);
    curve = e.standardized;
    curve.grid = grid;
  } else {
    throw DomainError("unknown method '" + opt.method + "'");
  }
  warn(curve);
  emit(opt, csv::curve_csv(curve));
}

void wlb_curve(const Options& opt, const std::string& kind) {
  const Model model = model_by_id(opt.model);
  const Dataset data = load(opt, model);
  const Grid grid = Grid::parse(opt.grid);
  CdfCurve curve;
  if (kind == "exact") {
    curve = wlb_exact_cdf(model, data, grid);
  } else if (kind == "approx") {
    curve = wlb_normal_approx(model, data, grid);
  } else {
    curve = wlb_fisher_approx(model, data, grid, moments_of(opt));
  }
  warn(curve);
  emit(opt, csv::curve_csv(curve));
}

void wlb_sample_cmd(const Options& opt) {
  const Model model = model_by_id(opt.model);
  const Dataset data = load(opt, model);
  emit(opt, csv::draws_csv(wlb_samples(model, data, opt.draws, opt.seed)));
}

void wlb_match(const Options& opt) {
  const Model model = model_by_id(opt.model);
  const Dataset data = load(opt, model);
  emit(opt, csv::draws_csv(
                probability_matching_samples(model, data, opt.draws, opt.seed, moments_of(opt))));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution estimates for maximum likelihood estimators"};
  app.require_subcommand(1);
  Options opt;

  auto add_model = [&](CLI::App* c) {
    c->add_option("--model", opt.model, "Model id")->required();
  };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", opt.out, "Output CSV (default stdout)"); };
  auto add_moments = [&](CLI::App* c) {
    c->add_option("--moments", opt.moments, "closed|quad|mc:<draws>");
  };

  auto* mle = app.add_subcommand("mle", "Maximum likelihood estimation");
  mle->require_subcommand(1);
  auto* fit = mle->add_subcommand("fit", "MLE for a data file");
  add_model(fit);
  fit->add_option("--data", opt.data, "CSV with one observation per row")->required();
  auto* simdist = mle->add_subcommand("simdist", "Empirical MLE CDF by simulation");
  add_model(simdist);
  simdist->add_option("--theta-star", opt.theta_star)->required();
  simdist->add_option("--n", opt.n)->required()->check(CLI::PositiveNumber);
  simdist->add_option("--reps", opt.reps)->check(CLI::PositiveNumber);
  simdist->add_option("--seed", opt.seed);
  add_out(simdist);

  auto* asymp = app.add_subcommand("asymp", "Asymptotic approximations");
  asymp->require_subcommand(1);
  auto* curve = asymp->add_subcommand("curve", "CDF approximation on a grid");
  add_model(curve);
  curve->add_option("--method", opt.method)
      ->check(CLI::IsMember({"refined", "normal", "edgeworth", "exact"}));
  curve->add_option("--theta-star", opt.theta_star)->required();
  curve->add_option("--n", opt.n)->required()->check(CLI::PositiveNumber);
  curve->add_option("--grid", opt.grid, "lo:hi:steps")->required();
  curve->add_option("--seed", opt.seed, "Seed for mc moments");
  add_moments(curve);
  add_out(curve);

  auto* wlb = app.add_subcommand("wlb", "Weighted likelihood bootstrap");
  wlb->require_subcommand(1);
  for (const char* kind : {"exact", "approx", "fisher"}) {
    auto* c = wlb->add_subcommand(kind, std::string("WLB CDF: ") + kind);
    add_model(c);
    c->add_option("--data", opt.data)->required();
    c->add_option("--grid", opt.grid, "lo:hi:steps")->required();
    c->add_option("--seed", opt.seed, "Seed for mc moments");
    add_moments(c);
    add_out(c);
    c->callback([&opt, kind] { wlb_curve(opt, kind); });
  }
  auto* sample = wlb->add_subcommand("sample", "WLB draws");
  auto* match = wlb->add_subcommand("match", "Probability-matching draws");
  for (auto* c : {sample, match}) {
    add_model(c);
    c->add_option("--data", opt.data)->required();
    c->add_option("--draws", opt.draws)->check(CLI::PositiveNumber);
    c->add_option("--seed", opt.seed);
    add_out(c);
  }
  add_moments(match);

  fit->callback([&] { mle_fit(opt); });
  simdist->callback([&] { mle_simdist(opt); });
  curve->callback([&] { asymp_curve(opt); });
  sample->callback([&] { wlb_sample_cmd(opt); });
  match->callback([&] { wlb_match(opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
