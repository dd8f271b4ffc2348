#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mledist/moments.hpp"

namespace mledist {

/// Overrides for a named experiment; unset fields take the experiment default.
struct ExperimentConfig {
  std::optional<std::size_t> n;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> draws;
  std::optional<std::string> moments;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "repro_out";
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string id;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> csv_paths;
  /// Every entry is recomputable from the emitted CSVs.
  std::map<std::string, double> summary;
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> config;
  double wall_clock_s = 0.0;

  bool passed() const;
};

/// fig1 fig2 fig3 wlb-beta wlb-jeffreys probmatch
const std::vector<std::string>& experiment_ids();

/// Seed used by experiment `id` under master seed `seed`.
std::uint64_t experiment_seed(std::uint64_t seed, const std::string& id);

/// Exponential model, n = 10, theta* = 1: refined, normal and exact curves.
ExperimentReport run_fig1(const ExperimentConfig& config);
/// Fisk, n = 10, theta* = 2: empirical MLE CDF vs refined curve (MC moments).
ExperimentReport run_fig2(const ExperimentConfig& config);
/// Skew-normal pivots; n from the config, else each of 15, 25, 100.
ExperimentReport run_fig3(const ExperimentConfig& config);
/// Power model on beta(2,1) data, n = 10: exact WLB CDF vs sampler and oracle.
ExperimentReport run_wlb_beta(const ExperimentConfig& config);
/// Exponential model, n = 10, theta = 1/3: WLB exact density vs Jeffreys posterior.
ExperimentReport run_wlb_jeffreys(const ExperimentConfig& config);
/// gumbel_rate, n = 100, theta = log 3: probability matching vs WLB draws.
ExperimentReport run_probmatch(const ExperimentConfig& config);

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config);

/// Every experiment, in experiment_ids() order; writes manifest.json to out_dir.
std::vector<ExperimentReport> run_all(const ExperimentConfig& config, bool parallel = false);

std::string manifest_json(const std::vector<ExperimentReport>& reports,
                          const ExperimentConfig& config);

}  // namespace mledist
