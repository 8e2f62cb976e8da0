#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aoapilot/assignment.hpp"
#include "aoapilot/config.hpp"
#include "aoapilot/env.hpp"

namespace aoapilot {

inline constexpr const char* kVersion = "aoapilot 1.0.0";

// Per-method time series over the run. Entry n describes the assignment in
// force after step n, evaluated on the world of time step n + 1.
struct MethodSeries {
  Method method = Method::kDrl;
  bool ok = true;
  std::string status = "ok";
  std::vector<double> global_max_cost;
  std::vector<double> min_rate;
  double overhead_factor = 1.0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> world_digests;  // (drop, digest)
};

struct RewardSeries {
  std::vector<double> reward;
  std::vector<double> short_term;      // trailing window mean
  std::vector<double> long_term;       // cumulative mean
  std::vector<double> negative_ratio;  // cumulative fraction of negative rewards
  std::vector<double> negative_ratio_short;
};

RewardSeries reward_series(const std::vector<int>& rewards, int window);

struct ExperimentResult {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  RewardThresholds thresholds;
  OverheadReport overhead;
  std::vector<MethodSeries> methods;
  std::vector<int> rewards;                    // DRL rewards per step
  std::vector<double> exhaustive_optimum;      // per step, empty when skipped

  const MethodSeries* find(Method m) const;
};

// Runs every configured method on the same world stream. When `out` is set,
// writes CSV results and a manifest there. A failing method is recorded and
// the others proceed.
ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                                const std::optional<std::filesystem::path>& out);

// Tidy long-format tables (step, series, value): fig2.csv with the
// moving-average min rate per method, fig3.csv with the reward series.
// Throws ConfigError when the directory holds no results.
void emit_plot_data(const std::filesystem::path& dir);

}  // namespace aoapilot
