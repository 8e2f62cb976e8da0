#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoapilot/assignment.hpp"
#include "aoapilot/random.hpp"
#include "aoapilot/world.hpp"

namespace aoapilot {

struct RewardThresholds {
  double g1 = 0.0;
  double g2 = 0.0;
};

enum class CalibrationSource {
  kFreshDrops,    // random assignments on freshly drawn worlds
  kCurrentWorld,  // random assignments on the world being optimized
};

// Empirical q_low / q_high quantiles of the global max cost over `samples`
// random assignments. A quantile equal to a sampled cost moves halfway to the
// next distinct sample. When both land on the same cost g2 moves up one more
// distinct value. If all samples are equal they all fall in the low band.
RewardThresholds calibrate_thresholds(const ScenarioBundle& world, int samples, double q_low,
                                      double q_high, RandomStream& rng,
                                      CalibrationSource source = CalibrationSource::kFreshDrops);

enum class Band { kLow = 0, kMid = 1, kHigh = 2 };

// Middle band closed: g1 <= g <= g2.
Band band(double g, const RewardThresholds& t);

struct RewardComponents {
  int r1 = 0;
  int r2 = 0;
  int r3 = 0;
  int total() const { return r1 + r2 + r3; }
};

RewardComponents reward_components(double g_prev, double g_next, bool action_taken,
                                   const RewardThresholds& t);

struct EnvState {
  PilotAssignment assignment;
  std::vector<double> cell_max_costs;
  int last_pilot = -1;  // -1 before the first action
  int last_cell = -1;
  int worst_pilot = 0;
  int worst_cell = 0;
};

// Feature layout: L*K*K one-hot permutation rows, L cost features G_[j]/g2,
// one-hot last pilot (K), last cell (L), worst pilot (K), worst cell (L).
int encoded_size(int L, int K);
std::vector<double> encode_state(const EnvState& state, const RewardThresholds& t);

// Actions are indexed cell-major: index = cell * K + pilot.
int action_count(int L, int K);
SwapAction decode_action(int index, int K, int target_pilot);

enum class WorldEvolution {
  kNone,        // nothing changes between steps
  kSmallScale,  // geometry fixed, new small-scale realization each step
  kPositions,   // fresh user drop every drop_period steps
};

struct EnvConfig {
  WorldEvolution evolution = WorldEvolution::kPositions;
  int drop_period = 1;
  double q_low = 0.3;
  double q_high = 0.7;
  int calibration_samples = 1000;
  CalibrationSource calibration = CalibrationSource::kFreshDrops;
};

// Drop index in effect at time step n.
std::uint64_t drop_index_at(const EnvConfig& config, std::uint64_t n);

struct StepOutcome {
  EnvState next_state;
  RewardComponents components;
  int reward = 0;
  double g_prev = 0.0;
  double g_next = 0.0;
  double global_max_before = 0.0;
  double global_max_after = 0.0;
  bool action_taken = false;
};

// Sequential MDP over pilot swaps. The world of time step n is
// make_world(config, seed, drop_index(n)).
class PilotEnv {
 public:
  PilotEnv(SystemConfig config, EnvConfig env_config, RewardThresholds thresholds,
           std::uint64_t seed);

  void reset(const PilotAssignment& initial);
  StepOutcome step(int action_index);

  const EnvState& state() const { return state_; }
  const CostTable& costs() const { return costs_; }
  const ScenarioBundle& world() const { return world_; }
  const RewardThresholds& thresholds() const { return thresholds_; }
  std::uint64_t time_step() const { return time_; }
  std::uint64_t drop_index() const { return drop_index_; }

  // Drop index in effect at time step n.
  std::uint64_t drop_index_at(std::uint64_t n) const;

 private:
  void refresh_state();

  SystemConfig config_;
  EnvConfig env_config_;
  RewardThresholds thresholds_;
  std::uint64_t seed_;
  std::uint64_t time_ = 0;
  std::uint64_t drop_index_ = 0;
  ScenarioBundle world_;
  EnvState state_;
  CostTable costs_;
};

}  // namespace aoapilot
