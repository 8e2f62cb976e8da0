#include "aoapilot/env.hpp"

#include <algorithm>
#include <cmath>

#include "aoapilot/errors.hpp"

namespace aoapilot {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Costs of a small system take a handful of discrete values. A threshold that
// lands on one of them is moved halfway to the next distinct value, so the
// value sits in the lower band regardless of summation round-off.
double off_atom(const std::vector<double>& sorted, double v) {
  const double tol = 1e-9 * std::max(1.0, std::abs(v));
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v - tol);
  if (lo == sorted.end() || *lo > v + tol) return v;
  const auto next = std::upper_bound(sorted.begin(), sorted.end(), v + tol);
  if (next == sorted.end()) return v;
  return 0.5 * (v + *next);
}

}  // namespace

RewardThresholds calibrate_thresholds(const ScenarioBundle& world, int samples, double q_low,
                                      double q_high, RandomStream& rng, CalibrationSource source) {
  if (samples < 100) throw ConfigError("threshold calibration needs at least 100 samples");
  if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) {
    throw ConfigError("calibration quantiles must satisfy 0 <= q_low < q_high <= 1");
  }
  const int L = world.L();
  const int K = world.K();
  std::vector<double> costs;
  costs.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    const PilotAssignment a = random_assignment(L, K, rng);
    if (source == CalibrationSource::kFreshDrops) {
      const ScenarioBundle fresh = make_world(world.config(), rng.engine()(), 0);
      costs.push_back(global_max_cost(a, fresh));
    } else {
      costs.push_back(global_max_cost(a, world));
    }
  }
  std::sort(costs.begin(), costs.end());
  RewardThresholds t{off_atom(costs, quantile(costs, q_low)),
                      off_atom(costs, quantile(costs, q_high))};
  if (!(t.g2 > t.g1)) {
    // Both quantiles hit the same cost: lift g2 past the next distinct one.
    const auto above = std::upper_bound(costs.begin(), costs.end(), t.g1);
    if (above != costs.end()) t.g2 = off_atom(costs, *above);
  }
  if (!(t.g2 > t.g1) || !(t.g1 > 0.0)) {
    // Every sample costs the same, so every assignment counts as good.
    const double top = costs.back();
    if (top > 0.0) {
      t.g1 = 1.05 * top;
      t.g2 = 1.1 * top;
    } else {
      // Contamination-free world (e.g. L = 1).
      t.g1 = 1e-12;
      t.g2 = 2e-12;
    }
  }
  return t;
}

Band band(double g, const RewardThresholds& t) {
  if (g < t.g1) return Band::kLow;
  if (g > t.g2) return Band::kHigh;
  return Band::kMid;
}

RewardComponents reward_components(double g_prev, double g_next, bool action_taken,
                                   const RewardThresholds& t) {
  const Band before = band(g_prev, t);
  const Band after = band(g_next, t);
  RewardComponents r;
  r.r1 = after == Band::kLow ? 1 : (after == Band::kHigh ? -1 : 0);
  r.r2 = action_taken ? -1 : 0;
  // Transition table; unlisted pairs (including same-band) score zero.
  if (after == Band::kLow && before == Band::kHigh) r.r3 = 2;
  else if (after == Band::kLow && before == Band::kMid) r.r3 = 1;
  else if (after == Band::kMid && before == Band::kHigh) r.r3 = 1;
  else if (after == Band::kMid && before == Band::kLow) r.r3 = -1;
  else if (after == Band::kHigh && before == Band::kMid) r.r3 = -1;
  else if (after == Band::kHigh && before == Band::kLow) r.r3 = -2;
  return r;
}

int encoded_size(int L, int K) { return L * K * K + L + K + L + K + L; }

std::vector<double> encode_state(const EnvState& state, const RewardThresholds& t) {
  const int L = state.assignment.L();
  const int K = state.assignment.K();
  std::vector<double> f(encoded_size(L, K), 0.0);
  std::size_t pos = 0;
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) f[pos + k * K + state.assignment.user(l, k)] = 1.0;
    pos += static_cast<std::size_t>(K) * K;
  }
  for (int l = 0; l < L; ++l) f[pos++] = state.cell_max_costs[l] / t.g2;
  auto one_hot = [&](int index, int width) {
    if (index >= 0) f[pos + index] = 1.0;
    pos += width;
  };
  one_hot(state.last_pilot, K);
  one_hot(state.last_cell, L);
  one_hot(state.worst_pilot, K);
  one_hot(state.worst_cell, L);
  return f;
}

int action_count(int L, int K) { return L * K; }

SwapAction decode_action(int index, int K, int target_pilot) {
  return {index / K, target_pilot, index % K};
}

PilotEnv::PilotEnv(SystemConfig config, EnvConfig env_config, RewardThresholds thresholds,
                   std::uint64_t seed)
    : config_(std::move(config)),
      env_config_(env_config),
      thresholds_(thresholds),
      seed_(seed),
      world_(make_world(config_, seed, 0)) {
  if (env_config_.drop_period < 1) throw ConfigError("drop_period must be >= 1");
  if (!(thresholds_.g2 > thresholds_.g1)) throw ConfigError("thresholds must satisfy g2 > g1");
  reset(PilotAssignment(config_.L, config_.K));
}

std::uint64_t drop_index_at(const EnvConfig& config, std::uint64_t n) {
  if (config.evolution != WorldEvolution::kPositions) return 0;
  return n / static_cast<std::uint64_t>(config.drop_period);
}

std::uint64_t PilotEnv::drop_index_at(std::uint64_t n) const {
  return aoapilot::drop_index_at(env_config_, n);
}

void PilotEnv::reset(const PilotAssignment& initial) {
  if (initial.L() != config_.L || initial.K() != config_.K || !initial.valid()) {
    throw ConfigError("initial assignment does not match the system dimensions");
  }
  time_ = 0;
  if (drop_index_ != 0) {
    drop_index_ = 0;
    world_ = make_world(config_, seed_, 0);
  }
  state_ = EnvState{};
  state_.assignment = initial;
  refresh_state();
}

void PilotEnv::refresh_state() {
  costs_ = total_costs(state_.assignment, world_);
  state_.cell_max_costs = costs_.cell_max;
  state_.worst_pilot = costs_.worst_pilot;
  state_.worst_cell = costs_.worst_cell;
}

StepOutcome PilotEnv::step(int action_index) {
  if (action_index < 0 || action_index >= action_count(config_.L, config_.K)) {
    throw ConfigError("action index out of range");
  }
  const int target_cell = state_.worst_cell;
  const SwapAction action = decode_action(action_index, config_.K, state_.worst_pilot);

  StepOutcome out;
  out.g_prev = costs_.cell_max[target_cell];
  out.global_max_before = costs_.global_max;
  out.action_taken = !action.no_op();

  state_.assignment.swap_pilots(action.cell, action.pilot, action.other_pilot);
  ++time_;
  const std::uint64_t next_drop = drop_index_at(time_);
  if (next_drop != drop_index_) {
    drop_index_ = next_drop;
    world_ = make_world(config_, seed_, drop_index_);
  }
  refresh_state();
  state_.last_pilot = action.other_pilot;
  state_.last_cell = action.cell;

  out.g_next = costs_.cell_max[target_cell];
  out.global_max_after = costs_.global_max;
  out.components = reward_components(out.g_prev, out.g_next, out.action_taken, thresholds_);
  out.reward = out.components.total();
  out.next_state = state_;
  return out;
}

}  // namespace aoapilot
