#include "aoapilot/world.hpp"

#include <bit>
#include <cstring>

#include "aoapilot/contamination.hpp"

namespace aoapilot {

ScenarioBundle::ScenarioBundle(SystemConfig config, CellLayout layout, UserDrop drop)
    : config_(std::move(config)), layout_(std::move(layout)), drop_(std::move(drop)) {
  const int L = config_.L;
  const int K = config_.K;
  intervals_.resize(static_cast<std::size_t>(L) * L * K);
  gains_.resize(intervals_.size());
  for (int j = 0; j < L; ++j) {
    const Position bs = layout_.bs_positions[j];
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) {
        const Position u = drop_.user(l, k);
        intervals_[index(j, l, k)] = aoa_interval(u, bs, config_.scatter_radius, config_.clamp_aoa);
        gains_[index(j, l, k)] = large_scale(u, bs, config_);
      }
    }
  }
  pair_costs_.assign(static_cast<std::size_t>(L) * K * L * K, 0.0);
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < K; ++k) {
      const AoAInterval& target = interval(j, j, k);
      const double d_target = gain(j, j, k);
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        for (int v = 0; v < K; ++v) {
          pair_costs_[((static_cast<std::size_t>(j) * K + k) * L + l) * K + v] =
              aoapilot::pair_cost(target, d_target, interval(j, l, v), config_.M, config_.spacing);
        }
      }
    }
  }
}

std::uint64_t ScenarioBundle::digest() const {
  // FNV-1a over the raw user coordinates.
  std::uint64_t h = 1469598103934665603ull;
  for (const Position& p : drop_.user_positions) {
    for (double v : {p.x, p.y}) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

ScenarioBundle make_world(const SystemConfig& config, std::uint64_t seed, std::uint64_t drop_index) {
  config.validate();
  CellLayout layout = build_layout(config);
  RandomStream rng = RandomStream::derive(seed, StreamId::kDrop, drop_index);
  UserDrop drop = drop_users(layout, config, rng);
  return ScenarioBundle(config, std::move(layout), std::move(drop));
}

}  // namespace aoapilot
