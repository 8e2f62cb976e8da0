#pragma once

#include <cstdint>
#include <vector>

#include "aoapilot/scenario.hpp"

namespace aoapilot {

// One user drop with every (BS, user) large-scale quantity and the full
// pairwise contamination table precomputed.
class ScenarioBundle {
 public:
  ScenarioBundle(SystemConfig config, CellLayout layout, UserDrop drop);

  const SystemConfig& config() const { return config_; }
  const CellLayout& layout() const { return layout_; }
  const UserDrop& drop() const { return drop_; }
  int L() const { return config_.L; }
  int K() const { return config_.K; }

  // User `user` of cell `cell` as seen from BS `bs`.
  const AoAInterval& interval(int bs, int cell, int user) const {
    return intervals_[index(bs, cell, user)];
  }
  double gain(int bs, int cell, int user) const { return gains_[index(bs, cell, user)]; }

  // Cost inflicted on user `user` of cell j (seen from BS j) by user
  // `other` of cell l sharing its pilot.
  double pair_cost(int j, int user, int l, int other) const {
    return pair_costs_[((static_cast<std::size_t>(j) * K() + user) * L() + l) * K() + other];
  }

  // Order-sensitive hash of the geometry, used to show that methods saw the
  // same world stream.
  std::uint64_t digest() const;

 private:
  std::size_t index(int bs, int cell, int user) const {
    return (static_cast<std::size_t>(bs) * L() + cell) * K() + user;
  }

  SystemConfig config_;
  CellLayout layout_;
  UserDrop drop_;
  std::vector<AoAInterval> intervals_;
  std::vector<double> gains_;
  std::vector<double> pair_costs_;
};

// The world of drop `drop_index` for a master seed; a pure function of its
// arguments.
ScenarioBundle make_world(const SystemConfig& config, std::uint64_t seed,
                          std::uint64_t drop_index = 0);

}  // namespace aoapilot
