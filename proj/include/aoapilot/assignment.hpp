#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoapilot/random.hpp"
#include "aoapilot/world.hpp"

namespace aoapilot {

// Per-cell bijection pilot -> user (all indices 0-based).
class PilotAssignment {
 public:
  PilotAssignment() = default;
  PilotAssignment(int L, int K);  // identity in every cell

  static PilotAssignment from_users(int L, int K, std::vector<int> user_of_pilot);

  int L() const { return L_; }
  int K() const { return K_; }
  int user(int cell, int pilot) const { return user_of_[cell * K_ + pilot]; }
  int pilot(int cell, int user) const { return pilot_of_[cell * K_ + user]; }

  void swap_pilots(int cell, int pilot_a, int pilot_b);
  void set_cell(int cell, const std::vector<int>& users_by_pilot);

  // Checks that every cell holds a permutation and the inverse agrees.
  bool valid() const;

  friend bool operator==(const PilotAssignment&, const PilotAssignment&) = default;

 private:
  int L_ = 0;
  int K_ = 0;
  std::vector<int> user_of_;
  std::vector<int> pilot_of_;
};

// Plain-text matrix: L rows, K integers each (user index per pilot).
void write_assignment(std::ostream& os, const PilotAssignment& a);
PilotAssignment read_assignment(std::istream& is);

// Swap pilots `pilot` and `other_pilot` between the two users of `cell` that
// hold them; equal pilots make the action a no-op.
struct SwapAction {
  int cell = 0;
  int pilot = 0;
  int other_pilot = 0;

  bool no_op() const { return pilot == other_pilot; }
};

PilotAssignment apply_swap(const PilotAssignment& assignment, const SwapAction& action);

PilotAssignment random_assignment(int L, int K, RandomStream& rng);

// Pairwise, per-user and per-cell contamination costs of one assignment.
struct CostTable {
  int L = 0;
  int K = 0;
  std::vector<double> pair_costs;  // [(j * K + k) * L + l], zero for l == j
  std::vector<double> user_costs;  // [j * K + k], indexed by pilot
  std::vector<double> cell_max;    // [j]
  double global_max = 0.0;
  int worst_pilot = 0;
  int worst_cell = 0;

  double pair(int j, int k, int l) const { return pair_costs[(j * K + k) * L + l]; }
  double user(int j, int k) const { return user_costs[j * K + k]; }
};

CostTable total_costs(const PilotAssignment& assignment, const ScenarioBundle& world);

// Only the min-max objective; allocation-free for search loops.
double global_max_cost(const PilotAssignment& assignment, const ScenarioBundle& world);

struct SearchResult {
  PilotAssignment assignment;
  CostTable costs;
  std::uint64_t evaluated = 0;
};

// Number of assignments exhaustive_search visits: (K!)^(L-1).
double exhaustive_size(int L, int K);

// Cell 0 fixed to the identity; cells 1..L-1 enumerated in lexicographic
// permutation order. Throws BudgetExceeded above `budget` assignments.
SearchResult exhaustive_search(const ScenarioBundle& world, double budget = 1e8);

// General pilot map used by the SPR-like baseline, where edge users hold
// cluster-wide orthogonal pilots: pilot_of[l * K + u] in [0, pilot_count).
struct PilotMap {
  int L = 0;
  int K = 0;
  int pilot_count = 0;
  std::vector<int> pilot_of;

  int pilot(int cell, int user) const { return pilot_of[cell * K + user]; }
  static PilotMap from_assignment(const PilotAssignment& a);
};

// Global max cost for an arbitrary pilot map (users on distinct pilots do
// not contaminate each other).
double global_max_cost(const PilotMap& map, const ScenarioBundle& world);

struct OverheadReport {
  int base_pilots = 0;
  int central_pilots = 0;
  int edge_pilots_per_cell = 0;
  int required_pilots = 0;
  double extra_percent = 0.0;  // (required - base) / base
  double total_percent = 0.0;  // required / base
  std::string convention;      // which figure matches the reported overhead
  double overhead_factor() const {
    return base_pilots > 0 ? static_cast<double>(required_pilots) / base_pilots : 1.0;
  }
};

// Counting only, no geometry: K_edge = round(K * r / (1 + r)).
OverheadReport spr_overhead(int L, int K, double edge_ratio);

struct SprAssignment {
  PilotMap map;
  std::vector<bool> edge;  // [l * K + u]
  OverheadReport overhead;
};

// Soft-pilot-reuse-like baseline: the K_edge users farthest from their BS in
// each cell take cluster-wide orthogonal pilots; central users share the
// remaining pilots, ordered by distance.
SprAssignment spr_like_assignment(const ScenarioBundle& world, double edge_ratio);

}  // namespace aoapilot
