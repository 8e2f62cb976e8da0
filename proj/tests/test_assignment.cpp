#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "aoapilot/assignment.hpp"
#include "aoapilot/contamination.hpp"
#include "aoapilot/errors.hpp"
#include "aoapilot/world.hpp"
#include "support.hpp"

using namespace aoapilot;

namespace {

// Independent brute force: enumerate every cell (including cell 0) with
// nested permutations.
double brute_force_min(const ScenarioBundle& w) {
  const int L = w.L();
  const int K = w.K();
  std::vector<std::vector<int>> perms;
  std::vector<int> p(K);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  double best = 1e300;
  std::vector<std::size_t> idx(L, 0);
  while (true) {
    std::vector<int> users;
    for (int l = 0; l < L; ++l) users.insert(users.end(), perms[idx[l]].begin(), perms[idx[l]].end());
    const PilotAssignment a = PilotAssignment::from_users(L, K, users);
    double worst = 0.0;
    for (int j = 0; j < L; ++j) {
      for (int k = 0; k < K; ++k) {
        double s = 0.0;
        for (int l = 0; l < L; ++l) {
          if (l != j) s += w.pair_cost(j, a.user(j, k), l, a.user(l, k));
        }
        worst = std::max(worst, s);
      }
    }
    best = std::min(best, worst);
    int c = L - 1;
    while (c >= 0 && ++idx[c] == perms.size()) idx[c--] = 0;
    if (c < 0) break;
  }
  return best;
}

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("assignment bookkeeping") {
  PilotAssignment a(2, 3);
  CHECK(a.valid());
  a.swap_pilots(1, 0, 2);
  CHECK(a.user(1, 0) == 2);
  CHECK(a.user(1, 2) == 0);
  CHECK(a.pilot(1, 2) == 0);
  CHECK(a.valid());
  CHECK(apply_swap(a, {1, 2, 0}) == PilotAssignment(2, 3));
  CHECK(apply_swap(a, {0, 1, 1}) == a);
  CHECK(SwapAction{0, 1, 1}.no_op());
  CHECK_THROWS_AS(PilotAssignment::from_users(1, 3, {0, 0, 1}), ConfigError);
  CHECK_THROWS_AS(PilotAssignment::from_users(1, 3, {0, 1}), ConfigError);
}

TEST_CASE("assignment text round trip") {
  RandomStream rng(1);
  const PilotAssignment a = random_assignment(4, 5, rng);
  std::stringstream ss;
  write_assignment(ss, a);
  CHECK(read_assignment(ss) == a);
  std::stringstream bad("0 1\n1\n");
  CHECK_THROWS_AS(read_assignment(bad), ConfigError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_assignment(empty), ConfigError);
}

TEST_CASE("random assignments are valid and uniform") {
  RandomStream rng(2);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const PilotAssignment a = random_assignment(2, 3, rng);
    REQUIRE(a.valid());
    counts[a.user(1, 0) * 2 + (a.user(1, 1) > a.user(1, 2) ? 1 : 0)]++;
  }
  for (int c : counts) CHECK(std::abs(c - 1000) < 130);
}

TEST_CASE("cost table matches a hand-rolled loop") {
  const ScenarioBundle w = make_world(testing::small_system(3, 2, 32), 5);
  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PilotAssignment a = random_assignment(3, 2, rng);
    const CostTable t = total_costs(a, w);
    double g = 0.0;
    for (int j = 0; j < 3; ++j) {
      double cell = 0.0;
      for (int k = 0; k < 2; ++k) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) {
          if (l == j) continue;
          const double c = pair_cost(w.interval(j, j, a.user(j, k)), w.gain(j, j, a.user(j, k)),
                                     w.interval(j, l, a.user(l, k)), 32, 0.5);
          CHECK(t.pair(j, k, l) == doctest::Approx(c).epsilon(1e-14));
          s += c;
        }
        CHECK(t.user(j, k) == doctest::Approx(s).epsilon(1e-14));
        cell = std::max(cell, s);
        CHECK(s >= 0.0);
      }
      CHECK(t.cell_max[j] == doctest::Approx(cell));
      g = std::max(g, cell);
    }
    CHECK(t.global_max == doctest::Approx(g));
    CHECK(t.user(t.worst_cell, t.worst_pilot) == t.global_max);
    CHECK(global_max_cost(a, w) == t.global_max);
    CHECK(global_max_cost(PilotMap::from_assignment(a), w) == doctest::Approx(t.global_max));
  }
}

TEST_CASE("single cell has zero cost") {
  const ScenarioBundle w = make_world(testing::small_system(1, 3, 16), 1);
  const CostTable t = total_costs(PilotAssignment(1, 3), w);
  CHECK(t.global_max == 0.0);
  for (double c : t.user_costs) CHECK(c == 0.0);
  CHECK(exhaustive_search(w).evaluated == 1);
}

TEST_CASE("a swap only moves the costs of the co-pilot groups involved") {
  const ScenarioBundle w = make_world(testing::small_system(4, 4, 32), 9);
  RandomStream rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const PilotAssignment a = random_assignment(4, 4, rng);
    const int cell = rng.uniform_int(0, 3);
    const int p = rng.uniform_int(0, 3);
    const int q = rng.uniform_int(0, 3);
    const CostTable before = total_costs(a, w);
    const CostTable after = total_costs(apply_swap(a, {cell, p, q}), w);
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        if (k != p && k != q) CHECK(after.user(j, k) == before.user(j, k));
      }
    }
  }
}

TEST_CASE("exhaustive search equals brute force") {
  for (int seed = 0; seed < 6; ++seed) {
    const ScenarioBundle w = make_world(testing::small_system(3, 3, 32), 100 + seed);
    const SearchResult r = exhaustive_search(w);
    CHECK(r.evaluated == 36);
    CHECK(r.costs.global_max == doctest::Approx(brute_force_min(w)).epsilon(1e-14));
    CHECK(r.assignment.user(0, 0) == 0);
    CHECK(r.assignment.user(0, 2) == 2);
  }
  const ScenarioBundle w2 = make_world(testing::small_system(2, 4, 16), 3);
  CHECK(exhaustive_search(w2).costs.global_max == doctest::Approx(brute_force_min(w2)));
}

TEST_CASE("exhaustive search budget") {
  CHECK(exhaustive_size(3, 3) == 36.0);
  CHECK(exhaustive_size(7, 4) == doctest::Approx(std::pow(24.0, 6)));
  const ScenarioBundle w = make_world(testing::small_system(3, 3, 32), 1);
  CHECK_THROWS_AS(exhaustive_search(w, 35.0), BudgetExceeded);
  CHECK_NOTHROW(exhaustive_search(w, 36.0));
}

TEST_CASE("overhead accounting") {
  const OverheadReport r = spr_overhead(7, 4, 1.0 / 3.0);
  CHECK(r.base_pilots == 4);
  CHECK(r.edge_pilots_per_cell == 1);
  CHECK(r.central_pilots == 3);
  CHECK(r.required_pilots == 10);
  CHECK(r.extra_percent == doctest::Approx(150.0));
  CHECK(r.total_percent == doctest::Approx(250.0));
  CHECK(r.overhead_factor() == doctest::Approx(2.5));
  CHECK(r.convention.find("250") != std::string::npos);
  CHECK(spr_overhead(3, 3, 0.0).required_pilots == 3);
  CHECK_THROWS_AS(spr_overhead(3, 3, 1.0), ConfigError);
}

TEST_CASE("SPR-like map gives edge users exclusive pilots") {
  const ScenarioBundle w = make_world(testing::small_system(7, 4, 64), 2);
  const SprAssignment s = spr_like_assignment(w, 1.0 / 3.0);
  CHECK(s.map.pilot_count == 10);
  std::multiset<int> edge_pilots;
  for (int l = 0; l < 7; ++l) {
    std::set<int> in_cell;
    double far_central = 0.0;
    double near_edge = 1e9;
    for (int u = 0; u < 4; ++u) {
      const int p = s.map.pilot(l, u);
      CHECK(in_cell.insert(p).second);
      const double d = distance(w.drop().user(l, u), w.layout().bs_positions[l]);
      if (s.edge[l * 4 + u]) {
        edge_pilots.insert(p);
        CHECK(p >= 3);
        near_edge = std::min(near_edge, d);
      } else {
        CHECK(p < 3);
        far_central = std::max(far_central, d);
      }
    }
    CHECK(far_central <= near_edge);
  }
  CHECK(edge_pilots.size() == 7);
  for (int p : edge_pilots) CHECK(edge_pilots.count(p) == 1);
}

}
