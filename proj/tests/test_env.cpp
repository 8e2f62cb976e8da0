#include <doctest.h>

#include <algorithm>

#include "aoapilot/env.hpp"
#include "aoapilot/errors.hpp"
#include "support.hpp"

using namespace aoapilot;

namespace {

EnvConfig static_env() {
  EnvConfig e;
  e.evolution = WorldEvolution::kNone;
  return e;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reward composition examples") {
  const RewardThresholds t{1.0, 2.0};
  RewardComponents r = reward_components(3.0, 0.5, true, t);
  CHECK(r.r1 == 1);
  CHECK(r.r2 == -1);
  CHECK(r.r3 == 2);
  CHECK(r.total() == 2);

  r = reward_components(1.5, 1.7, false, t);
  CHECK(r.r1 == 0);
  CHECK(r.r2 == 0);
  CHECK(r.r3 == 0);

  r = reward_components(0.5, 3.0, true, t);
  CHECK(r.r1 == -1);
  CHECK(r.r2 == -1);
  CHECK(r.r3 == -2);
  CHECK(r.total() == -4);
}

TEST_CASE("transition table and band edges") {
  const RewardThresholds t{1.0, 2.0};
  CHECK(band(1.0, t) == Band::kMid);
  CHECK(band(2.0, t) == Band::kMid);
  CHECK(band(0.999, t) == Band::kLow);
  CHECK(band(2.001, t) == Band::kHigh);
  const double g[3] = {0.5, 1.5, 2.5};
  const int r3[3][3] = {{0, -1, -2}, {1, 0, -1}, {2, 1, 0}};  // [before][after]
  const int r1[3] = {1, 0, -1};
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      for (bool acted : {false, true}) {
        const RewardComponents r = reward_components(g[b], g[a], acted, t);
        CHECK(r.r3 == r3[b][a]);
        CHECK(r.r1 == r1[a]);
        CHECK(r.r2 == (acted ? -1 : 0));
        CHECK(r.total() >= -4);
        CHECK(r.total() <= 3);
      }
    }
  }
}

TEST_CASE("threshold calibration") {
  const ScenarioBundle w = make_world(testing::small_system(3, 3, 32), 4);
  RandomStream a(1);
  RandomStream b(1);
  const RewardThresholds ends = calibrate_thresholds(w, 500, 0.0, 1.0, a, CalibrationSource::kCurrentWorld);
  std::vector<double> g;
  for (int i = 0; i < 500; ++i) g.push_back(global_max_cost(random_assignment(3, 3, b), w));
  std::sort(g.begin(), g.end());
  const double lo = g.front();
  const double next = *std::find_if(g.begin(), g.end(), [&](double v) { return v > lo * (1 + 1e-9); });
  // The minimum is an attained cost, so g1 sits halfway to the next one.
  CHECK(ends.g1 == doctest::Approx(0.5 * (lo + next)).epsilon(1e-12));
  CHECK(band(lo, ends) == Band::kLow);
  CHECK(band(next, ends) == Band::kMid);
  CHECK(ends.g2 == g.back());

  // With q_low = 0 the exhaustive optimum lands in the low band.
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const ScenarioBundle world = make_world(testing::small_system(3, 3, 32), seed);
    RandomStream r(seed);
    const RewardThresholds t = calibrate_thresholds(world, 1000, 0.0, 0.5, r, CalibrationSource::kCurrentWorld);
    CHECK(band(exhaustive_search(world).costs.global_max, t) == Band::kLow);
  }

  RandomStream rng(2);
  CHECK_THROWS_AS(calibrate_thresholds(w, 99, 0.3, 0.7, rng), ConfigError);
  CHECK_THROWS_AS(calibrate_thresholds(w, 100, 0.7, 0.3, rng), ConfigError);

  for (int seed = 0; seed < 100; ++seed) {
    const ScenarioBundle world = make_world(testing::small_system(2, 2, 16), seed);
    RandomStream r(seed);
    const RewardThresholds t = calibrate_thresholds(world, 100, 0.3, 0.7, r, CalibrationSource::kCurrentWorld);
    CHECK(t.g2 > t.g1);
    CHECK(t.g1 > 0.0);
  }
  const ScenarioBundle lonely = make_world(testing::small_system(1, 2, 16), 1);
  RandomStream r(3);
  const RewardThresholds t = calibrate_thresholds(lonely, 100, 0.3, 0.7, r);
  CHECK(t.g2 > t.g1);
  CHECK(t.g1 > 0.0);
}

TEST_CASE("calibration quantiles settle with more samples") {
  const ScenarioBundle w = make_world(testing::small_system(3, 3, 32), 6);
  auto spread = [&](int samples) {
    std::vector<double> g1s;
    for (int rep = 0; rep < 20; ++rep) {
      RandomStream r(1000 + rep);
      g1s.push_back(calibrate_thresholds(w, samples, 0.3, 0.7, r, CalibrationSource::kCurrentWorld).g1);
    }
    double m = 0.0;
    for (double v : g1s) m += v / g1s.size();
    double var = 0.0;
    for (double v : g1s) var += (v - m) * (v - m) / g1s.size();
    return var;
  };
  CHECK(spread(2000) <= spread(100));
}

TEST_CASE("state encoding layout") {
  CHECK(encoded_size(7, 4) == 141);
  CHECK(action_count(7, 4) == 28);
  const RewardThresholds t{1.0, 2.0};
  PilotEnv env(testing::small_system(4, 3, 32), static_env(), t, 1);
  RandomStream rng(3);
  env.reset(random_assignment(4, 3, rng));
  const std::vector<double> f = encode_state(env.state(), t);
  REQUIRE(f.size() == static_cast<std::size_t>(encoded_size(4, 3)));
  for (int l = 0; l < 4; ++l) {
    double block = 0.0;
    for (int i = 0; i < 9; ++i) block += f[l * 9 + i];
    CHECK(block == 3.0);
  }
  // Last action one-hots are empty before the first step.
  for (int i = 0; i < 3 + 4; ++i) CHECK(f[36 + 4 + i] == 0.0);

  EnvState changed = env.state();
  changed.assignment.swap_pilots(2, 0, 1);
  const std::vector<double> g = encode_state(changed, t);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i < 18 || (i >= 27 && i < 36)) CHECK(f[i] == g[i]);
  }
  CHECK(f != g);
}

TEST_CASE("action decoding") {
  const SwapAction a = decode_action(7, 3, 1);
  CHECK(a.cell == 2);
  CHECK(a.other_pilot == 1);
  CHECK(a.pilot == 1);
  CHECK(a.no_op());
  CHECK_FALSE(decode_action(6, 3, 1).no_op());
}

TEST_CASE("no-op on a static world keeps the cost") {
  const RewardThresholds t{1.0, 1e9};
  PilotEnv env(testing::small_system(3, 3, 32), static_env(), t, 2);
  const int k = env.state().worst_pilot;
  const StepOutcome out = env.step(0 * 3 + k);
  CHECK_FALSE(out.action_taken);
  CHECK(out.g_next == out.g_prev);
  CHECK(out.reward == 0);
  CHECK_THROWS_AS(env.step(9), ConfigError);
}

TEST_CASE("state stays consistent with the cost table") {
  const SystemConfig sys = testing::small_system(3, 3, 32);
  EnvConfig e;
  e.evolution = WorldEvolution::kPositions;
  e.drop_period = 7;
  PilotEnv env(sys, e, {1.0, 5.0}, 3);
  RandomStream rng(4);
  for (int n = 0; n < 10000; ++n) {
    const StepOutcome out = env.step(rng.uniform_int(0, 8));
    const CostTable t = total_costs(out.next_state.assignment, env.world());
    REQUIRE(out.next_state.worst_cell == t.worst_cell);
    REQUIRE(out.next_state.worst_pilot == t.worst_pilot);
    REQUIRE(out.global_max_after == t.global_max);
    REQUIRE(out.reward == out.components.total());
    REQUIRE(out.reward >= -4);
    REQUIRE(out.reward <= 3);
  }
  CHECK(env.drop_index() == 10000 / 7);
}

TEST_CASE("replayed actions give the same trajectory") {
  const SystemConfig sys = testing::small_system(3, 3, 32);
  EnvConfig e;
  e.drop_period = 3;
  PilotEnv a(sys, e, {1.0, 5.0}, 8);
  PilotEnv b(sys, e, {1.0, 5.0}, 8);
  RandomStream rng(5);
  for (int n = 0; n < 200; ++n) {
    const int act = rng.uniform_int(0, 8);
    const StepOutcome x = a.step(act);
    const StepOutcome y = b.step(act);
    REQUIRE(x.reward == y.reward);
    REQUIRE(x.global_max_after == y.global_max_after);
    REQUIRE(x.next_state.assignment == y.next_state.assignment);
  }
}

TEST_CASE("best single action never increases the cost when an improvement exists") {
  const SystemConfig sys = testing::small_system(3, 3, 32);
  for (int seed = 0; seed < 20; ++seed) {
    PilotEnv env(sys, static_env(), {1.0, 5.0}, seed);
    RandomStream rng(seed);
    env.reset(random_assignment(3, 3, rng));
    for (int step = 0; step < 10; ++step) {
      const double before = env.costs().global_max;
      double best = before;
      int best_action = -1;
      for (int a = 0; a < action_count(3, 3); ++a) {
        PilotEnv probe = env;
        const double g = probe.step(a).global_max_after;
        if (g < best) {
          best = g;
          best_action = a;
        }
      }
      if (best_action < 0) break;
      CHECK(env.step(best_action).global_max_after < before);
    }
  }
}

TEST_CASE("drop schedule") {
  EnvConfig e;
  e.drop_period = 4;
  CHECK(drop_index_at(e, 0) == 0);
  CHECK(drop_index_at(e, 3) == 0);
  CHECK(drop_index_at(e, 4) == 1);
  e.evolution = WorldEvolution::kSmallScale;
  CHECK(drop_index_at(e, 400) == 0);
  CHECK_THROWS_AS(PilotEnv(testing::small_system(2, 2, 8), e, {2.0, 1.0}, 1), ConfigError);
}

}
