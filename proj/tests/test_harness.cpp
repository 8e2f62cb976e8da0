#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "aoapilot/csv.hpp"
#include "aoapilot/errors.hpp"
#include "aoapilot/harness.hpp"

using namespace aoapilot;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c = desk_preset();
  c.steps = 120;
  c.env.calibration_samples = 200;
  c.schedule.batch_size = 20;
  c.schedule.replay_capacity = 50;
  c.schedule.hidden_width = 16;
  c.window = 10;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aoapilot_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("reward series") {
  const RewardSeries s = reward_series({-1, 1, 2, -2}, 2);
  CHECK(s.short_term == std::vector<double>{-1.0, 0.0, 1.5, 0.0});
  CHECK(s.long_term == std::vector<double>{-1.0, 0.0, 2.0 / 3.0, 0.0});
  CHECK(s.negative_ratio == std::vector<double>{1.0, 0.5, 1.0 / 3.0, 0.5});
  CHECK(s.negative_ratio_short == std::vector<double>{1.0, 0.5, 0.0, 0.5});
}

TEST_CASE("csv helpers") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv_number(std::nan("")) == "nan");
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  std::ofstream(dir / "t.csv") << "a,b\n1,2\n3,4\n";
  const CsvTable t = read_csv(dir / "t.csv");
  CHECK(t.column("b") == 1);
  CHECK(t.column("c") == -1);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
}

TEST_CASE("experiment writes every table and shares the world stream") {
  const fs::path out = scratch("run");
  const ExperimentResult r = run_experiment(tiny(), 3, out);
  for (const char* f : {"costs.csv", "rates.csv", "rate_series.csv", "rewards.csv", "overhead.csv",
                        "worlds.csv", "manifest.csv", "config.ini", "training_log.csv",
                        "trajectory.csv", "checkpoint.txt"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  REQUIRE(r.methods.size() == 4);
  for (const MethodSeries& s : r.methods) {
    CHECK(s.ok);
    CHECK(s.global_max_cost.size() == 120);
    CHECK(s.min_rate.size() == 120);
    CHECK(s.world_digests == r.methods.front().world_digests);
  }
  CHECK(r.rewards.size() == 120);
  const MethodSeries* ex = r.find(Method::kExhaustive);
  REQUIRE(ex != nullptr);
  for (Method m : {Method::kDrl, Method::kRandom}) {
    const MethodSeries* s = r.find(m);
    for (std::size_t n = 0; n < 120; ++n) CHECK(s->global_max_cost[n] >= ex->global_max_cost[n]);
  }
  CHECK(r.find(Method::kSprLike)->overhead_factor == doctest::Approx(5.0 / 3.0));

  const std::string manifest = slurp(out / "manifest.csv");
  CHECK(manifest.find("config_hash,") != std::string::npos);
  CHECK(manifest.find("seed,3") != std::string::npos);

  // Stored config reproduces the run.
  const ExperimentConfig again = load_config(out / "config.ini", ExperimentConfig{});
  CHECK(config_hash(again) == config_hash(tiny()));

  emit_plot_data(out);
  const CsvTable fig2 = read_csv(out / "fig2.csv");
  std::set<std::string> series;
  for (const auto& row : fig2.rows) series.insert(row[1]);
  CHECK(series.size() >= 3);
  const CsvTable fig3 = read_csv(out / "fig3.csv");
  std::set<std::string> s3;
  for (const auto& row : fig3.rows) s3.insert(row[1]);
  CHECK(s3.size() == 4);
}

TEST_CASE("same seed gives byte-identical tables") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  ExperimentConfig c = tiny();
  c.steps = 60;
  run_experiment(c, 11, a);
  run_experiment(c, 11, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().filename().string());
  }
}

TEST_CASE("a failing method is recorded while others proceed") {
  ExperimentConfig c = tiny();
  c.steps = 20;
  c.exhaustive_budget = 10.0;
  const ExperimentResult r = run_experiment(c, 1, std::nullopt);
  const MethodSeries* ex = r.find(Method::kExhaustive);
  REQUIRE(ex != nullptr);
  CHECK_FALSE(ex->ok);
  CHECK(ex->status.find("skipped") == 0);
  CHECK(r.find(Method::kRandom)->ok);
  CHECK(r.find(Method::kRandom)->min_rate.size() == 20);
  c.long_run = true;
  CHECK(run_experiment(c, 1, std::nullopt).find(Method::kExhaustive)->ok);
}

TEST_CASE("paper preset gates the exhaustive search") {
  ExperimentConfig c = paper_preset();
  c.steps = 3;
  c.env.calibration_samples = 100;
  c.methods = {Method::kExhaustive, Method::kSprLike};
  const ExperimentResult r = run_experiment(c, 1, std::nullopt);
  CHECK_FALSE(r.find(Method::kExhaustive)->ok);
  CHECK(r.find(Method::kSprLike)->ok);
  CHECK(r.overhead.total_percent == doctest::Approx(250.0));
}

TEST_CASE("plot data needs results") {
  const fs::path empty = scratch("empty");
  fs::create_directories(empty);
  CHECK_THROWS_AS(emit_plot_data(empty), ConfigError);
  CHECK_FALSE(fs::exists(empty / "fig2.csv"));
  CHECK_THROWS_AS(emit_plot_data(scratch("missing")), ConfigError);

  ExperimentConfig c = tiny();
  c.steps = 10;
  c.methods = {Method::kRandom, Method::kSprLike};
  const fs::path out = scratch("baselines");
  run_experiment(c, 2, out);
  emit_plot_data(out);
  CHECK(fs::exists(out / "fig2.csv"));
  CHECK_FALSE(fs::exists(out / "fig3.csv"));
  CHECK(slurp(out / "manifest.csv").find("warning,fig3") != std::string::npos);
}

}
