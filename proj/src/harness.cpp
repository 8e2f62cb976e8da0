#include "aoapilot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "aoapilot/csv.hpp"
#include "aoapilot/errors.hpp"
#include "aoapilot/rate.hpp"
#include "aoapilot/trainer.hpp"

namespace aoapilot {

namespace fs = std::filesystem;

RewardSeries reward_series(const std::vector<int>& rewards, int window) {
  RewardSeries s;
  s.reward.assign(rewards.begin(), rewards.end());
  s.short_term = moving_average(s.reward, window);
  std::vector<double> negative(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) negative[i] = rewards[i] < 0 ? 1.0 : 0.0;
  s.negative_ratio_short = moving_average(negative, window);
  double sum = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    sum += s.reward[i];
    neg += negative[i];
    s.long_term.push_back(sum / static_cast<double>(i + 1));
    s.negative_ratio.push_back(neg / static_cast<double>(i + 1));
  }
  return s;
}

const MethodSeries* ExperimentResult::find(Method m) const {
  for (const MethodSeries& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class WorldCache {
 public:
  WorldCache(const ExperimentConfig& c, std::uint64_t seed) : config_(c), seed_(seed) {}

  const ScenarioBundle& at(std::uint64_t drop) {
    auto it = worlds_.find(drop);
    if (it == worlds_.end()) it = worlds_.emplace(drop, make_world(config_.system, seed_, drop)).first;
    return it->second;
  }

 private:
  const ExperimentConfig& config_;
  std::uint64_t seed_;
  std::map<std::uint64_t, ScenarioBundle> worlds_;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                                const std::optional<fs::path>& out) {
  config.validate();
  const SystemConfig& sys = config.system;
  const int L = sys.L;
  const int K = sys.K;
  const std::uint64_t steps = config.steps;

  ExperimentResult result;
  result.config = config;
  result.seed = seed;
  result.overhead = spr_overhead(L, K, config.edge_ratio);

  WorldCache worlds(config, seed);
  auto world_at_step = [&](std::uint64_t n) -> const ScenarioBundle& {
    return worlds.at(drop_index_at(config.env, n + 1));
  };

  {
    RandomStream calib = RandomStream::derive(seed, StreamId::kCalibration);
    result.thresholds = calibrate_thresholds(worlds.at(0), config.env.calibration_samples,
                                             config.env.q_low, config.env.q_high, calib,
                                             config.env.calibration);
  }

  if (out) fs::create_directories(*out);
  std::ofstream training_log;
  std::ofstream trajectory;
  const bool run_drl = std::find(config.methods.begin(), config.methods.end(), Method::kDrl) !=
                       config.methods.end();
  if (out && run_drl) {
    training_log = open_out(*out / "training_log.csv");
    trajectory = open_out(*out / "trajectory.csv");
    write_training_header(training_log);
    write_trajectory_header(trajectory);
  }

  // Pilot map in force after each step, per method.
  std::vector<std::vector<PilotMap>> maps(config.methods.size());
  const double budget = config.long_run ? std::numeric_limits<double>::infinity()
                                        : config.exhaustive_budget;

  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    const Method method = config.methods[mi];
    MethodSeries series;
    series.method = method;
    std::vector<PilotMap>& m = maps[mi];
    m.reserve(steps);
    auto note_world = [&](std::uint64_t drop, const ScenarioBundle& w) {
      if (series.world_digests.empty() || series.world_digests.back().first != drop) {
        series.world_digests.emplace_back(drop, w.digest());
      }
    };
    try {
      switch (method) {
        case Method::kDrl: {
          PilotEnv env(sys, config.env, result.thresholds, seed);
          RandomStream init = RandomStream::derive(seed, StreamId::kEnv);
          env.reset(random_assignment(L, K, init));
          DqnAgent agent(encoded_size(L, K), action_count(L, K), config.schedule, seed);
          train(env, agent, steps, [&](const TrainingRow& row) {
            m.push_back(PilotMap::from_assignment(row.outcome.next_state.assignment));
            series.global_max_cost.push_back(row.outcome.global_max_after);
            result.rewards.push_back(row.outcome.reward);
            note_world(env.drop_index(), env.world());
            if (out) {
              write_training_row(training_log, row);
              write_trajectory_row(trajectory, row);
            }
          });
          if (out) {
            std::ofstream ck = open_out(*out / "checkpoint.txt");
            agent.save(ck);
          }
          break;
        }
        case Method::kExhaustive: {
          std::map<std::uint64_t, SearchResult> cache;
          for (std::uint64_t n = 0; n < steps; ++n) {
            const std::uint64_t drop = drop_index_at(config.env, n + 1);
            const ScenarioBundle& w = worlds.at(drop);
            auto it = cache.find(drop);
            if (it == cache.end()) it = cache.emplace(drop, exhaustive_search(w, budget)).first;
            m.push_back(PilotMap::from_assignment(it->second.assignment));
            series.global_max_cost.push_back(it->second.costs.global_max);
            note_world(drop, w);
          }
          result.exhaustive_optimum = series.global_max_cost;
          break;
        }
        case Method::kRandom: {
          for (std::uint64_t n = 0; n < steps; ++n) {
            const std::uint64_t drop = drop_index_at(config.env, n + 1);
            const ScenarioBundle& w = worlds.at(drop);
            RandomStream rng = RandomStream::derive(seed, StreamId::kRandomBaseline, n);
            const PilotAssignment a = random_assignment(L, K, rng);
            m.push_back(PilotMap::from_assignment(a));
            series.global_max_cost.push_back(global_max_cost(a, w));
            note_world(drop, w);
          }
          break;
        }
        case Method::kSprLike: {
          std::map<std::uint64_t, SprAssignment> cache;
          for (std::uint64_t n = 0; n < steps; ++n) {
            const std::uint64_t drop = drop_index_at(config.env, n + 1);
            const ScenarioBundle& w = worlds.at(drop);
            auto it = cache.find(drop);
            if (it == cache.end()) it = cache.emplace(drop, spr_like_assignment(w, config.edge_ratio)).first;
            m.push_back(it->second.map);
            series.global_max_cost.push_back(global_max_cost(it->second.map, w));
            series.overhead_factor = it->second.overhead.overhead_factor();
            note_world(drop, w);
          }
          break;
        }
      }
    } catch (const BudgetExceeded& e) {
      series.ok = false;
      series.status = std::string("skipped: ") + e.what();
    } catch (const NumericFailure& e) {
      series.ok = false;
      series.status = std::string("failed: ") + e.what();
    }
    if (!series.ok) {
      m.clear();
      series.global_max_cost.clear();
      if (method == Method::kDrl) result.rewards.clear();
      if (method == Method::kExhaustive) result.exhaustive_optimum.clear();
    }
    result.methods.push_back(std::move(series));
  }

  // Minimum rate per step with common random numbers: every method sees the
  // same channel and pilot-noise draws.
  int max_pilots = K;
  for (const auto& m : maps) {
    if (!m.empty()) max_pilots = std::max(max_pilots, m.front().pilot_count);
  }
  const double noise_var = pilot_noise_variance(sys, config.rate.pilot_snr_db);
  std::vector<std::vector<double>> acc(maps.size());
  for (std::uint64_t n = 0; n < steps; ++n) {
    const ScenarioBundle& w = world_at_step(n);
    RandomStream rng = RandomStream::derive(seed, StreamId::kChannel, n);
    for (auto& a : acc) a.assign(static_cast<std::size_t>(L) * K, 0.0);
    for (int r = 0; r < config.rate_realizations; ++r) {
      const ChannelSet channels = generate_channels(w, config.channel, rng);
      const PilotNoise noise = generate_pilot_noise(L, sys.M, max_pilots, noise_var, rng);
      for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        if (maps[mi].empty()) continue;
        const std::vector<double> sinr = uplink_sinr(channels, maps[mi][n], noise, sys.sigma2);
        for (std::size_t i = 0; i < sinr.size(); ++i) {
          acc[mi][i] += config.rate.rate_of_mean ? sinr[i] : std::log2(1.0 + sinr[i]);
        }
      }
    }
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
      if (maps[mi].empty()) continue;
      for (double& a : acc[mi]) {
        a /= config.rate_realizations;
        if (config.rate.rate_of_mean) a = std::log2(1.0 + a);
      }
      const RateReport report = summarize_rates(acc[mi], L, K, config.rate_realizations,
                                                static_cast<double>(maps[mi][n].pilot_count) / K);
      result.methods[mi].min_rate.push_back(report.min_rate);
      result.methods[mi].overhead_factor = report.overhead_factor;
    }
  }

  if (!out) return result;

  {
    std::ofstream os = open_out(*out / "rates.csv");
    os << "method,seed,step,min_rate,overhead_factor\n";
    for (const MethodSeries& s : result.methods) {
      for (std::size_t n = 0; n < s.min_rate.size(); ++n) {
        os << method_name(s.method) << ',' << seed << ',' << n << ',' << csv_number(s.min_rate[n])
           << ',' << csv_number(s.overhead_factor) << '\n';
      }
    }
  }
  {
    std::ofstream os = open_out(*out / "rate_series.csv");
    os << "method,step,min_rate,min_rate_ma\n";
    for (const MethodSeries& s : result.methods) {
      const std::vector<double> ma = moving_average(s.min_rate, config.window);
      for (std::size_t n = 0; n < s.min_rate.size(); ++n) {
        os << method_name(s.method) << ',' << n << ',' << csv_number(s.min_rate[n]) << ','
           << csv_number(ma[n]) << '\n';
      }
    }
  }
  {
    std::ofstream os = open_out(*out / "costs.csv");
    os << "method,step,global_max_cost,global_max_cost_ma\n";
    for (const MethodSeries& s : result.methods) {
      const std::vector<double> ma = moving_average(s.global_max_cost, config.window);
      for (std::size_t n = 0; n < s.global_max_cost.size(); ++n) {
        os << method_name(s.method) << ',' << n << ',' << csv_number(s.global_max_cost[n]) << ','
           << csv_number(ma[n]) << '\n';
      }
    }
  }
  if (!result.rewards.empty()) {
    const RewardSeries rs = reward_series(result.rewards, config.window);
    std::ofstream os = open_out(*out / "rewards.csv");
    os << "step,reward,short_term,long_term,negative_ratio,negative_ratio_short\n";
    for (std::size_t n = 0; n < rs.reward.size(); ++n) {
      os << n << ',' << result.rewards[n] << ',' << csv_number(rs.short_term[n]) << ','
         << csv_number(rs.long_term[n]) << ',' << csv_number(rs.negative_ratio[n]) << ','
         << csv_number(rs.negative_ratio_short[n]) << '\n';
    }
  }
  {
    std::ofstream os = open_out(*out / "overhead.csv");
    const OverheadReport& o = result.overhead;
    os << "field,value\n"
       << "base_pilots," << o.base_pilots << '\n'
       << "central_pilots," << o.central_pilots << '\n'
       << "edge_pilots_per_cell," << o.edge_pilots_per_cell << '\n'
       << "required_pilots," << o.required_pilots << '\n'
       << "extra_percent," << csv_number(o.extra_percent) << '\n'
       << "total_percent," << csv_number(o.total_percent) << '\n'
       << "convention," << o.convention << '\n';
  }
  {
    std::ofstream os = open_out(*out / "worlds.csv");
    os << "method,drop_index,world_digest\n";
    for (const MethodSeries& s : result.methods) {
      for (const auto& [drop, digest] : s.world_digests) {
        os << method_name(s.method) << ',' << drop << ',' << hex(digest) << '\n';
      }
    }
  }
  {
    std::ofstream os = open_out(*out / "config.ini");
    os << dump_config(config);
  }
  {
    std::ofstream os = open_out(*out / "manifest.csv");
    os << "key,value\n"
       << "version," << kVersion << '\n'
       << "preset," << config.name << '\n'
       << "seed," << seed << '\n'
       << "config_hash," << hex(config_hash(config)) << '\n'
       << "steps," << steps << '\n'
       << "g1," << csv_number(result.thresholds.g1) << '\n'
       << "g2," << csv_number(result.thresholds.g2) << '\n';
    for (const MethodSeries& s : result.methods) {
      os << "status_" << method_name(s.method) << ',' << s.status << '\n';
    }
    os << "files,config.ini;costs.csv;rates.csv;rate_series.csv;overhead.csv;worlds.csv";
    if (run_drl && !result.rewards.empty()) os << ";rewards.csv;training_log.csv;trajectory.csv;checkpoint.txt";
    os << '\n';
  }
  return result;
}

void emit_plot_data(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("results directory " + dir.string() + " does not exist");
  const fs::path rates = dir / "rate_series.csv";
  const fs::path rewards = dir / "rewards.csv";
  const bool have_rates = fs::exists(rates);
  const bool have_rewards = fs::exists(rewards);
  if (!have_rates && !have_rewards) {
    throw ConfigError("no results in " + dir.string() + " (expected rate_series.csv or rewards.csv)");
  }
  std::vector<std::string> warnings;

  if (have_rates) {
    const CsvTable t = read_csv(rates);
    const int c_method = t.column("method");
    const int c_step = t.column("step");
    const int c_ma = t.column("min_rate_ma");
    if (c_method < 0 || c_step < 0 || c_ma < 0) throw ConfigError("malformed rate_series.csv");
    std::ofstream os = open_out(dir / "fig2.csv");
    os << "step,series,value\n";
    for (const auto& row : t.rows) {
      os << row[c_step] << ',' << row[c_method] << "_min_rate_ma," << row[c_ma] << '\n';
    }
  } else {
    warnings.push_back("fig2 omitted: rate_series.csv missing");
  }

  if (have_rewards) {
    const CsvTable t = read_csv(rewards);
    std::ofstream os = open_out(dir / "fig3.csv");
    os << "step,series,value\n";
    const int c_step = t.column("step");
    if (c_step < 0) throw ConfigError("malformed rewards.csv");
    for (const char* name : {"reward", "short_term", "long_term", "negative_ratio"}) {
      const int c = t.column(name);
      if (c < 0) {
        warnings.push_back(std::string("fig3 series ") + name + " missing");
        continue;
      }
      for (const auto& row : t.rows) os << row[c_step] << ',' << name << ',' << row[c] << '\n';
    }
  } else {
    warnings.push_back("fig3 omitted: rewards.csv missing (no DRL run)");
  }

  if (!warnings.empty()) {
    std::ofstream os(dir / "manifest.csv", std::ios::app);
    for (const std::string& w : warnings) {
      os << "warning," << w << '\n';
      std::cerr << "warning: " << w << '\n';
    }
  }
}

}  // namespace aoapilot
