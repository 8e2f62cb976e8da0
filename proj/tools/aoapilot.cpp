// Command-line front end: train, baseline, evaluate, experiment, plotdata.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "aoapilot/config.hpp"
#include "aoapilot/errors.hpp"
#include "aoapilot/harness.hpp"
#include "aoapilot/trainer.hpp"

namespace fs = std::filesystem;
using namespace aoapilot;

namespace {

struct CommonOptions {
  std::string preset = "desk";
  std::string config;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> steps;
  bool long_run = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool need_out) {
  cmd->add_option("--preset", o.preset, "paper | desk")->capture_default_str();
  cmd->add_option("--config", o.config, "INI file overriding the preset");
  cmd->add_option("--seed", o.seed, "master seed")->required();
  cmd->add_option("--steps", o.steps, "time steps");
  cmd->add_flag("--long-run", o.long_run, "lift the exhaustive-search budget");
  auto* out = cmd->add_option("--out", o.out, "output directory");
  if (need_out) out->required();
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig c = preset(o.preset);
  if (!o.config.empty()) c = load_config(o.config, c);
  if (o.steps) c.steps = *o.steps;
  if (o.long_run) c.long_run = true;
  c.validate();
  return c;
}

void print_summary(const ExperimentResult& r) {
  std::cout << kVersion << "  preset=" << r.config.name << " seed=" << r.seed
            << " steps=" << r.config.steps << " g1=" << r.thresholds.g1 << " g2=" << r.thresholds.g2
            << '\n';
  for (const MethodSeries& s : r.methods) {
    std::cout << "  " << method_name(s.method) << ": " << s.status;
    if (!s.global_max_cost.empty()) {
      std::cout << "  final_cost=" << s.global_max_cost.back();
    }
    if (!s.min_rate.empty()) {
      const std::vector<double> ma = moving_average(s.min_rate, r.config.window);
      std::cout << "  min_rate_ma=" << ma.back() << "  overhead=" << s.overhead_factor;
    }
    std::cout << '\n';
  }
}

int evaluate(const CommonOptions& o, const std::string& checkpoint) {
  const ExperimentConfig c = resolve(o);
  std::ifstream in(checkpoint);
  if (!in) throw ConfigError("cannot open checkpoint " + checkpoint);
  const DqnAgent agent = DqnAgent::load(in);
  if (agent.online().shape().input != encoded_size(c.system.L, c.system.K) ||
      agent.online().shape().output != action_count(c.system.L, c.system.K)) {
    throw ConfigError("checkpoint does not match the configured system size");
  }
  RandomStream calib = RandomStream::derive(o.seed, StreamId::kCalibration);
  const RewardThresholds t =
      calibrate_thresholds(make_world(c.system, o.seed, 0), c.env.calibration_samples, c.env.q_low,
                           c.env.q_high, calib, c.env.calibration);
  PilotEnv env(c.system, c.env, t, o.seed);
  RandomStream init = RandomStream::derive(o.seed, StreamId::kEnv);
  env.reset(random_assignment(c.system.L, c.system.K, init));

  std::ofstream traj;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    traj.open(fs::path(o.out) / "trajectory.csv");
    write_trajectory_header(traj);
  }
  double first = env.costs().global_max;
  double last = first;
  evaluate_policy(env, agent, c.steps, [&](const TrainingRow& row) {
    last = row.outcome.global_max_after;
    if (traj.is_open()) write_trajectory_row(traj, row);
  });
  std::cout << "greedy rollout: initial_cost=" << first << " final_cost=" << last << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot assignment for multi-cell massive MIMO via AoA-based contamination costs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "train the DQN agent");
  add_common(train_cmd, train_opts, true);

  CommonOptions base_opts;
  std::string method_arg;
  auto* base_cmd = app.add_subcommand("baseline", "run one baseline method");
  add_common(base_cmd, base_opts, true);
  base_cmd->add_option("--method", method_arg, "exhaustive | random | spr_like")->required();

  CommonOptions eval_opts;
  std::string checkpoint;
  auto* eval_cmd = app.add_subcommand("evaluate", "greedy rollout of a saved agent");
  add_common(eval_cmd, eval_opts, false);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();

  CommonOptions exp_opts;
  auto* exp_cmd = app.add_subcommand("experiment", "run every configured method");
  add_common(exp_cmd, exp_opts, true);

  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plotdata", "tidy tables for plotting");
  plot_cmd->add_option("dir", plot_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) {
      ExperimentConfig c = resolve(train_opts);
      c.methods = {Method::kDrl};
      const ExperimentResult r = run_experiment(c, train_opts.seed, fs::path(train_opts.out));
      print_summary(r);
    } else if (*base_cmd) {
      ExperimentConfig c = resolve(base_opts);
      const Method m = parse_method(method_arg);
      if (m == Method::kDrl) throw ConfigError("use 'train' for the DQN agent");
      c.methods = {m};
      const ExperimentResult r = run_experiment(c, base_opts.seed, fs::path(base_opts.out));
      print_summary(r);
      if (!r.methods.front().ok && m == Method::kExhaustive) return 3;
    } else if (*eval_cmd) {
      return evaluate(eval_opts, checkpoint);
    } else if (*exp_cmd) {
      const ExperimentConfig c = resolve(exp_opts);
      const ExperimentResult r = run_experiment(c, exp_opts.seed, fs::path(exp_opts.out));
      print_summary(r);
      for (const MethodSeries& s : r.methods) {
        if (!s.ok && s.status.rfind("failed", 0) == 0) return 4;
      }
    } else if (*plot_cmd) {
      emit_plot_data(plot_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
