#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoapilot/channel.hpp"
#include "aoapilot/env.hpp"
#include "aoapilot/qnn.hpp"
#include "aoapilot/rate.hpp"
#include "aoapilot/scenario.hpp"

namespace aoapilot {

enum class Method { kDrl, kExhaustive, kRandom, kSprLike };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct ExperimentConfig {
  std::string name = "custom";
  SystemConfig system;
  ChannelConfig channel;
  EnvConfig env;
  TrainingSchedule schedule;
  RateConfig rate;
  std::vector<Method> methods{Method::kDrl, Method::kExhaustive, Method::kRandom, Method::kSprLike};
  std::uint64_t steps = 5000;
  double exhaustive_budget = 1e8;
  bool long_run = false;  // lifts the exhaustive budget
  double edge_ratio = 1.0 / 3.0;
  int window = 50;        // short-term moving-average window
  int rate_realizations = 1;  // small-scale realizations per time step

  void validate() const;
};

// Paper scale: L=7, K=4, M=100, eta=2.5.
ExperimentConfig paper_preset();
// Desk scale for routine runs: L=3, K=3, M=32, static geometry.
ExperimentConfig desk_preset();
ExperimentConfig preset(const std::string& name);

// INI-style file with sections [scenario] [channel] [env] [qnn] [rate]
// [experiment]; keys override `base`. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base);

// Canonical INI text of every key; parse_config(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& c);

std::uint64_t config_hash(const ExperimentConfig& c);

}  // namespace aoapilot
