#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "aoapilot/env.hpp"
#include "aoapilot/qnn.hpp"

namespace aoapilot {

struct TrainingRow {
  std::uint64_t step = 0;
  double epsilon = 0.0;
  double loss = 0.0;  // NaN before the first update
  bool updated = false;
  bool synced = false;
  int action = 0;
  int action_cell = 0;
  int action_pilot = 0;
  StepOutcome outcome;
};

using StepObserver = std::function<void(const TrainingRow&)>;

// The DQN loop: encode, act epsilon-greedily, step the environment, store the
// transition and train on a replay minibatch once the buffer is warm.
// Throws NumericFailure on a non-finite loss or parameters.
void train(PilotEnv& env, DqnAgent& agent, std::uint64_t total_steps, const StepObserver& observe);

// Greedy rollout without learning.
void evaluate_policy(PilotEnv& env, const DqnAgent& agent, std::uint64_t steps,
                     const StepObserver& observe);

void write_training_header(std::ostream& os);
void write_training_row(std::ostream& os, const TrainingRow& row);
void write_trajectory_header(std::ostream& os);
void write_trajectory_row(std::ostream& os, const TrainingRow& row);

}  // namespace aoapilot
