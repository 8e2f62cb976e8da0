#include "aoapilot/trainer.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "aoapilot/csv.hpp"
#include "aoapilot/errors.hpp"

namespace aoapilot {

void train(PilotEnv& env, DqnAgent& agent, std::uint64_t total_steps, const StepObserver& observe) {
  const int K = env.world().K();
  std::vector<double> features = encode_state(env.state(), env.thresholds());
  for (std::uint64_t n = 0; n < total_steps; ++n) {
    TrainingRow row;
    row.step = n;
    row.epsilon = agent.epsilon();
    row.action = agent.act(features);
    row.action_cell = row.action / K;
    row.action_pilot = row.action % K;
    row.outcome = env.step(row.action);
    std::vector<double> next = encode_state(row.outcome.next_state, env.thresholds());
    const DqnAgent::UpdateInfo info =
        agent.observe({features, row.action, static_cast<double>(row.outcome.reward), next});
    row.updated = info.updated;
    row.synced = info.synced;
    row.loss = info.updated || info.skipped ? info.loss : std::numeric_limits<double>::quiet_NaN();
    if (info.skipped || ((info.updated) && (!std::isfinite(info.loss) || !agent.online().finite()))) {
      std::ostringstream msg;
      msg << "non-finite training state at step " << n << " (loss=" << info.loss
          << ", epsilon=" << row.epsilon << ", replay=" << agent.buffer().size() << ")";
      throw NumericFailure(msg.str());
    }
    features = std::move(next);
    if (observe) observe(row);
  }
}

void evaluate_policy(PilotEnv& env, const DqnAgent& agent, std::uint64_t steps,
                     const StepObserver& observe) {
  const int K = env.world().K();
  for (std::uint64_t n = 0; n < steps; ++n) {
    TrainingRow row;
    row.step = n;
    row.action = agent.act_greedy(encode_state(env.state(), env.thresholds()));
    row.action_cell = row.action / K;
    row.action_pilot = row.action % K;
    row.loss = std::numeric_limits<double>::quiet_NaN();
    row.outcome = env.step(row.action);
    if (observe) observe(row);
  }
}

void write_training_header(std::ostream& os) {
  os << "step,epsilon,loss,reward,r1,r2,r3,g_max,action,synced\n";
}

void write_training_row(std::ostream& os, const TrainingRow& r) {
  const StepOutcome& o = r.outcome;
  os << r.step << ',' << csv_number(r.epsilon) << ',' << csv_number(r.loss) << ',' << o.reward
     << ',' << o.components.r1 << ',' << o.components.r2 << ',' << o.components.r3 << ','
     << csv_number(o.global_max_after) << ',' << r.action << ',' << (r.synced ? 1 : 0) << '\n';
}

void write_trajectory_header(std::ostream& os) {
  os << "step,action_cell,action_pilot,action_taken,g_prev,g_next,r1,r2,r3,reward,k_worst,l_worst\n";
}

void write_trajectory_row(std::ostream& os, const TrainingRow& r) {
  const StepOutcome& o = r.outcome;
  os << r.step << ',' << r.action_cell << ',' << r.action_pilot << ',' << (o.action_taken ? 1 : 0)
     << ',' << csv_number(o.g_prev) << ',' << csv_number(o.g_next) << ',' << o.components.r1 << ','
     << o.components.r2 << ',' << o.components.r3 << ',' << o.reward << ','
     << o.next_state.worst_pilot << ',' << o.next_state.worst_cell << '\n';
}

}  // namespace aoapilot
