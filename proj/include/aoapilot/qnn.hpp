#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aoapilot/random.hpp"

namespace aoapilot {

struct NetworkShape {
  int input = 0;
  int width = 128;
  int fc_layers = 2;
  int residual_blocks = 2;
  int output = 0;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

// Layer list in evaluation order: fc_layers input/hidden layers, two layers
// per residual block, then the linear output layer. Gradients and optimizer
// accumulators reuse the same container shape.
using LayerStack = std::vector<DenseLayer>;

class QNetwork {
 public:
  QNetwork() = default;
  explicit QNetwork(const NetworkShape& shape);  // zero parameters
  QNetwork(const NetworkShape& shape, RandomStream& rng);  // He-uniform weights, zero biases

  const NetworkShape& shape() const { return shape_; }
  LayerStack& layers() { return layers_; }
  const LayerStack& layers() const { return layers_; }

  // Columns are samples. Rows of the result are Q-values per action.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
  Eigen::VectorXd forward(std::span<const double> features) const;

  // Mean over the batch of (target_b - q(s_b, a_b))^2 and its exact gradient.
  double loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                           std::span<const double> targets, LayerStack& grad) const;

  // Single-sample form: gradient of (td_target - q(s, a))^2.
  LayerStack backward(std::span<const double> features, int action, double td_target) const;

  std::size_t parameter_count() const;
  bool finite() const;

  friend bool operator==(const QNetwork& a, const QNetwork& b);

 private:
  NetworkShape shape_;
  LayerStack layers_;
};

LayerStack zeros_like(const LayerStack& layers);
bool all_finite(const LayerStack& layers);

struct RmsPropConfig {
  double learning_rate = 1e-3;
  double decay = 0.9;
  double epsilon = 1e-8;
};

class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(const LayerStack& like, RmsPropConfig config);

  // v <- decay v + (1 - decay) g^2; theta <- theta - lr g / (sqrt(v) + eps).
  // Returns false and leaves everything untouched on a non-finite gradient.
  bool step(LayerStack& params, const LayerStack& grad);

  const LayerStack& accumulators() const { return accum_; }
  LayerStack& accumulators() { return accum_; }
  const RmsPropConfig& config() const { return config_; }

 private:
  RmsPropConfig config_;
  LayerStack accum_;
};

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

// FIFO ring; the oldest experience is overwritten once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 500);

  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch) const { return items_.size() >= batch; }

  // i = 0 is the oldest stored experience.
  const Experience& at(std::size_t i) const;

  // Uniform without replacement; std::nullopt before the buffer holds `batch`.
  std::optional<std::vector<const Experience*>> sample(std::size_t batch, RandomStream& rng) const;
  std::optional<std::vector<std::size_t>> sample_indices(std::size_t batch, RandomStream& rng) const;

  void clear();

  friend std::ostream& operator<<(std::ostream& os, const ReplayBuffer& b);
  friend std::istream& operator>>(std::istream& is, ReplayBuffer& b);

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write slot once full
  std::vector<Experience> items_;
};

struct TrainingSchedule {
  double discount = 0.9;
  double epsilon_start = 0.5;
  double epsilon_decay = 0.9975;
  double epsilon_floor = 0.0001;
  int batch_size = 200;
  int replay_capacity = 500;
  int target_sync = 100;
  RmsPropConfig rmsprop;
  int hidden_width = 128;
  int fc_layers = 2;
  int residual_blocks = 2;

  void validate() const;
};

// max(floor, start * decay^t).
double epsilon_at(std::uint64_t t, const TrainingSchedule& s);

// argmax with ties resolved to the lowest index.
int greedy_action(const Eigen::VectorXd& q);

// r + discount * max_a q(s', a; target).
std::vector<double> td_targets(std::span<const Experience* const> batch, const QNetwork& target,
                               double discount);

class DqnAgent {
 public:
  DqnAgent(int input, int actions, const TrainingSchedule& schedule, std::uint64_t seed);

  int act(std::span<const double> features);  // epsilon-greedy at the current step
  int act_greedy(std::span<const double> features) const;

  struct UpdateInfo {
    bool updated = false;
    bool synced = false;
    bool skipped = false;  // non-finite gradient
    double loss = 0.0;
  };

  // Push one transition, train on a minibatch once warm, advance the step and
  // refresh the target every target_sync steps.
  UpdateInfo observe(Experience e);

  void sync_target() { target_ = online_; }

  std::uint64_t step() const { return step_; }
  double epsilon() const { return epsilon_at(step_, schedule_); }
  const QNetwork& online() const { return online_; }
  QNetwork& online() { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const RmsProp& optimizer() const { return optimizer_; }
  const TrainingSchedule& schedule() const { return schedule_; }
  RandomStream& rng() { return rng_; }

  // Versioned text container; doubles in hexfloat so the round trip is exact.
  void save(std::ostream& os) const;
  static DqnAgent load(std::istream& is);

  friend bool operator==(const DqnAgent& a, const DqnAgent& b);

 private:
  DqnAgent() = default;

  TrainingSchedule schedule_;
  QNetwork online_;
  QNetwork target_;
  RmsProp optimizer_;
  ReplayBuffer buffer_;
  RandomStream rng_;
  std::uint64_t step_ = 0;
};

}  // namespace aoapilot
