#include "aoapilot/qnn.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "aoapilot/errors.hpp"

namespace aoapilot {

namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& z) {
  return (z.array() > 0.0).cast<double>().matrix();
}

Eigen::MatrixXd affine(const DenseLayer& layer, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = layer.weight * x;
  z.colwise() += layer.bias;
  return z;
}

}  // namespace

QNetwork::QNetwork(const NetworkShape& shape) : shape_(shape) {
  if (shape.input < 1 || shape.width < 1 || shape.output < 1 || shape.fc_layers < 1 ||
      shape.residual_blocks < 0) {
    throw ConfigError("invalid network shape");
  }
  auto add = [&](int out, int in) {
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  };
  add(shape.width, shape.input);
  for (int i = 1; i < shape.fc_layers; ++i) add(shape.width, shape.width);
  for (int i = 0; i < 2 * shape.residual_blocks; ++i) add(shape.width, shape.width);
  add(shape.output, shape.width);
}

QNetwork::QNetwork(const NetworkShape& shape, RandomStream& rng) : QNetwork(shape) {
  for (DenseLayer& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        layer.weight(r, c) = rng.uniform(-limit, limit);
      }
    }
  }
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != shape_.input) {
    throw ConfigError("feature length " + std::to_string(inputs.rows()) +
                      " does not match network input " + std::to_string(shape_.input));
  }
  std::size_t i = 0;
  Eigen::MatrixXd h = inputs;
  for (int f = 0; f < shape_.fc_layers; ++f) h = relu(affine(layers_[i++], h));
  for (int b = 0; b < shape_.residual_blocks; ++b) {
    const Eigen::MatrixXd u = relu(affine(layers_[i++], h));
    h += relu(affine(layers_[i++], u));
  }
  return affine(layers_[i], h);
}

Eigen::VectorXd QNetwork::forward(std::span<const double> features) const {
  const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  return forward(Eigen::MatrixXd(x)).col(0);
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> actions,
                                   std::span<const double> targets, LayerStack& grad) const {
  if (inputs.rows() != shape_.input) throw ConfigError("feature length does not match network input");
  const Eigen::Index batch = inputs.cols();
  if (static_cast<Eigen::Index>(actions.size()) != batch ||
      static_cast<Eigen::Index>(targets.size()) != batch) {
    throw ConfigError("batch size mismatch");
  }
  const std::size_t n = layers_.size();
  // layer_in[i] feeds layers_[i]; pre[i] is its pre-activation.
  std::vector<Eigen::MatrixXd> layer_in(n);
  std::vector<Eigen::MatrixXd> pre(n);
  std::size_t i = 0;
  Eigen::MatrixXd h = inputs;
  for (int f = 0; f < shape_.fc_layers; ++f, ++i) {
    layer_in[i] = h;
    pre[i] = affine(layers_[i], h);
    h = relu(pre[i]);
  }
  for (int b = 0; b < shape_.residual_blocks; ++b) {
    layer_in[i] = h;
    pre[i] = affine(layers_[i], h);
    layer_in[i + 1] = relu(pre[i]);
    pre[i + 1] = affine(layers_[i + 1], layer_in[i + 1]);
    h += relu(pre[i + 1]);
    i += 2;
  }
  layer_in[i] = h;
  const Eigen::MatrixXd q = affine(layers_[i], h);

  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), batch);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int a = actions[b];
    if (a < 0 || a >= q.rows()) throw ConfigError("action index out of range");
    const double err = q(a, b) - targets[b];
    loss += err * err;
    dq(a, b) = 2.0 * err * scale;
  }
  loss *= scale;

  if (grad.size() != n) grad = zeros_like(layers_);
  grad[i].weight.noalias() = dq * layer_in[i].transpose();
  grad[i].bias = dq.rowwise().sum();
  Eigen::MatrixXd dh = layers_[i].weight.transpose() * dq;
  for (int b = shape_.residual_blocks - 1; b >= 0; --b) {
    i -= 2;
    const Eigen::MatrixXd dz2 = dh.cwiseProduct(relu_mask(pre[i + 1]));
    grad[i + 1].weight.noalias() = dz2 * layer_in[i + 1].transpose();
    grad[i + 1].bias = dz2.rowwise().sum();
    const Eigen::MatrixXd dz1 =
        (layers_[i + 1].weight.transpose() * dz2).cwiseProduct(relu_mask(pre[i]));
    grad[i].weight.noalias() = dz1 * layer_in[i].transpose();
    grad[i].bias = dz1.rowwise().sum();
    dh += layers_[i].weight.transpose() * dz1;
  }
  for (int f = shape_.fc_layers - 1; f >= 0; --f) {
    --i;
    const Eigen::MatrixXd dz = dh.cwiseProduct(relu_mask(pre[i]));
    grad[i].weight.noalias() = dz * layer_in[i].transpose();
    grad[i].bias = dz.rowwise().sum();
    if (f > 0) dh = layers_[i].weight.transpose() * dz;
  }
  return loss;
}

LayerStack QNetwork::backward(std::span<const double> features, int action, double td_target) const {
  const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  LayerStack grad = zeros_like(layers_);
  const int actions[1] = {action};
  const double targets[1] = {td_target};
  loss_and_gradient(Eigen::MatrixXd(x), actions, targets, grad);
  return grad;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool QNetwork::finite() const { return all_finite(layers_); }

bool operator==(const QNetwork& a, const QNetwork& b) {
  if (!(a.shape_ == b.shape_) || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].weight != b.layers_[i].weight || a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

LayerStack zeros_like(const LayerStack& layers) {
  LayerStack out;
  out.reserve(layers.size());
  for (const DenseLayer& l : layers) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

bool all_finite(const LayerStack& layers) {
  for (const DenseLayer& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

RmsProp::RmsProp(const LayerStack& like, RmsPropConfig config)
    : config_(config), accum_(zeros_like(like)) {}

bool RmsProp::step(LayerStack& params, const LayerStack& grad) {
  if (!all_finite(grad)) return false;
  const double beta = config_.decay;
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  auto update = [&](auto& theta, auto& v, const auto& g) {
    v = beta * v.array() + (1.0 - beta) * g.array().square();
    theta.array() -= lr * g.array() / (v.array().sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(params[i].weight, accum_[i].weight, grad[i].weight);
    update(params[i].bias, accum_[i].bias, grad[i].bias);
  }
  return true;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  items_.reserve(capacity);
}

void ReplayBuffer::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
    return;
  }
  items_[head_] = std::move(e);
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (items_.size() < capacity_) return items_.at(i);
  return items_.at((head_ + i) % capacity_);
}

std::optional<std::vector<std::size_t>> ReplayBuffer::sample_indices(std::size_t batch,
                                                                     RandomStream& rng) const {
  if (batch == 0 || items_.size() < batch) return std::nullopt;
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `batch` slots end up a uniform subset.
  for (std::size_t k = 0; k < batch; ++k) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<int>(k), static_cast<int>(idx.size() - 1)));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(batch);
  return idx;
}

std::optional<std::vector<const Experience*>> ReplayBuffer::sample(std::size_t batch,
                                                                   RandomStream& rng) const {
  auto idx = sample_indices(batch, rng);
  if (!idx) return std::nullopt;
  std::vector<const Experience*> out;
  out.reserve(batch);
  for (std::size_t i : *idx) out.push_back(&at(i));
  return out;
}

void ReplayBuffer::clear() {
  items_.clear();
  head_ = 0;
}

void TrainingSchedule::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid training schedule: " + what); };
  if (!(discount >= 0.0 && discount <= 1.0)) fail("discount must lie in [0, 1]");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_start && epsilon_start <= 1.0)) {
    fail("need 0 <= epsilon_floor <= epsilon_start <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) fail("epsilon_decay must lie in (0, 1]");
  if (batch_size < 1 || batch_size > replay_capacity) fail("need 1 <= batch_size <= replay_capacity");
  if (target_sync < 1) fail("target_sync must be >= 1");
  if (!(rmsprop.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(rmsprop.decay >= 0.0 && rmsprop.decay < 1.0)) fail("rms decay must lie in [0, 1)");
  if (hidden_width < 1 || fc_layers < 1 || residual_blocks < 0) fail("invalid network layout");
}

double epsilon_at(std::uint64_t t, const TrainingSchedule& s) {
  return std::max(s.epsilon_floor, s.epsilon_start * std::pow(s.epsilon_decay, static_cast<double>(t)));
}

int greedy_action(const Eigen::VectorXd& q) {
  int best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = static_cast<int>(a);
  }
  return best;
}

std::vector<double> td_targets(std::span<const Experience* const> batch, const QNetwork& target,
                               double discount) {
  if (batch.empty()) throw ConfigError("td_targets needs a nonempty batch");
  const auto dim = static_cast<Eigen::Index>(batch.front()->next_state.size());
  Eigen::MatrixXd next(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    next.col(static_cast<Eigen::Index>(b)) =
        Eigen::Map<const Eigen::VectorXd>(batch[b]->next_state.data(), dim);
  }
  const Eigen::MatrixXd q = target.forward(next);
  std::vector<double> out(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out[b] = batch[b]->reward + discount * q.col(static_cast<Eigen::Index>(b)).maxCoeff();
  }
  return out;
}

DqnAgent::DqnAgent(int input, int actions, const TrainingSchedule& schedule, std::uint64_t seed)
    : schedule_(schedule),
      buffer_(static_cast<std::size_t>(schedule.replay_capacity)),
      rng_(RandomStream::derive(seed, StreamId::kAgent)) {
  schedule_.validate();
  RandomStream init = RandomStream::derive(seed, StreamId::kInit);
  online_ = QNetwork({input, schedule.hidden_width, schedule.fc_layers, schedule.residual_blocks,
                      actions},
                     init);
  target_ = online_;
  optimizer_ = RmsProp(online_.layers(), schedule.rmsprop);
}

int DqnAgent::act(std::span<const double> features) {
  const double eps = epsilon();
  if (rng_.uniform() < eps) return rng_.uniform_int(0, online_.shape().output - 1);
  return act_greedy(features);
}

int DqnAgent::act_greedy(std::span<const double> features) const {
  return greedy_action(online_.forward(features));
}

DqnAgent::UpdateInfo DqnAgent::observe(Experience e) {
  UpdateInfo info;
  buffer_.push(std::move(e));
  const auto batch_size = static_cast<std::size_t>(schedule_.batch_size);
  if (auto batch = buffer_.sample(batch_size, rng_)) {
    const std::vector<double> targets = td_targets(*batch, target_, schedule_.discount);
    const auto dim = static_cast<Eigen::Index>(batch->front()->state.size());
    Eigen::MatrixXd inputs(dim, static_cast<Eigen::Index>(batch_size));
    std::vector<int> actions(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) {
      inputs.col(static_cast<Eigen::Index>(b)) =
          Eigen::Map<const Eigen::VectorXd>((*batch)[b]->state.data(), dim);
      actions[b] = (*batch)[b]->action;
    }
    LayerStack grad;
    info.loss = online_.loss_and_gradient(inputs, actions, targets, grad);
    info.updated = optimizer_.step(online_.layers(), grad);
    info.skipped = !info.updated;
  }
  ++step_;
  if (step_ % static_cast<std::uint64_t>(schedule_.target_sync) == 0) {
    sync_target();
    info.synced = true;
  }
  return info;
}

// ---------------------------------------------------------------------------
// Checkpoint text container.

namespace {

constexpr const char* kMagic = "aoapilot-dqn";
constexpr int kVersion = 1;

void put(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  os << buf;
}

double get(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw ConfigError("truncated checkpoint");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ConfigError("malformed number in checkpoint: " + tok);
  return v;
}

template <typename T>
T get_int(std::istream& is) {
  T v{};
  if (!(is >> v)) throw ConfigError("truncated checkpoint");
  return v;
}

void expect(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word) throw ConfigError("checkpoint: expected '" + word + "'");
}

void put_stack(std::ostream& os, const char* name, const LayerStack& s) {
  os << name << ' ' << s.size() << '\n';
  for (const DenseLayer& l : s) {
    os << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        put(os, l.weight(r, c));
        os << ' ';
      }
    }
    os << '\n';
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      put(os, l.bias[r]);
      os << ' ';
    }
    os << '\n';
  }
}

void get_stack(std::istream& is, const char* name, LayerStack& s) {
  expect(is, name);
  const auto n = get_int<std::size_t>(is);
  if (n != s.size()) throw ConfigError(std::string("checkpoint: layer count mismatch in ") + name);
  for (DenseLayer& l : s) {
    const auto rows = get_int<Eigen::Index>(is);
    const auto cols = get_int<Eigen::Index>(is);
    if (rows != l.weight.rows() || cols != l.weight.cols()) {
      throw ConfigError(std::string("checkpoint: layer shape mismatch in ") + name);
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) l.weight(r, c) = get(is);
    }
    for (Eigen::Index r = 0; r < rows; ++r) l.bias[r] = get(is);
  }
}

void put_vector(std::ostream& os, const std::vector<double>& v) {
  os << v.size();
  for (double x : v) {
    os << ' ';
    put(os, x);
  }
  os << '\n';
}

std::vector<double> get_vector(std::istream& is) {
  const auto n = get_int<std::size_t>(is);
  std::vector<double> v(n);
  for (double& x : v) x = get(is);
  return v;
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const ReplayBuffer& b) {
  os << "replay " << b.capacity_ << ' ' << b.size() << '\n';
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Experience& e = b.at(i);
    os << e.action << ' ';
    put(os, e.reward);
    os << '\n';
    put_vector(os, e.state);
    put_vector(os, e.next_state);
  }
  return os;
}

std::istream& operator>>(std::istream& is, ReplayBuffer& b) {
  expect(is, "replay");
  const auto capacity = get_int<std::size_t>(is);
  const auto size = get_int<std::size_t>(is);
  ReplayBuffer fresh(capacity);
  for (std::size_t i = 0; i < size; ++i) {
    Experience e;
    e.action = get_int<int>(is);
    e.reward = get(is);
    e.state = get_vector(is);
    e.next_state = get_vector(is);
    fresh.push(std::move(e));
  }
  b = std::move(fresh);
  return is;
}

void DqnAgent::save(std::ostream& os) const {
  os << kMagic << ' ' << kVersion << '\n';
  const TrainingSchedule& s = schedule_;
  os << "schedule ";
  for (double v : {s.discount, s.epsilon_start, s.epsilon_decay, s.epsilon_floor,
                   s.rmsprop.learning_rate, s.rmsprop.decay, s.rmsprop.epsilon}) {
    put(os, v);
    os << ' ';
  }
  os << s.batch_size << ' ' << s.replay_capacity << ' ' << s.target_sync << ' ' << s.hidden_width
     << ' ' << s.fc_layers << ' ' << s.residual_blocks << '\n';
  const NetworkShape& sh = online_.shape();
  os << "shape " << sh.input << ' ' << sh.width << ' ' << sh.fc_layers << ' ' << sh.residual_blocks
     << ' ' << sh.output << '\n';
  os << "step " << step_ << '\n';
  os << "rng " << rng_ << '\n';
  put_stack(os, "online", online_.layers());
  put_stack(os, "target", target_.layers());
  put_stack(os, "rmsprop", optimizer_.accumulators());
  os << buffer_;
  os << "end\n";
}

DqnAgent DqnAgent::load(std::istream& is) {
  expect(is, kMagic);
  if (get_int<int>(is) != kVersion) throw ConfigError("unsupported checkpoint version");
  DqnAgent agent;
  TrainingSchedule& s = agent.schedule_;
  expect(is, "schedule");
  s.discount = get(is);
  s.epsilon_start = get(is);
  s.epsilon_decay = get(is);
  s.epsilon_floor = get(is);
  s.rmsprop.learning_rate = get(is);
  s.rmsprop.decay = get(is);
  s.rmsprop.epsilon = get(is);
  s.batch_size = get_int<int>(is);
  s.replay_capacity = get_int<int>(is);
  s.target_sync = get_int<int>(is);
  s.hidden_width = get_int<int>(is);
  s.fc_layers = get_int<int>(is);
  s.residual_blocks = get_int<int>(is);
  s.validate();
  expect(is, "shape");
  NetworkShape sh;
  sh.input = get_int<int>(is);
  sh.width = get_int<int>(is);
  sh.fc_layers = get_int<int>(is);
  sh.residual_blocks = get_int<int>(is);
  sh.output = get_int<int>(is);
  expect(is, "step");
  agent.step_ = get_int<std::uint64_t>(is);
  expect(is, "rng");
  if (!(is >> agent.rng_)) throw ConfigError("checkpoint: bad rng state");
  agent.online_ = QNetwork(sh);
  agent.target_ = QNetwork(sh);
  agent.optimizer_ = RmsProp(agent.online_.layers(), s.rmsprop);
  get_stack(is, "online", agent.online_.layers());
  get_stack(is, "target", agent.target_.layers());
  get_stack(is, "rmsprop", agent.optimizer_.accumulators());
  is >> agent.buffer_;
  expect(is, "end");
  return agent;
}

bool operator==(const DqnAgent& a, const DqnAgent& b) {
  if (a.step_ != b.step_ || !(a.online_ == b.online_) || !(a.target_ == b.target_) ||
      !(a.rng_ == b.rng_) || a.buffer_.size() != b.buffer_.size()) {
    return false;
  }
  const LayerStack& va = a.optimizer_.accumulators();
  const LayerStack& vb = b.optimizer_.accumulators();
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i].weight != vb[i].weight || va[i].bias != vb[i].bias) return false;
  }
  for (std::size_t i = 0; i < a.buffer_.size(); ++i) {
    const Experience& x = a.buffer_.at(i);
    const Experience& y = b.buffer_.at(i);
    if (x.action != y.action || x.reward != y.reward || x.state != y.state ||
        x.next_state != y.next_state) {
      return false;
    }
  }
  return true;
}

}  // namespace aoapilot
