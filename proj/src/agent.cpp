#include "uavcov/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw RangeError("replay memory capacity must be positive");
}

void ReplayMemory::record(Transition t) {
  if (!entries_.empty() && (t.observation.size() != entries_.front().observation.size() ||
                            t.next_observation.size() != entries_.front().observation.size())) {
    throw DimensionMismatch("transition shape differs from the stored transitions");
  }
  entries_.push_back(std::move(t));
  while (entries_.size() > capacity_) entries_.pop_front();
}

EpsilonSchedule::EpsilonSchedule(double initial, double factor, double floor)
    : initial_(initial), factor_(factor), floor_(floor) {
  if (!(initial_ >= 0 && initial_ <= 1)) throw RangeError("initial epsilon must lie in [0, 1]");
  if (!(factor_ > 0 && factor_ <= 1)) throw RangeError("epsilon factor must lie in (0, 1]");
  if (!(floor_ >= 0 && floor_ <= 1)) throw RangeError("epsilon floor must lie in [0, 1]");
}

double EpsilonSchedule::value_at(int k) const { return std::max(floor_, initial_ * std::pow(factor_, k)); }

double EpsilonSchedule::decay() {
  ++episodes_;
  return value();
}

std::string_view controller_mode_name(ControllerMode mode) {
  return mode == ControllerMode::PerUavNet ? "per-uav" : "global";
}

void validate(const ControllerConfig& config) {
  if (!(config.gamma >= 0 && config.gamma <= 1)) throw RangeError("gamma must lie in [0, 1]");
  if (config.minibatch_size == 0) throw RangeError("minibatch size must be positive");
  if (config.memory_capacity == 0) throw RangeError("memory capacity must be positive");
  if (config.hidden_width == 0) throw RangeError("hidden width must be positive");
  validate(config.optimizer);
}

Action greedy_action(const QValues& q) {
  int best = 0;
  for (int k = 1; k < kOutputCount; ++k) {
    if (q[k] > q[best]) best = k;
  }
  return static_cast<Action>(best);
}

Action select_action(const QNetwork& net, std::span<const double> observation, double epsilon, Rng& rng) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw RangeError("epsilon must lie in [0, 1]");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    return static_cast<Action>(pick(rng));
  }
  return greedy_action(net.forward(observation));
}

double q_target(double reward, const QValues& next_q, bool terminal, double gamma) {
  if (terminal) return reward;
  return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

Controller::Controller(const ControllerConfig& config, std::size_t input_dim, int uav_count, Rng& init_rng)
    : config_(config) {
  validate(config_);
  if (uav_count < 1) throw RangeError("controller needs at least one UAV");
  const int network_count = config_.mode == ControllerMode::GlobalNet ? 1 : uav_count;
  networks_.reserve(network_count);
  optimizers_.reserve(network_count);
  for (int i = 0; i < network_count; ++i) {
    networks_.push_back(QNetwork::init(input_dim, config_.head, init_rng, config_.hidden_width));
    optimizers_.emplace_back(networks_.back().parameter_count(), config_.optimizer);
  }
  memories_.assign(uav_count, ReplayMemory(config_.memory_capacity));
}

std::size_t Controller::network_index(int uav) const {
  if (uav < 0 || uav >= uav_count()) throw RangeError("uav index " + std::to_string(uav) + " out of range");
  return config_.mode == ControllerMode::GlobalNet ? 0 : static_cast<std::size_t>(uav);
}

void Controller::record(int uav, Transition t) {
  const std::size_t net = network_index(uav);
  if (t.observation.size() != networks_[net].input_dim() ||
      t.next_observation.size() != networks_[net].input_dim()) {
    throw DimensionMismatch("transition length does not match the network input");
  }
  memories_[uav].record(std::move(t));
}

double Controller::learn(int uav, Rng& rng) {
  const std::size_t net_index = network_index(uav);
  const ReplayMemory& memory = memories_[uav];
  if (memory.empty()) throw EmptyMemory("uav " + std::to_string(uav) + " has no stored transitions");

  std::vector<std::size_t> all(memory.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> picked;
  picked.reserve(std::min(config_.minibatch_size, memory.size()));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), config_.minibatch_size, rng);

  QNetwork& net = networks_[net_index];
  std::vector<TrainingExample> batch;
  batch.reserve(picked.size());
  for (std::size_t i : picked) {
    const Transition& t = memory[i];
    const QValues next_q = t.terminal ? QValues{} : net.forward(t.next_observation);
    batch.push_back({t.observation, action_index(t.action), q_target(t.reward, next_q, t.terminal, config_.gamma)});
  }
  return train_step(net, optimizers_[net_index], batch);
}

}  // namespace uavcov
