#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "uavcov/gridworld.hpp"
#include "uavcov/neural.hpp"

namespace uavcov {

struct Transition {
  std::vector<double> observation;
  Action action = Action::North;
  double reward = 0.0;
  std::vector<double> next_observation;
  bool terminal = false;
};

inline constexpr std::size_t kDefaultMemoryCapacity = 60;

// Bounded FIFO of one UAV's own transitions.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = kDefaultMemoryCapacity);

  void record(Transition t);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<Transition>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<Transition> entries_;
};

// epsilon(k) = max(floor, initial * factor^k), k = completed episodes.
class EpsilonSchedule {
 public:
  EpsilonSchedule(double initial = 0.47, double factor = 0.93, double floor = 0.05);

  double value() const { return value_at(episodes_); }
  double value_at(int k) const;
  int episodes_completed() const { return episodes_; }

  // Marks one more episode finished and returns the new epsilon.
  double decay();

  double initial() const { return initial_; }
  double factor() const { return factor_; }
  double floor() const { return floor_; }

 private:
  double initial_;
  double factor_;
  double floor_;
  int episodes_ = 0;
};

enum class ControllerMode { GlobalNet, PerUavNet };

std::string_view controller_mode_name(ControllerMode mode);

struct ControllerConfig {
  ControllerMode mode = ControllerMode::GlobalNet;
  double gamma = 0.91;
  std::size_t minibatch_size = 16;
  std::size_t memory_capacity = kDefaultMemoryCapacity;
  std::size_t hidden_width = kDefaultHiddenWidth;
  HeadMode head = HeadMode::Linear;
  RmsPropSettings optimizer;
};

// Throws RangeError on out-of-domain fields.
void validate(const ControllerConfig& config);

// Greedy index with ties going to the lowest action.
Action greedy_action(const QValues& q);

// Uniform random action with probability epsilon, otherwise greedy.
Action select_action(const QNetwork& net, std::span<const double> observation, double epsilon, Rng& rng);

// Bellman regression target: reward alone at termination, otherwise
// reward + gamma * max(next_q).
double q_target(double reward, const QValues& next_q, bool terminal, double gamma);

// Networks, optimizers and per-UAV memories for one experiment.
// GlobalNet: one network shared by every UAV. PerUavNet: one per UAV.
// Memories are always per UAV.
class Controller {
 public:
  Controller(const ControllerConfig& config, std::size_t input_dim, int uav_count, Rng& init_rng);

  const ControllerConfig& config() const { return config_; }
  int uav_count() const { return static_cast<int>(memories_.size()); }

  std::size_t network_index(int uav) const;
  const QNetwork& network_for(int uav) const { return networks_[network_index(uav)]; }
  const std::vector<QNetwork>& networks() const { return networks_; }
  const ReplayMemory& memory_for(int uav) const { return memories_.at(uav); }

  void record(int uav, Transition t);

  // One minibatch step for `uav`'s network from `uav`'s memory. Throws
  // EmptyMemory, or NonFiniteGradient on divergence.
  double learn(int uav, Rng& rng);

 private:
  ControllerConfig config_;
  std::vector<QNetwork> networks_;
  std::vector<RmsProp> optimizers_;
  std::vector<ReplayMemory> memories_;
};

}  // namespace uavcov
