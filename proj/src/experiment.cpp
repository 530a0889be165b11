#include "uavcov/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "uavcov/errors.hpp"

namespace uavcov {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kInitStream = ~0ull;

// Shared episode loop. The policy supplies actions (nullopt ends the
// episode early) and sees every outcome.
template <typename Policy>
EpisodeRecord play(const GridMap& map, int uav_count, const RewardTable& rewards, const Budget& budget,
                   Policy& policy) {
  EpisodeRecord record;
  record.rows = map.rows();
  record.cols = map.cols();
  record.visit_counts.assign(map.cell_count(), 0);
  record.uav_actions.assign(uav_count, 0);
  record.uav_valid_actions.assign(uav_count, 0);

  SwarmState state = reset(map, uav_count);
  for (const Cell& c : state.positions) ++record.visit_counts[map.index(c)];
  record.initial_coverage = coverage(state, map);

  record.started = Clock::now();
  bool stop = false;
  while (!stop && !is_terminal(state, map, budget, Clock::now() - record.started)) {
    bool acted = false;
    for (int uav = 0; uav < uav_count; ++uav) {
      const std::optional<Action> action = policy.choose(state, map, uav);
      if (!action) {
        stop = true;
        break;
      }
      const StepOutcome outcome = step(state, map, uav, *action, rewards);
      acted = true;
      ++record.total_actions;
      ++record.uav_actions[uav];
      if (outcome.cell_class == CellClass::NewCell) {
        ++record.valid_actions;
        ++record.uav_valid_actions[uav];
      }
      if (outcome.cell_class != CellClass::NonVisitable) ++record.visit_counts[map.index(outcome.new_position)];
      record.coverage_trajectory.push_back(outcome.coverage);
      record.actions.push_back({uav, *action, outcome.cell_class, outcome.new_position, outcome.reward,
                                outcome.coverage});
      policy.observe(state, map, uav, *action, outcome);
      if (outcome.done) break;
    }
    if (acted) ++state.sim_steps;
  }
  record.finished = Clock::now();
  record.sim_steps = state.sim_steps;
  record.solved = fully_covered(state, map);
  return record;
}

class ScriptedPolicy {
 public:
  explicit ScriptedPolicy(std::span<const Action> actions) : actions_(actions) {}

  std::optional<Action> choose(const SwarmState&, const GridMap&, int) {
    if (next_ >= actions_.size()) return std::nullopt;
    return actions_[next_++];
  }
  void observe(const SwarmState&, const GridMap&, int, Action, const StepOutcome&) {}

 private:
  std::span<const Action> actions_;
  std::size_t next_ = 0;
};

class LearningPolicy {
 public:
  LearningPolicy(Controller& controller, double epsilon, Rng& rng, int episode)
      : controller_(controller), epsilon_(epsilon), rng_(rng), episode_(episode) {}

  std::optional<Action> choose(const SwarmState& state, const GridMap& map, int uav) {
    observation_ = observation(state, map, uav);
    return select_action(controller_.network_for(uav), observation_, epsilon_, rng_);
  }

  void observe(const SwarmState& state, const GridMap& map, int uav, Action action, const StepOutcome& outcome) {
    Transition t{std::move(observation_), action, outcome.reward, observation(state, map, uav), outcome.done};
    controller_.record(uav, std::move(t));
    try {
      controller_.learn(uav, rng_);
    } catch (const NonFiniteGradient& e) {
      throw ExperimentDiverged(episode_, e.what());
    }
  }

 private:
  Controller& controller_;
  double epsilon_;
  Rng& rng_;
  int episode_;
  std::vector<double> observation_;
};

}  // namespace

Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull)));
}

ExperimentSpec default_spec(GridMap map, int uav_count, ControllerMode mode, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.budget.max_steps = default_step_budget(map);
  spec.budget.wall_clock = std::chrono::minutes(30);
  spec.map = std::move(map);
  spec.uav_count = uav_count;
  spec.seed = seed;
  spec.controller.mode = mode;
  return spec;
}

EpisodeRecord run_episode(const ExperimentSpec& spec, Controller& controller, EpsilonSchedule& epsilon,
                          int episode) {
  Rng rng = derive_rng(spec.seed, static_cast<std::uint64_t>(episode));
  const double eps = epsilon.value();
  LearningPolicy policy(controller, eps, rng, episode);
  EpisodeRecord record = play(spec.map, spec.uav_count, spec.rewards, spec.budget, policy);
  record.episode = episode;
  record.epsilon = eps;
  epsilon.decay();
  return record;
}

EpisodeRecord run_scripted_episode(const GridMap& map, int uav_count, std::span<const Action> actions,
                                   const RewardTable& rewards, const Budget& budget) {
  ScriptedPolicy policy(actions);
  return play(map, uav_count, rewards, budget, policy);
}

ExperimentSummary summarize(std::vector<EpisodeRecord> records) {
  ExperimentSummary summary;
  summary.episodes = static_cast<int>(records.size());
  for (const auto& r : records) {
    if (!r.solved) continue;
    ++summary.solutions_found;
    const double et = r.et_seconds();
    if (!summary.min_solution_et_seconds || et < *summary.min_solution_et_seconds) {
      summary.min_solution_et_seconds = et;
    }
    if (!summary.min_solution_sim_steps || r.sim_steps < *summary.min_solution_sim_steps) {
      summary.min_solution_sim_steps = r.sim_steps;
    }
  }
  summary.records = std::move(records);
  return summary;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.episodes < 1) throw RangeError("an experiment needs at least one episode");
  if (spec.uav_count < 1) throw RangeError("an experiment needs at least one UAV");
  if (spec.budget.max_steps < 0) throw RangeError("step budget must be non-negative");
  Rng init_rng = derive_rng(spec.seed, kInitStream);
  Controller controller(spec.controller, observation_size(spec.map), spec.uav_count, init_rng);
  EpsilonSchedule epsilon = spec.epsilon;
  std::vector<EpisodeRecord> records;
  records.reserve(spec.episodes);
  for (int k = 0; k < spec.episodes; ++k) records.push_back(run_episode(spec, controller, epsilon, k));
  return {summarize(std::move(records)), controller.networks()};
}

std::string_view matrix_block_name(MatrixBlock block) {
  switch (block) {
    case MatrixBlock::Baseline: return "baseline";
    case MatrixBlock::PerUav: return "per-uav";
    case MatrixBlock::Global: return "global";
  }
  return "?";
}

std::vector<MatrixCell> enumerate_matrix(std::span<const int> sizes, std::span<const int> uav_counts,
                                         std::span<const ControllerMode> modes) {
  if (sizes.empty() || uav_counts.empty()) throw RangeError("matrix needs at least one size and one UAV count");
  if (modes.empty()) throw RangeError("matrix needs at least one controller mode");
  for (int s : sizes) {
    if (s < 1) throw RangeError("map sizes must be positive");
  }
  for (int u : uav_counts) {
    if (u < 1) throw RangeError("UAV counts must be positive");
  }
  auto has_mode = [&](ControllerMode m) { return std::find(modes.begin(), modes.end(), m) != modes.end(); };
  const bool single = std::find(uav_counts.begin(), uav_counts.end(), 1) != uav_counts.end();

  std::vector<MatrixCell> cells;
  if (single) {
    for (int s : sizes) cells.push_back({s, 1, MatrixBlock::Baseline});
  }
  for (MatrixBlock block : {MatrixBlock::PerUav, MatrixBlock::Global}) {
    const ControllerMode mode = block == MatrixBlock::PerUav ? ControllerMode::PerUavNet : ControllerMode::GlobalNet;
    if (!has_mode(mode)) continue;
    for (int s : sizes) {
      for (int u : uav_counts) {
        if (u != 1) cells.push_back({s, u, block});
      }
    }
  }
  return cells;
}

ExperimentSpec spec_for_cell(const MatrixCell& cell, const MatrixOptions& options) {
  ExperimentSpec spec = default_spec(GridMap::open(cell.map_size, cell.map_size), cell.uavs, cell.mode(), options.seed);
  if (options.step_budget) spec.budget.max_steps = *options.step_budget;
  spec.budget.wall_clock = options.wall_clock;
  spec.episodes = options.episodes;
  spec.controller = options.controller;
  spec.controller.mode = cell.mode();
  spec.epsilon = options.epsilon;
  spec.rewards = options.rewards;
  return spec;
}

std::vector<MatrixCellResult> run_matrix(const MatrixOptions& options,
                                         const std::function<void(const MatrixCellResult&)>& on_cell_done) {
  const std::vector<MatrixCell> cells = enumerate_matrix(options.sizes, options.uav_counts, options.modes);
  std::vector<MatrixCellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      MatrixCellResult& slot = results[i];
      slot.cell = cells[i];
      try {
        slot.result = run_experiment(spec_for_cell(cells[i], options));
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
      if (on_cell_done) {
        std::lock_guard lock(callback_mutex);
        on_cell_done(slot);
      }
    }
  };

  const int jobs = std::clamp(options.jobs, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace uavcov
