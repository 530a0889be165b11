#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavcov/agent.hpp"
#include "uavcov/gridworld.hpp"
#include "uavcov/neural.hpp"

namespace uavcov {

using Clock = std::chrono::steady_clock;

struct ExperimentSpec {
  GridMap map = GridMap::open(1, 1);
  int uav_count = 1;
  int episodes = 30;
  std::uint64_t seed = 0;
  Budget budget;
  ControllerConfig controller;
  EpsilonSchedule epsilon;
  RewardTable rewards;
};

// Spec for a square open map with one start at (0, 0), default budgets.
ExperimentSpec default_spec(GridMap map, int uav_count, ControllerMode mode, std::uint64_t seed);

struct ActionLogEntry {
  int uav = 0;
  Action action = Action::North;
  CellClass cell_class = CellClass::NonVisitable;
  Cell position;
  double reward = 0.0;
  double coverage = 0.0;
};

struct EpisodeRecord {
  int episode = 0;
  double epsilon = 0.0;
  int rows = 0;
  int cols = 0;
  std::int64_t total_actions = 0;
  std::int64_t valid_actions = 0;
  std::int64_t sim_steps = 0;
  bool solved = false;
  double initial_coverage = 0.0;
  std::vector<double> coverage_trajectory;  // one entry per action
  std::vector<ActionLogEntry> actions;
  std::vector<std::int64_t> visit_counts;  // row-major, initial placement included
  std::vector<std::int64_t> uav_actions;
  std::vector<std::int64_t> uav_valid_actions;
  Clock::time_point started;
  Clock::time_point finished;

  double final_coverage() const {
    return coverage_trajectory.empty() ? initial_coverage : coverage_trajectory.back();
  }
  double et_seconds() const { return std::chrono::duration<double>(finished - started).count(); }
};

struct ExperimentSummary {
  int episodes = 0;
  int solutions_found = 0;
  std::optional<double> min_solution_et_seconds;
  std::optional<std::int64_t> min_solution_sim_steps;
  std::vector<EpisodeRecord> records;
};

ExperimentSummary summarize(std::vector<EpisodeRecord> records);

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<QNetwork> networks;
};

// Independent random stream for (seed, stream). Episode k of an experiment
// uses stream k; network initialization uses a reserved stream.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

// Runs one learning episode, then decays epsilon. NonFiniteGradient surfaces
// as ExperimentDiverged.
EpisodeRecord run_episode(const ExperimentSpec& spec, Controller& controller, EpsilonSchedule& epsilon,
                          int episode);

// Plays a fixed action sequence, bypassing any network (test hook). UAVs take
// turns in index order; the episode ends when the sequence runs out, the map
// is covered or the budget is exhausted.
EpisodeRecord run_scripted_episode(const GridMap& map, int uav_count, std::span<const Action> actions,
                                   const RewardTable& rewards, const Budget& budget);

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Experiment matrix over square open maps.

enum class MatrixBlock { Baseline, PerUav, Global };

std::string_view matrix_block_name(MatrixBlock block);

struct MatrixCell {
  int map_size = 0;
  int uavs = 0;
  MatrixBlock block = MatrixBlock::Baseline;

  ControllerMode mode() const {
    return block == MatrixBlock::PerUav ? ControllerMode::PerUavNet : ControllerMode::GlobalNet;
  }
};

// Cross product with single-UAV runs collapsed into one Baseline cell (a
// per-UAV controller with one UAV is a global one). Ordered by block
// (baseline, per-UAV, global), then map size, then UAV count.
std::vector<MatrixCell> enumerate_matrix(std::span<const int> sizes, std::span<const int> uav_counts,
                                         std::span<const ControllerMode> modes);

struct MatrixOptions {
  std::vector<int> sizes{5, 6, 7, 8, 9};
  std::vector<int> uav_counts{1, 2, 3};
  std::vector<ControllerMode> modes{ControllerMode::PerUavNet, ControllerMode::GlobalNet};
  std::uint64_t seed = 0;
  // Applied to every cell; empty step budget means default_step_budget(map).
  std::optional<std::int64_t> step_budget;
  std::optional<std::chrono::duration<double>> wall_clock = std::chrono::minutes(30);
  int episodes = 30;
  ControllerConfig controller;
  EpsilonSchedule epsilon;
  RewardTable rewards;
  int jobs = 1;
};

ExperimentSpec spec_for_cell(const MatrixCell& cell, const MatrixOptions& options);

struct MatrixCellResult {
  MatrixCell cell;
  std::optional<ExperimentResult> result;
  std::string error;  // set when the cell failed
};

// Runs every cell, up to `jobs` at a time. A failing cell is reported in its
// slot and does not stop the others. Results are in enumerate_matrix order.
// `on_cell_done` (optional) is called from the worker thread after each cell.
std::vector<MatrixCellResult> run_matrix(const MatrixOptions& options,
                                         const std::function<void(const MatrixCellResult&)>& on_cell_done = {});

}  // namespace uavcov
