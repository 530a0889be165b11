#include <gtest/gtest.h>

#include <thread>

#include "uavcov/errors.hpp"
#include "uavcov/experiment.hpp"

using namespace uavcov;

namespace {

ExperimentSpec small_spec(int size, int uavs, ControllerMode mode, std::uint64_t seed, int episodes) {
  ExperimentSpec spec = default_spec(GridMap::open(size, size), uavs, mode, seed);
  spec.episodes = episodes;
  spec.controller.hidden_width = 16;
  return spec;
}

void expect_same_records(const ExperimentSummary& a, const ExperimentSummary& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    EXPECT_EQ(x.epsilon, y.epsilon);
    EXPECT_EQ(x.total_actions, y.total_actions);
    EXPECT_EQ(x.valid_actions, y.valid_actions);
    EXPECT_EQ(x.sim_steps, y.sim_steps);
    EXPECT_EQ(x.coverage_trajectory, y.coverage_trajectory);
    EXPECT_EQ(x.visit_counts, y.visit_counts);
    ASSERT_EQ(x.actions.size(), y.actions.size());
    for (std::size_t k = 0; k < x.actions.size(); ++k) {
      EXPECT_EQ(x.actions[k].action, y.actions[k].action);
      EXPECT_EQ(x.actions[k].reward, y.actions[k].reward);
    }
  }
}

}  // namespace

TEST(ExperimentTest, ZeroStepBudgetTakesNoActions) {
  ExperimentSpec spec = small_spec(3, 1, ControllerMode::GlobalNet, 1, 2);
  spec.budget.max_steps = 0;
  const ExperimentResult result = run_experiment(spec);
  for (const auto& r : result.summary.records) {
    EXPECT_EQ(r.total_actions, 0);
    EXPECT_FALSE(r.solved);
  }
  EXPECT_EQ(result.summary.solutions_found, 0);
  EXPECT_FALSE(result.summary.min_solution_sim_steps.has_value());
}

TEST(ExperimentTest, TwoCellMapIsSolvedInOneStep) {
  ExperimentSpec spec = default_spec(GridMap::open(1, 2), 1, ControllerMode::GlobalNet, 5);
  spec.controller.hidden_width = 8;
  spec.episodes = 5;
  const ExperimentResult result = run_experiment(spec);
  EXPECT_EQ(result.summary.solutions_found, 5);
  for (const auto& r : result.summary.records) {
    EXPECT_TRUE(r.solved);
    EXPECT_EQ(r.valid_actions, 1);
    EXPECT_DOUBLE_EQ(r.final_coverage(), 1.0);
  }
}

TEST(ExperimentTest, ScriptedSnakeIsPerfect) {
  using enum Action;
  const std::vector<Action> snake{East, East, South, West, West, South, East, East};
  const EpisodeRecord r = run_scripted_episode(GridMap::open(3, 3), 1, snake, {}, {100, std::nullopt});
  EXPECT_EQ(r.total_actions, 8);
  EXPECT_EQ(r.valid_actions, 8);
  EXPECT_EQ(r.sim_steps, 8);
  EXPECT_TRUE(r.solved);
}

TEST(ExperimentTest, ScriptedStopsAtBudget) {
  using enum Action;
  const std::vector<Action> walk{East, West, East, West, East};
  const EpisodeRecord r = run_scripted_episode(GridMap::open(3, 3), 1, walk, {}, {3, std::nullopt});
  EXPECT_EQ(r.total_actions, 3);
  EXPECT_FALSE(r.solved);
}

TEST(ExperimentTest, SimStepsCountRoundsForSwarms) {
  using enum Action;
  const std::vector<Action> acts{East, South, East, South};
  const EpisodeRecord r = run_scripted_episode(GridMap::open(3, 3), 2, acts, {}, {100, std::nullopt});
  EXPECT_EQ(r.total_actions, 4);
  EXPECT_EQ(r.sim_steps, 2);
  EXPECT_EQ(r.uav_actions, (std::vector<std::int64_t>{2, 2}));
}

TEST(ExperimentTest, DeterministicForSeed) {
  const ExperimentSpec spec = small_spec(4, 2, ControllerMode::GlobalNet, 77, 3);
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  expect_same_records(a.summary, b.summary);
  EXPECT_EQ(a.networks, b.networks);
}

TEST(ExperimentTest, SeedsDiffer) {
  const ExperimentResult a = run_experiment(small_spec(4, 1, ControllerMode::GlobalNet, 1, 2));
  const ExperimentResult b = run_experiment(small_spec(4, 1, ControllerMode::GlobalNet, 2, 2));
  EXPECT_NE(a.networks, b.networks);
}

TEST(ExperimentTest, PerUavKeepsOneNetworkPerUav) {
  const ExperimentResult r = run_experiment(small_spec(3, 2, ControllerMode::PerUavNet, 3, 2));
  ASSERT_EQ(r.networks.size(), 2u);
  EXPECT_NE(r.networks[0], r.networks[1]);
  EXPECT_EQ(run_experiment(small_spec(3, 2, ControllerMode::GlobalNet, 3, 1)).networks.size(), 1u);
}

TEST(ExperimentTest, EpsilonDecaysPerEpisode) {
  const ExperimentResult r = run_experiment(small_spec(3, 1, ControllerMode::GlobalNet, 3, 3));
  EXPECT_DOUBLE_EQ(r.summary.records[0].epsilon, 0.47);
  EXPECT_NEAR(r.summary.records[1].epsilon, 0.4371, 1e-12);
  EXPECT_NEAR(r.summary.records[2].epsilon, 0.47 * 0.93 * 0.93, 1e-12);
}

TEST(ExperimentTest, WallClockBudgetBinds) {
  ExperimentSpec spec = small_spec(9, 1, ControllerMode::GlobalNet, 3, 1);
  spec.controller.hidden_width = 167;
  spec.budget.max_steps = 1'000'000'000;
  spec.budget.wall_clock = std::chrono::milliseconds(300);
  spec.rewards.new_cell_base = 0;  // nothing to learn; keeps wandering
  const ExperimentResult r = run_experiment(spec);
  const auto& rec = r.summary.records[0];
  if (!rec.solved) {
    EXPECT_GE(rec.et_seconds(), 0.3);
    EXPECT_LT(rec.et_seconds(), 1.5);
  }
}

TEST(MatrixTest, EnumerationCounts) {
  const std::vector<int> sizes{5, 6, 7, 8, 9}, uavs{1, 2, 3};
  const std::vector<ControllerMode> both{ControllerMode::PerUavNet, ControllerMode::GlobalNet};
  const auto cells = enumerate_matrix(sizes, uavs, both);
  ASSERT_EQ(cells.size(), 25u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(cells[i].block, MatrixBlock::Baseline);
    EXPECT_EQ(cells[i].map_size, 5 + i);
    EXPECT_EQ(cells[i].uavs, 1);
  }
  for (int i = 5; i < 15; ++i) EXPECT_EQ(cells[i].block, MatrixBlock::PerUav);
  for (int i = 15; i < 25; ++i) EXPECT_EQ(cells[i].block, MatrixBlock::Global);
  EXPECT_EQ(cells[5].map_size, 5);
  EXPECT_EQ(cells[5].uavs, 2);
  EXPECT_EQ(cells[6].uavs, 3);

  const std::vector<int> five{5}, one{1}, two{2};
  EXPECT_EQ(enumerate_matrix(five, one, both).size(), 1u);
  EXPECT_EQ(enumerate_matrix(five, two, both).size(), 2u);
}

TEST(MatrixTest, ParallelMatchesSerial) {
  MatrixOptions options;
  options.sizes = {3, 4};
  options.uav_counts = {1, 2};
  options.episodes = 2;
  options.seed = 11;
  options.step_budget = 40;
  options.controller.hidden_width = 8;
  const auto serial = run_matrix(options);
  options.jobs = 3;
  int callbacks = 0;
  const auto parallel = run_matrix(options, [&](const MatrixCellResult&) { ++callbacks; });
  EXPECT_EQ(callbacks, 6);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    ASSERT_TRUE(serial[i].result && parallel[i].result);
    EXPECT_EQ(serial[i].cell.map_size, parallel[i].cell.map_size);
    expect_same_records(serial[i].result->summary, parallel[i].result->summary);
    EXPECT_EQ(serial[i].result->networks, parallel[i].result->networks);
  }
}

TEST(DeriveRngTest, StreamsAreIndependent) {
  Rng a = derive_rng(1, 0), b = derive_rng(1, 1), c = derive_rng(1, 0);
  EXPECT_NE(a(), b());
  Rng d = derive_rng(1, 0);
  EXPECT_EQ(c(), d());
}
