#include <gtest/gtest.h>

#include <random>

#include "uavcov/errors.hpp"
#include "uavcov/experiment.hpp"
#include "uavcov/metrics.hpp"

using namespace uavcov;

namespace {

const Budget kLoose{1000, std::nullopt};

EpisodeRecord scripted(const GridMap& map, int uavs, std::vector<Action> actions) {
  return run_scripted_episode(map, uavs, actions, {}, kLoose);
}

}  // namespace

TEST(ValidFractionTest, TwoBumpsInTen) {
  // 3x3 from (0,0): two wall bumps then eight discoveries via a snake.
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  const EpisodeRecord r = scripted(map, 1, {North, West, East, East, South, West, West, South, East, East});
  EXPECT_EQ(r.total_actions, 10);
  EXPECT_EQ(r.valid_actions, 8);
  EXPECT_DOUBLE_EQ(metrics::valid_action_fraction(r), 0.8);
  EXPECT_TRUE(r.solved);
}

TEST(ValidFractionTest, RevisitsAreNotValid) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  const EpisodeRecord r = scripted(map, 1, {East, West, East, East});
  EXPECT_EQ(r.valid_actions, 2);
  EXPECT_DOUBLE_EQ(metrics::valid_action_fraction(r), 0.5);
}

TEST(ValidFractionTest, EmptyEpisodeIsUndefined) {
  const EpisodeRecord r = scripted(GridMap::open(3, 3), 1, {});
  EXPECT_THROW(metrics::valid_action_fraction(r), UndefinedForEmptyEpisode);
}

TEST(ValidFractionTest, PerUav) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  // UAV 0 discovers (0,1); UAV 1 then moves onto it; UAV 0 bumps; UAV 1 discovers (0,2).
  const EpisodeRecord r = scripted(map, 2, {East, East, North, East});
  const auto fractions = metrics::per_uav_valid_fraction(r);
  ASSERT_EQ(fractions.size(), 2u);
  EXPECT_DOUBLE_EQ(*fractions[0], 0.5);
  EXPECT_DOUBLE_EQ(*fractions[1], 0.5);

  const EpisodeRecord one = scripted(map, 2, {East});
  const auto partial = metrics::per_uav_valid_fraction(one);
  EXPECT_DOUBLE_EQ(*partial[0], 1.0);
  EXPECT_FALSE(partial[1].has_value());
}

TEST(FractionSeriesTest, Cumulative) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  ExperimentSummary s =
      summarize({scripted(map, 1, {East, North}), scripted(map, 1, {South, South, West})});
  s.records[1].episode = 1;
  const auto series = metrics::uav_fraction_series(s);
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[1].total_actions, 3);
  EXPECT_EQ(series[1].valid_actions, 2);
  EXPECT_EQ(series[1].cumulative_total, 5);
  EXPECT_EQ(series[1].cumulative_valid, 3);
}

TEST(CoverageCurveTest, SnakeOnThreeByThree) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  const EpisodeRecord r = scripted(map, 1, {East, East, South, West, West, South, East, East});
  const auto curve = metrics::coverage_curve(r);
  ASSERT_EQ(curve.size(), 8u);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    EXPECT_EQ(curve[k].action_ordinal, static_cast<std::int64_t>(k + 1));
    EXPECT_DOUBLE_EQ(curve[k].coverage, (k + 2) / 9.0);
  }
  EXPECT_DOUBLE_EQ(curve.back().coverage, 1.0);
}

TEST(CoverageCurveTest, CorruptRecords) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  EpisodeRecord r = scripted(map, 1, {East, East});
  r.coverage_trajectory[1] = 0.0;
  EXPECT_THROW(metrics::coverage_curve(r), CorruptRecord);
  r.coverage_trajectory.clear();
  EXPECT_THROW(metrics::coverage_curve(r), CorruptRecord);
}

TEST(HeatmapTest, CountsVisitsIncludingStart) {
  const GridMap map = GridMap::open(3, 3);
  using enum Action;
  const EpisodeRecord r = scripted(map, 1, {East, West, North, East});
  const metrics::Heatmap h = metrics::visit_heatmap(r);
  EXPECT_EQ(h.at(0, 0), 2);
  EXPECT_EQ(h.at(0, 1), 2);
  EXPECT_EQ(h.total(), 4);  // one start + three moves that changed position
  EXPECT_EQ(h.max(), 2);
}

TEST(HeatmapTest, NonVisitableCellsStayZero) {
  const GridMap map(2, 2, {1, 0, 1, 1}, {{0, 0}});
  using enum Action;
  const EpisodeRecord r = scripted(map, 2, {East, South, East, North, South, East});
  const metrics::Heatmap h = metrics::visit_heatmap(r);
  EXPECT_EQ(h.at(0, 1), 0);
  EXPECT_EQ(h.at(0, 0), 3);  // both starts plus UAV 1 returning
}

TEST(TimeEvolutionTest, OnePointPerEpisode) {
  const GridMap map = GridMap::open(2, 2);
  using enum Action;
  ExperimentSummary s = summarize({scripted(map, 1, {East, South, West}), scripted(map, 1, {East})});
  const auto points = metrics::time_evolution(s);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_TRUE(points[0].solved);
  EXPECT_FALSE(points[1].solved);
  EXPECT_EQ(points[0].sim_steps, 3);
  EXPECT_GE(points[0].et_seconds, 0.0);
  EXPECT_EQ(s.solutions_found, 1);
  EXPECT_EQ(s.min_solution_sim_steps, 3);
}

TEST(MetricsPropertyTest, RandomScriptedEpisodes) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> act(0, 3), len(0, 60), uavs(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const GridMap map(3, 4, {1, 1, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1}, {{0, 0}, {2, 3}});
    std::vector<Action> actions(len(rng));
    for (auto& a : actions) a = action_from_index(act(rng));
    const int n = uavs(rng);
    const EpisodeRecord r = scripted(map, n, actions);
    std::int64_t new_cells = 0, moves = 0;
    for (const auto& e : r.actions) {
      new_cells += e.cell_class == CellClass::NewCell;
      moves += e.cell_class != CellClass::NonVisitable;
    }
    EXPECT_EQ(r.valid_actions, new_cells);
    if (r.total_actions > 0) {
      EXPECT_DOUBLE_EQ(metrics::valid_action_fraction(r),
                       static_cast<double>(r.valid_actions) / r.total_actions);
      metrics::coverage_curve(r);
    }
    const auto h = metrics::visit_heatmap(r);
    EXPECT_EQ(h.total(), n + moves);
    EXPECT_EQ(h.at(0, 2), 0);
    EXPECT_EQ(h.at(2, 0), 0);
  }
}
