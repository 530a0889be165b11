#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavcov/experiment.hpp"

namespace uavcov::metrics {

struct CurvePoint {
  std::int64_t action_ordinal = 0;  // 1-based
  double coverage = 0.0;
};

using CoverageCurve = std::vector<CurvePoint>;

struct Heatmap {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> counts;  // row-major

  std::int64_t at(int row, int col) const { return counts[static_cast<std::size_t>(row) * cols + col]; }
  std::int64_t max() const;
  std::int64_t total() const;

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

std::chrono::duration<double> execution_time(const EpisodeRecord& record);

// VA / TA. Throws UndefinedForEmptyEpisode when TA = 0.
double valid_action_fraction(const EpisodeRecord& record);

// VA_i / TA_i per UAV; nullopt for a UAV that took no action.
std::vector<std::optional<double>> per_uav_valid_fraction(const EpisodeRecord& record);

struct UavFractionPoint {
  int episode = 0;
  int uav = 0;
  std::int64_t total_actions = 0;
  std::int64_t valid_actions = 0;
  std::int64_t cumulative_total = 0;
  std::int64_t cumulative_valid = 0;
};

// Per-episode and running (across episodes) action counts for every UAV.
std::vector<UavFractionPoint> uav_fraction_series(const ExperimentSummary& summary);

// Throws CorruptRecord when the stored trajectory is empty or decreases.
CoverageCurve coverage_curve(const EpisodeRecord& record);

Heatmap visit_heatmap(const EpisodeRecord& record);

struct TimePoint {
  int episode = 0;
  double et_seconds = 0.0;
  bool solved = false;
  std::int64_t sim_steps = 0;
};

std::vector<TimePoint> time_evolution(const ExperimentSummary& summary);

}  // namespace uavcov::metrics
