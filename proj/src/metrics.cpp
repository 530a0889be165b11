#include "uavcov/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov::metrics {

std::int64_t Heatmap::max() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }

std::int64_t Heatmap::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

std::chrono::duration<double> execution_time(const EpisodeRecord& record) {
  return std::chrono::duration<double>(record.finished - record.started);
}

double valid_action_fraction(const EpisodeRecord& record) {
  if (record.total_actions == 0) {
    throw UndefinedForEmptyEpisode("episode " + std::to_string(record.episode) + " took no action");
  }
  return static_cast<double>(record.valid_actions) / static_cast<double>(record.total_actions);
}

std::vector<std::optional<double>> per_uav_valid_fraction(const EpisodeRecord& record) {
  std::vector<std::optional<double>> out;
  out.reserve(record.uav_actions.size());
  for (std::size_t i = 0; i < record.uav_actions.size(); ++i) {
    if (record.uav_actions[i] == 0) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(static_cast<double>(record.uav_valid_actions[i]) /
                       static_cast<double>(record.uav_actions[i]));
    }
  }
  return out;
}

std::vector<UavFractionPoint> uav_fraction_series(const ExperimentSummary& summary) {
  std::vector<UavFractionPoint> out;
  std::vector<std::int64_t> total;
  std::vector<std::int64_t> valid;
  for (const auto& r : summary.records) {
    total.resize(std::max(total.size(), r.uav_actions.size()), 0);
    valid.resize(total.size(), 0);
    for (std::size_t u = 0; u < r.uav_actions.size(); ++u) {
      total[u] += r.uav_actions[u];
      valid[u] += r.uav_valid_actions[u];
      out.push_back({r.episode, static_cast<int>(u), r.uav_actions[u], r.uav_valid_actions[u], total[u], valid[u]});
    }
  }
  return out;
}

CoverageCurve coverage_curve(const EpisodeRecord& record) {
  if (record.coverage_trajectory.empty()) {
    throw CorruptRecord("episode " + std::to_string(record.episode) + " has an empty coverage trajectory");
  }
  CoverageCurve curve;
  curve.reserve(record.coverage_trajectory.size());
  double previous = record.initial_coverage;
  for (std::size_t i = 0; i < record.coverage_trajectory.size(); ++i) {
    const double c = record.coverage_trajectory[i];
    if (c < previous) {
      throw CorruptRecord("coverage decreases at action " + std::to_string(i + 1) + " of episode " +
                          std::to_string(record.episode));
    }
    curve.push_back({static_cast<std::int64_t>(i + 1), c});
    previous = c;
  }
  return curve;
}

Heatmap visit_heatmap(const EpisodeRecord& record) { return {record.rows, record.cols, record.visit_counts}; }

std::vector<TimePoint> time_evolution(const ExperimentSummary& summary) {
  std::vector<TimePoint> out;
  out.reserve(summary.records.size());
  for (const auto& r : summary.records) out.push_back({r.episode, r.et_seconds(), r.solved, r.sim_steps});
  return out;
}

}  // namespace uavcov::metrics
