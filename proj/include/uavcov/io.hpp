#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavcov/experiment.hpp"
#include "uavcov/geometry.hpp"
#include "uavcov/metrics.hpp"

namespace uavcov::io {

// ---------------------------------------------------------------------------
// Map files
//
// Grid text: an optional "grid 1" header line, then one line per row with
//   '.' visitable, '#' non-visitable, 'S' visitable start.
// Starts are listed in row-major order of their 'S' cells.
//
// Polygon JSON: {"format": "polygon", "version": 1,
//                "vertices": [[x, y], ...],
//                "rows": R, "cols": C        (or "cell_size": meters),
//                "starts": [[row, col], ...]}   (optional)
// ---------------------------------------------------------------------------

inline constexpr int kGridFormatVersion = 1;
inline constexpr int kPolygonFormatVersion = 1;

struct LoadedMap {
  GridMap map;
  std::optional<geometry::Polygon> polygon;
};

struct RasterOverride {
  std::optional<int> rows;
  std::optional<int> cols;
  std::optional<double> cell_size;
};

GridMap parse_grid_text(std::string_view text);
std::string serialize_grid(const GridMap& map);

LoadedMap parse_polygon_json(std::string_view text, const RasterOverride& raster = {});

// Picks the format from the first non-blank character ('{' means JSON).
LoadedMap parse_map_text(std::string_view text, const RasterOverride& raster = {});
LoadedMap parse_map(const std::filesystem::path& path, const RasterOverride& raster = {});

// ---------------------------------------------------------------------------
// Run configuration: "key = value" lines, '#' starts a comment.
// ---------------------------------------------------------------------------

struct RunConfig {
  double gamma = 0.91;
  double epsilon_initial = 0.47;
  double epsilon_factor = 0.93;
  double epsilon_floor = 0.05;
  std::size_t memory_capacity = kDefaultMemoryCapacity;
  std::size_t hidden_width = kDefaultHiddenWidth;
  std::size_t minibatch_size = 16;
  int episodes = 30;
  int uavs = 1;
  ControllerMode controller = ControllerMode::GlobalNet;
  HeadMode head = HeadMode::Linear;
  DenominatorMode reward_denominator = DenominatorMode::RemainingBefore;
  double reward_new_cell = 358.74;
  double reward_visited = -31.14;
  double reward_non_visitable = -225.17;
  std::optional<std::int64_t> step_budget;           // empty: 40 x visitable cells
  std::optional<double> time_budget_seconds = 1800;  // empty: no wall-clock limit
  std::uint64_t seed = 0;
  double learning_rate = 0.1;
  double rms_rho = 0.9;
  double rms_epsilon = 1e-8;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws ParseError for malformed lines or values and unknown keys,
// RangeError for values outside their domain.
RunConfig parse_config_text(std::string_view text, const Overrides& overrides = {});
RunConfig parse_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides = {});

// Applies one key=value to `config`.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
void validate(const RunConfig& config);

// Every key with full precision; parse_config_text(to_text(c)) == c.
std::string config_to_text(const RunConfig& config);

ExperimentSpec make_spec(const RunConfig& config, const GridMap& map);
MatrixOptions make_matrix_options(const RunConfig& config);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr std::string_view kEpisodeCsvHeader =
    "episode,epsilon,total_actions,valid_actions,pa,solved,sim_steps,et_seconds,final_coverage";
inline constexpr std::string_view kMatrixCsvHeader =
    "map_size,controller,uavs,solutions_found,episodes,min_solution_et_seconds,min_solution_sim_steps";
inline constexpr std::string_view kCoverageCsvHeader = "episode,action_ordinal,coverage";
inline constexpr std::string_view kActionCsvHeader =
    "episode,action_ordinal,uav,action,cell_class,row,col,reward,coverage";
inline constexpr std::string_view kVisitCsvHeader = "episode,row,col,count";
inline constexpr std::string_view kTimeCsvHeader = "episode,et_seconds,solved,sim_steps";
inline constexpr std::string_view kFractionCsvHeader =
    "episode,uav,total_actions,valid_actions,pa,cumulative_total,cumulative_valid,cumulative_pa";

// Fixed 6-decimal formatting used by every CSV.
std::string format_fixed(double value);

std::string episode_csv(const ExperimentSummary& summary);
std::string coverage_csv(const ExperimentSummary& summary);
std::string action_csv(const ExperimentSummary& summary);
std::string visit_csv(const ExperimentSummary& summary);
std::string time_csv(const ExperimentSummary& summary);
std::string fraction_csv(const ExperimentSummary& summary);
std::string summary_text(const ExperimentSummary& summary);

struct MatrixRow {
  int map_size = 0;
  std::string controller;
  int uavs = 0;
  int solutions_found = 0;
  int episodes = 0;
  std::optional<double> min_solution_et_seconds;
  std::optional<std::int64_t> min_solution_sim_steps;
  std::string error;
};

std::vector<MatrixRow> matrix_rows(const std::vector<MatrixCellResult>& results);
std::string matrix_csv(const std::vector<MatrixRow>& rows);
// Human-readable table with "x out of E episodes" per cell.
std::string matrix_table(const std::vector<MatrixRow>& rows);

std::string to_pgm(const metrics::Heatmap& heatmap);
metrics::Heatmap parse_pgm(std::string_view text);

// Writes manifest.txt, map.grid, episodes.csv, coverage.csv, actions.csv,
// visits.csv, summary.txt and one checkpoint per network into out_dir.
void write_run(const std::filesystem::path& out_dir, const RunConfig& config, const GridMap& map,
               const ExperimentResult& result);

// Rebuilds the per-episode records of a run directory from its CSV files
// (timestamps are reconstructed from et_seconds).
ExperimentSummary read_run(const std::filesystem::path& run_dir);

// Small CSV helpers shared by the reader side and tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::string_view expected_header);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace uavcov::io
