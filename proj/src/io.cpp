#include "uavcov/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "uavcov/errors.hpp"

namespace uavcov::io {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

template <typename T>
T field_number(const std::string& field, std::string_view what, int line) {
  const auto v = parse_number<T>(field);
  if (!v) throw ParseError("bad " + std::string(what) + " value '" + field + "'", line, 1);
  return *v;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::pair<int, int> line_col_of(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

// --- maps ------------------------------------------------------------------

GridMap parse_grid_text(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t first = 0;
  if (!lines.empty() && lines[0].starts_with("grid")) {
    const auto version = parse_number<int>(lines[0].substr(4));
    if (!version) throw ParseError("malformed grid header '" + std::string(lines[0]) + "'", 1, 1);
    if (*version != kGridFormatVersion) {
      throw ParseError("unsupported grid format version " + std::to_string(*version), 1, 6);
    }
    first = 1;
  }
  if (first >= lines.size()) throw ParseError("grid has no rows", static_cast<int>(first) + 1, 1);

  const std::size_t cols = lines[first].size();
  if (cols == 0) throw ParseError("empty grid row", static_cast<int>(first) + 1, 1);
  std::vector<std::uint8_t> mask;
  std::vector<Cell> starts;
  int rows = 0;
  for (std::size_t i = first; i < lines.size(); ++i, ++rows) {
    const auto line_no = static_cast<int>(i) + 1;
    const std::string_view row = lines[i];
    if (row.size() != cols) {
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " + std::to_string(cols), line_no,
                       static_cast<int>(std::min(row.size(), cols)) + 1);
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      switch (row[c]) {
        case '.': mask.push_back(1); break;
        case '#': mask.push_back(0); break;
        case 'S':
          mask.push_back(1);
          starts.push_back({rows, static_cast<int>(c)});
          break;
        default:
          throw ParseError(std::string("unexpected character '") + row[c] + "'", line_no, static_cast<int>(c) + 1);
      }
    }
  }
  if (starts.empty()) throw ConstraintError("grid has no start cell 'S'");
  if (std::find(mask.begin(), mask.end(), 1) == mask.end()) throw NoVisitableCells("grid has no visitable cell");
  return GridMap(rows, static_cast<int>(cols), std::move(mask), std::move(starts));
}

std::string serialize_grid(const GridMap& map) {
  std::string out = "grid " + std::to_string(kGridFormatVersion) + "\n";
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Cell cell{r, c};
      const auto& s = map.starts();
      if (std::find(s.begin(), s.end(), cell) != s.end()) {
        out += 'S';
      } else {
        out += map.visitable(cell) ? '.' : '#';
      }
    }
    out += '\n';
  }
  return out;
}

LoadedMap parse_polygon_json(std::string_view text, const RasterOverride& raster) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("invalid polygon JSON: ") + e.what(), line, col);
  }
  auto fail = [](const std::string& what) { return ParseError("polygon map: " + what, 1, 1); };
  if (!doc.is_object()) throw fail("top level must be an object");
  if (doc.contains("format") && doc["format"] != "polygon") throw fail("format must be \"polygon\"");
  if (!doc.contains("version") || !doc["version"].is_number_integer()) throw fail("missing integer \"version\"");
  if (doc["version"].get<int>() != kPolygonFormatVersion) {
    throw fail("unsupported version " + std::to_string(doc["version"].get<int>()));
  }
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) throw fail("missing \"vertices\" array");
  std::vector<geometry::Point> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw fail("each vertex must be [x, y]");
    }
    vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  geometry::Polygon polygon(std::move(vertices));

  std::optional<int> rows = raster.rows;
  std::optional<int> cols = raster.cols;
  std::optional<double> cell_size = raster.cell_size;
  const bool cli_dims = raster.rows || raster.cols || raster.cell_size;
  if (!cli_dims) {
    if (doc.contains("rows")) rows = doc["rows"].get<int>();
    if (doc.contains("cols")) cols = doc["cols"].get<int>();
    if (doc.contains("cell_size")) cell_size = doc["cell_size"].get<double>();
  }
  if (cell_size && (rows || cols)) throw ConstraintError("give either rows/cols or cell_size, not both");
  if (cell_size) {
    const auto shape = geometry::shape_for_cell_size(geometry::compute_mbr(polygon), *cell_size);
    rows = shape.rows;
    cols = shape.cols;
  }
  if (!rows || !cols) throw ConstraintError("polygon map needs rows and cols or cell_size");

  GridMap grid = geometry::rasterize(polygon, *rows, *cols);
  if (doc.contains("starts")) {
    std::vector<Cell> starts;
    for (const auto& s : doc["starts"]) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer()) {
        throw fail("each start must be [row, col]");
      }
      starts.push_back({s[0].get<int>(), s[1].get<int>()});
    }
    if (starts.empty()) throw ConstraintError("\"starts\" is empty");
    grid = GridMap(grid.rows(), grid.cols(), grid.mask(), std::move(starts));
  }
  return {std::move(grid), std::move(polygon)};
}

LoadedMap parse_map_text(std::string_view text, const RasterOverride& raster) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_polygon_json(text, raster);
  return {parse_grid_text(text), std::nullopt};
}

LoadedMap parse_map(const std::filesystem::path& path, const RasterOverride& raster) {
  return parse_map_text(read_file(path), raster);
}

// --- configuration ---------------------------------------------------------

namespace {

template <typename T>
T expect_number(std::string_view key, std::string_view value) {
  const auto v = parse_number<T>(value);
  if (!v) throw ParseError("invalid value '" + std::string(value) + "' for " + std::string(key), 0, 0);
  return *v;
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "gamma") c.gamma = expect_number<double>(key, value);
  else if (key == "epsilon_initial") c.epsilon_initial = expect_number<double>(key, value);
  else if (key == "epsilon_factor") c.epsilon_factor = expect_number<double>(key, value);
  else if (key == "epsilon_floor") c.epsilon_floor = expect_number<double>(key, value);
  else if (key == "memory_capacity") c.memory_capacity = expect_number<std::size_t>(key, value);
  else if (key == "hidden_width") c.hidden_width = expect_number<std::size_t>(key, value);
  else if (key == "minibatch_size") c.minibatch_size = expect_number<std::size_t>(key, value);
  else if (key == "episodes") c.episodes = expect_number<int>(key, value);
  else if (key == "uavs") c.uavs = expect_number<int>(key, value);
  else if (key == "reward_new_cell") c.reward_new_cell = expect_number<double>(key, value);
  else if (key == "reward_visited") c.reward_visited = expect_number<double>(key, value);
  else if (key == "reward_non_visitable") c.reward_non_visitable = expect_number<double>(key, value);
  else if (key == "seed") c.seed = expect_number<std::uint64_t>(key, value);
  else if (key == "learning_rate") c.learning_rate = expect_number<double>(key, value);
  else if (key == "rms_rho") c.rms_rho = expect_number<double>(key, value);
  else if (key == "rms_epsilon") c.rms_epsilon = expect_number<double>(key, value);
  else if (key == "step_budget") {
    if (value == "auto") c.step_budget.reset();
    else c.step_budget = expect_number<std::int64_t>(key, value);
  } else if (key == "time_budget_seconds") {
    if (value == "none") c.time_budget_seconds.reset();
    else c.time_budget_seconds = expect_number<double>(key, value);
  } else if (key == "controller") {
    if (value == "global") c.controller = ControllerMode::GlobalNet;
    else if (value == "per-uav") c.controller = ControllerMode::PerUavNet;
    else throw ParseError("controller must be global or per-uav", 0, 0);
  } else if (key == "head") {
    if (value == "linear") c.head = HeadMode::Linear;
    else if (value == "softmax") c.head = HeadMode::Softmax;
    else throw ParseError("head must be linear or softmax", 0, 0);
  } else if (key == "reward_denominator") {
    if (value == "remaining") c.reward_denominator = DenominatorMode::RemainingBefore;
    else if (value == "visited") c.reward_denominator = DenominatorMode::VisitedAfter;
    else throw ParseError("reward_denominator must be remaining or visited", 0, 0);
  } else {
    throw ParseError("unknown configuration key '" + std::string(key) + "'", 0, 0);
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw RangeError(what);
  };
  require(c.gamma >= 0 && c.gamma <= 1, "gamma must lie in [0, 1]");
  require(c.epsilon_initial >= 0 && c.epsilon_initial <= 1, "epsilon_initial must lie in [0, 1]");
  require(c.epsilon_factor > 0 && c.epsilon_factor <= 1, "epsilon_factor must lie in (0, 1]");
  require(c.epsilon_floor >= 0 && c.epsilon_floor <= 1, "epsilon_floor must lie in [0, 1]");
  require(c.memory_capacity >= 1, "memory_capacity must be at least 1");
  require(c.hidden_width >= 1, "hidden_width must be at least 1");
  require(c.minibatch_size >= 1, "minibatch_size must be at least 1");
  require(c.episodes >= 1, "episodes must be at least 1");
  require(c.uavs >= 1, "uavs must be at least 1");
  require(std::isfinite(c.reward_new_cell) && std::isfinite(c.reward_visited) &&
              std::isfinite(c.reward_non_visitable),
          "rewards must be finite");
  require(!c.step_budget || *c.step_budget >= 0, "step_budget must be non-negative");
  require(!c.time_budget_seconds || (*c.time_budget_seconds > 0 && std::isfinite(*c.time_budget_seconds)),
          "time_budget_seconds must be positive");
  require(c.learning_rate > 0 && std::isfinite(c.learning_rate), "learning_rate must be positive");
  require(c.rms_rho >= 0 && c.rms_rho < 1, "rms_rho must lie in [0, 1)");
  require(c.rms_epsilon > 0 && std::isfinite(c.rms_epsilon), "rms_epsilon must be positive");
}

RunConfig parse_config_text(std::string_view text, const Overrides& overrides) {
  RunConfig config;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, 1);
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line_no, 1);
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const ParseError& e) {
      std::string what = e.what();
      what = what.substr(0, what.rfind(" (line"));
      throw ParseError(what, line_no, static_cast<int>(eq) + 2);
    }
  }
  for (const auto& [key, value] : overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides) {
  return parse_config_text(path ? read_file(*path) : std::string(), overrides);
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "gamma = " << format_full(c.gamma) << "\n"
      << "epsilon_initial = " << format_full(c.epsilon_initial) << "\n"
      << "epsilon_factor = " << format_full(c.epsilon_factor) << "\n"
      << "epsilon_floor = " << format_full(c.epsilon_floor) << "\n"
      << "memory_capacity = " << c.memory_capacity << "\n"
      << "hidden_width = " << c.hidden_width << "\n"
      << "minibatch_size = " << c.minibatch_size << "\n"
      << "episodes = " << c.episodes << "\n"
      << "uavs = " << c.uavs << "\n"
      << "controller = " << controller_mode_name(c.controller) << "\n"
      << "head = " << head_mode_name(c.head) << "\n"
      << "reward_denominator = "
      << (c.reward_denominator == DenominatorMode::RemainingBefore ? "remaining" : "visited") << "\n"
      << "reward_new_cell = " << format_full(c.reward_new_cell) << "\n"
      << "reward_visited = " << format_full(c.reward_visited) << "\n"
      << "reward_non_visitable = " << format_full(c.reward_non_visitable) << "\n"
      << "step_budget = " << (c.step_budget ? std::to_string(*c.step_budget) : std::string("auto")) << "\n"
      << "time_budget_seconds = " << (c.time_budget_seconds ? format_full(*c.time_budget_seconds) : "none") << "\n"
      << "seed = " << c.seed << "\n"
      << "learning_rate = " << format_full(c.learning_rate) << "\n"
      << "rms_rho = " << format_full(c.rms_rho) << "\n"
      << "rms_epsilon = " << format_full(c.rms_epsilon) << "\n";
  return out.str();
}

namespace {

ControllerConfig controller_config(const RunConfig& c) {
  ControllerConfig cc;
  cc.mode = c.controller;
  cc.gamma = c.gamma;
  cc.minibatch_size = c.minibatch_size;
  cc.memory_capacity = c.memory_capacity;
  cc.hidden_width = c.hidden_width;
  cc.head = c.head;
  cc.optimizer = {c.learning_rate, c.rms_rho, c.rms_epsilon};
  return cc;
}

RewardTable reward_table(const RunConfig& c) {
  return {c.reward_new_cell, c.reward_visited, c.reward_non_visitable, c.reward_denominator};
}

std::optional<std::chrono::duration<double>> wall_clock(const RunConfig& c) {
  if (!c.time_budget_seconds) return std::nullopt;
  return std::chrono::duration<double>(*c.time_budget_seconds);
}

}  // namespace

ExperimentSpec make_spec(const RunConfig& c, const GridMap& map) {
  ExperimentSpec spec = default_spec(map, c.uavs, c.controller, c.seed);
  if (c.step_budget) spec.budget.max_steps = *c.step_budget;
  spec.budget.wall_clock = wall_clock(c);
  spec.episodes = c.episodes;
  spec.controller = controller_config(c);
  spec.epsilon = EpsilonSchedule(c.epsilon_initial, c.epsilon_factor, c.epsilon_floor);
  spec.rewards = reward_table(c);
  return spec;
}

MatrixOptions make_matrix_options(const RunConfig& c) {
  MatrixOptions options;
  options.seed = c.seed;
  options.step_budget = c.step_budget;
  options.wall_clock = wall_clock(c);
  options.episodes = c.episodes;
  options.controller = controller_config(c);
  options.epsilon = EpsilonSchedule(c.epsilon_initial, c.epsilon_factor, c.epsilon_floor);
  options.rewards = reward_table(c);
  return options;
}

// --- reports ---------------------------------------------------------------

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string episode_csv(const ExperimentSummary& summary) {
  std::string out(kEpisodeCsvHeader);
  out += '\n';
  for (const auto& r : summary.records) {
    out += std::to_string(r.episode) + ',' + format_fixed(r.epsilon) + ',' + std::to_string(r.total_actions) + ',' +
           std::to_string(r.valid_actions) + ',' +
           (r.total_actions > 0 ? format_fixed(metrics::valid_action_fraction(r)) : std::string()) + ',' +
           (r.solved ? "1" : "0") + ',' + std::to_string(r.sim_steps) + ',' + format_fixed(r.et_seconds()) + ',' +
           format_fixed(r.final_coverage()) + '\n';
  }
  return out;
}

std::string coverage_csv(const ExperimentSummary& summary) {
  std::string out(kCoverageCsvHeader);
  out += '\n';
  for (const auto& r : summary.records) {
    if (r.coverage_trajectory.empty()) continue;
    for (const auto& p : metrics::coverage_curve(r)) {
      out += std::to_string(r.episode) + ',' + std::to_string(p.action_ordinal) + ',' + format_fixed(p.coverage) + '\n';
    }
  }
  return out;
}

std::string action_csv(const ExperimentSummary& summary) {
  std::string out(kActionCsvHeader);
  out += '\n';
  for (const auto& r : summary.records) {
    for (std::size_t i = 0; i < r.actions.size(); ++i) {
      const auto& a = r.actions[i];
      out += std::to_string(r.episode) + ',' + std::to_string(i + 1) + ',' + std::to_string(a.uav) + ',' +
             std::string(action_name(a.action)) + ',' + std::string(cell_class_name(a.cell_class)) + ',' +
             std::to_string(a.position.row) + ',' + std::to_string(a.position.col) + ',' + format_fixed(a.reward) +
             ',' + format_fixed(a.coverage) + '\n';
    }
  }
  return out;
}

std::string visit_csv(const ExperimentSummary& summary) {
  std::string out(kVisitCsvHeader);
  out += '\n';
  for (const auto& r : summary.records) {
    for (int row = 0; row < r.rows; ++row) {
      for (int col = 0; col < r.cols; ++col) {
        out += std::to_string(r.episode) + ',' + std::to_string(row) + ',' + std::to_string(col) + ',' +
               std::to_string(r.visit_counts[static_cast<std::size_t>(row) * r.cols + col]) + '\n';
      }
    }
  }
  return out;
}

std::string time_csv(const ExperimentSummary& summary) {
  std::string out(kTimeCsvHeader);
  out += '\n';
  for (const auto& p : metrics::time_evolution(summary)) {
    out += std::to_string(p.episode) + ',' + format_fixed(p.et_seconds) + ',' + (p.solved ? "1" : "0") + ',' +
           std::to_string(p.sim_steps) + '\n';
  }
  return out;
}

std::string fraction_csv(const ExperimentSummary& summary) {
  std::string out(kFractionCsvHeader);
  out += '\n';
  auto ratio = [](std::int64_t valid, std::int64_t total) {
    return total > 0 ? format_fixed(static_cast<double>(valid) / static_cast<double>(total)) : std::string();
  };
  for (const auto& p : metrics::uav_fraction_series(summary)) {
    out += std::to_string(p.episode) + ',' + std::to_string(p.uav) + ',' + std::to_string(p.total_actions) + ',' +
           std::to_string(p.valid_actions) + ',' + ratio(p.valid_actions, p.total_actions) + ',' +
           std::to_string(p.cumulative_total) + ',' + std::to_string(p.cumulative_valid) + ',' +
           ratio(p.cumulative_valid, p.cumulative_total) + '\n';
  }
  return out;
}

std::string summary_text(const ExperimentSummary& s) {
  std::string out = "solutions_found = " + std::to_string(s.solutions_found) + " out of " +
                    std::to_string(s.episodes) + "\n";
  out += "min_solution_sim_steps = " +
         (s.min_solution_sim_steps ? std::to_string(*s.min_solution_sim_steps) : std::string()) + "\n";
  out += "min_solution_et_seconds = " +
         (s.min_solution_et_seconds ? format_fixed(*s.min_solution_et_seconds) : std::string()) + "\n";
  return out;
}

std::vector<MatrixRow> matrix_rows(const std::vector<MatrixCellResult>& results) {
  std::vector<MatrixRow> rows;
  for (const auto& r : results) {
    MatrixRow row;
    row.map_size = r.cell.map_size;
    row.controller = std::string(matrix_block_name(r.cell.block));
    row.uavs = r.cell.uavs;
    if (r.result) {
      const auto& s = r.result->summary;
      row.solutions_found = s.solutions_found;
      row.episodes = s.episodes;
      row.min_solution_et_seconds = s.min_solution_et_seconds;
      row.min_solution_sim_steps = s.min_solution_sim_steps;
    } else {
      row.error = r.error.empty() ? std::string("not run") : r.error;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string matrix_csv(const std::vector<MatrixRow>& rows) {
  std::string out(kMatrixCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    const std::string size = std::to_string(r.map_size) + 'x' + std::to_string(r.map_size);
    out += size + ',' + r.controller + ',' + std::to_string(r.uavs) + ',';
    if (!r.error.empty()) {
      out += "failed,,,\n";
      continue;
    }
    out += std::to_string(r.solutions_found) + " out of " + std::to_string(r.episodes) + ',' +
           std::to_string(r.episodes) + ',' +
           (r.min_solution_et_seconds ? format_fixed(*r.min_solution_et_seconds) : std::string()) + ',' +
           (r.min_solution_sim_steps ? std::to_string(*r.min_solution_sim_steps) : std::string()) + '\n';
  }
  return out;
}

namespace {

std::string hms(double seconds) {
  const auto total = static_cast<long long>(std::llround(seconds));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld", total / 3600, (total / 60) % 60, total % 60);
  return buf;
}

}  // namespace

std::string matrix_table(const std::vector<MatrixRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-9s %-9s %-6s %-24s %-10s %s\n", "Map", "Approach", "UAVs", "Solutions found",
                "Min time", "Min steps");
  out << line;
  for (const auto& r : rows) {
    const std::string size = std::to_string(r.map_size) + "x" + std::to_string(r.map_size);
    if (!r.error.empty()) {
      std::snprintf(line, sizeof(line), "%-9s %-9s %-6d failed: %s\n", size.c_str(), r.controller.c_str(), r.uavs,
                    r.error.c_str());
      out << line;
      continue;
    }
    const std::string found =
        std::to_string(r.solutions_found) + " out of " + std::to_string(r.episodes) + " episodes";
    const std::string time = r.min_solution_et_seconds ? hms(*r.min_solution_et_seconds) : "-";
    const std::string steps = r.min_solution_sim_steps ? std::to_string(*r.min_solution_sim_steps) : "-";
    std::snprintf(line, sizeof(line), "%-9s %-9s %-6d %-24s %-10s %s\n", size.c_str(), r.controller.c_str(), r.uavs,
                  found.c_str(), time.c_str(), steps.c_str());
    out << line;
  }
  return out.str();
}

std::string to_pgm(const metrics::Heatmap& h) {
  std::string out = "P2\n" + std::to_string(h.cols) + " " + std::to_string(h.rows) + "\n" +
                    std::to_string(std::max<std::int64_t>(1, h.max())) + "\n";
  for (int r = 0; r < h.rows; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      if (c) out += ' ';
      out += std::to_string(h.at(r, c));
    }
    out += '\n';
  }
  return out;
}

metrics::Heatmap parse_pgm(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string_view line : split_lines(text)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::istringstream words{std::string(line)};
    std::string w;
    while (words >> w) tokens.push_back(w);
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw FormatError("not a plain PGM (P2) file");
  const auto cols = parse_number<int>(tokens[1]);
  const auto rows = parse_number<int>(tokens[2]);
  const auto maxval = parse_number<std::int64_t>(tokens[3]);
  if (!cols || !rows || !maxval || *cols < 1 || *rows < 1 || *maxval < 1) throw FormatError("bad PGM header");
  const std::size_t n = static_cast<std::size_t>(*rows) * static_cast<std::size_t>(*cols);
  if (tokens.size() != 4 + n) throw FormatError("PGM pixel count does not match its dimensions");
  metrics::Heatmap h{*rows, *cols, {}};
  h.counts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = parse_number<std::int64_t>(tokens[4 + i]);
    if (!v || *v < 0 || *v > *maxval) throw FormatError("bad PGM pixel value '" + tokens[4 + i] + "'");
    h.counts.push_back(*v);
  }
  return h;
}

// --- run directories ---------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_run(const std::filesystem::path& out_dir, const RunConfig& config, const GridMap& map,
               const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "manifest.txt", "# resolved run configuration; reusable with --config\n" + config_to_text(config));
  write_file(out_dir / "map.grid", serialize_grid(map));
  write_file(out_dir / "episodes.csv", episode_csv(result.summary));
  write_file(out_dir / "coverage.csv", coverage_csv(result.summary));
  write_file(out_dir / "actions.csv", action_csv(result.summary));
  write_file(out_dir / "visits.csv", visit_csv(result.summary));
  write_file(out_dir / "summary.txt", summary_text(result.summary));
  for (std::size_t i = 0; i < result.networks.size(); ++i) {
    save_network(result.networks[i], out_dir / ("network_" + std::to_string(i) + ".qnet"));
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::string_view expected_header) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != expected_header) {
    throw FormatError("unexpected CSV header, expected '" + std::string(expected_header) + "'");
  }
  const std::size_t width = split_fields(expected_header).size();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_fields(lines[i]);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields", static_cast<int>(i) + 1, 1);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

ExperimentSummary read_run(const std::filesystem::path& dir) {
  const RunConfig config = parse_config_text(read_file(dir / "manifest.txt"));
  const GridMap map = parse_grid_text(read_file(dir / "map.grid"));
  // Same precision as the stored trajectory, so the curve stays monotone.
  const double initial = std::stod(format_fixed(coverage(reset(map, config.uavs), map)));

  std::vector<EpisodeRecord> records;
  std::map<int, std::size_t> by_episode;
  int line = 1;
  for (const auto& f : parse_csv(read_file(dir / "episodes.csv"), kEpisodeCsvHeader)) {
    ++line;
    EpisodeRecord r;
    r.episode = field_number<int>(f[0], "episode", line);
    r.epsilon = field_number<double>(f[1], "epsilon", line);
    r.total_actions = field_number<std::int64_t>(f[2], "total_actions", line);
    r.valid_actions = field_number<std::int64_t>(f[3], "valid_actions", line);
    r.solved = f[5] == "1";
    r.sim_steps = field_number<std::int64_t>(f[6], "sim_steps", line);
    const double et = field_number<double>(f[7], "et_seconds", line);
    r.started = Clock::time_point{};
    r.finished = r.started + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(et));
    r.rows = map.rows();
    r.cols = map.cols();
    r.initial_coverage = initial;
    r.visit_counts.assign(map.cell_count(), 0);
    r.uav_actions.assign(config.uavs, 0);
    r.uav_valid_actions.assign(config.uavs, 0);
    by_episode[r.episode] = records.size();
    records.push_back(std::move(r));
  }
  auto record_for = [&](const std::string& field, int line_no) -> EpisodeRecord& {
    const int episode = field_number<int>(field, "episode", line_no);
    const auto it = by_episode.find(episode);
    if (it == by_episode.end()) throw ParseError("unknown episode " + field, line_no, 1);
    return records[it->second];
  };

  line = 1;
  for (const auto& f : parse_csv(read_file(dir / "actions.csv"), kActionCsvHeader)) {
    ++line;
    EpisodeRecord& r = record_for(f[0], line);
    ActionLogEntry a;
    a.uav = field_number<int>(f[2], "uav", line);
    if (a.uav < 0 || a.uav >= config.uavs) throw ParseError("uav index out of range", line, 1);
    const auto action = std::find_if(kAllActions.begin(), kAllActions.end(),
                                     [&](Action x) { return action_name(x) == f[3]; });
    if (action == kAllActions.end()) throw ParseError("unknown action '" + f[3] + "'", line, 1);
    a.action = *action;
    if (f[4] == "new") a.cell_class = CellClass::NewCell;
    else if (f[4] == "visited") a.cell_class = CellClass::VisitedCell;
    else if (f[4] == "blocked") a.cell_class = CellClass::NonVisitable;
    else throw ParseError("unknown cell class '" + f[4] + "'", line, 1);
    a.position = {field_number<int>(f[5], "row", line), field_number<int>(f[6], "col", line)};
    a.reward = field_number<double>(f[7], "reward", line);
    a.coverage = field_number<double>(f[8], "coverage", line);
    ++r.uav_actions[a.uav];
    if (a.cell_class == CellClass::NewCell) ++r.uav_valid_actions[a.uav];
    r.coverage_trajectory.push_back(a.coverage);
    r.actions.push_back(a);
  }

  line = 1;
  for (const auto& f : parse_csv(read_file(dir / "visits.csv"), kVisitCsvHeader)) {
    ++line;
    EpisodeRecord& r = record_for(f[0], line);
    const Cell c{field_number<int>(f[1], "row", line), field_number<int>(f[2], "col", line)};
    if (!map.in_bounds(c)) throw ParseError("visit cell out of bounds", line, 1);
    r.visit_counts[map.index(c)] = field_number<std::int64_t>(f[3], "count", line);
  }
  return summarize(std::move(records));
}

}  // namespace uavcov::io
