#include "uavcov/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include "uavcov/errors.hpp"
#include "uavcov/io.hpp"
#include "uavcov/metrics.hpp"

namespace uavcov::cli {
namespace {

namespace fs = std::filesystem;

// Options shared by train and matrix: everything that lands in RunConfig.
struct RunFlags {
  std::string config_path;
  std::vector<std::string> settings;
  std::string controller;
  std::string head;
  std::string denominator;
  std::string step_budget;
  std::string time_budget;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<int> uavs;

  void attach(CLI::App& app, bool with_uavs) {
    app.add_option("--config", config_path, "Key-value configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", settings, "Override one configuration key (key=value); repeatable");
    app.add_option("--episodes", episodes, "Episodes per experiment (default 30)");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--step-budget", step_budget, "Timesteps per episode, or 'auto' (40 x visitable cells)");
    app.add_option("--time-budget", time_budget, "Wall-clock seconds per episode, or 'none' (default 1800)");
    app.add_option("--head", head, "Network output head")->check(CLI::IsMember({"linear", "softmax"}));
    app.add_option("--reward-denominator", denominator, "New-cell reward denominator")
        ->check(CLI::IsMember({"remaining", "visited"}));
    if (with_uavs) {
      app.add_option("--uavs", uavs, "Number of UAVs");
      app.add_option("--controller", controller, "Network topology")->check(CLI::IsMember({"global", "per-uav"}));
    }
  }

  io::RunConfig resolve() const {
    io::Overrides overrides;
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (episodes) overrides.emplace_back("episodes", std::to_string(*episodes));
    if (seed) overrides.emplace_back("seed", std::to_string(*seed));
    if (uavs) overrides.emplace_back("uavs", std::to_string(*uavs));
    if (!controller.empty()) overrides.emplace_back("controller", controller);
    if (!head.empty()) overrides.emplace_back("head", head);
    if (!denominator.empty()) overrides.emplace_back("reward_denominator", denominator);
    if (!step_budget.empty()) overrides.emplace_back("step_budget", step_budget);
    if (!time_budget.empty()) overrides.emplace_back("time_budget_seconds", time_budget);
    std::optional<fs::path> path;
    if (!config_path.empty()) path = config_path;
    return io::parse_config(path, overrides);
  }
};

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected a comma-separated list of positive integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "list is empty");
  return out;
}

int do_rasterize(const std::string& map_path, std::optional<int> rows, std::optional<int> cols,
                 std::optional<double> cell_size, const std::string& output, std::ostream& out) {
  if (cell_size && (rows || cols)) throw CLI::ValidationError("--cell-size", "cannot be combined with --rows/--cols");
  if (rows.has_value() != cols.has_value()) throw CLI::ValidationError("--rows", "--rows and --cols go together");
  const io::LoadedMap loaded = io::parse_map(map_path, {rows, cols, cell_size});
  const std::string text = io::serialize_grid(loaded.map);
  if (output.empty()) {
    out << text;
  } else {
    io::write_file(output, text);
    out << "wrote " << loaded.map.rows() << "x" << loaded.map.cols() << " grid (" << loaded.map.visitable_count()
        << " visitable cells) to " << output << "\n";
  }
  return kExitOk;
}

int do_train(const std::string& map_path, const RunFlags& flags, const std::string& out_dir, std::ostream& out) {
  io::RunConfig config = flags.resolve();
  const GridMap map = io::parse_map(map_path).map;
  const ExperimentSpec spec = io::make_spec(config, map);
  config.step_budget = spec.budget.max_steps;
  const ExperimentResult result = run_experiment(spec);
  io::write_run(out_dir, config, map, result);
  out << io::summary_text(result.summary) << "outputs in " << out_dir << "\n";
  return kExitOk;
}

int do_matrix(const RunFlags& flags, const std::string& sizes, const std::string& uav_list, int jobs,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const io::RunConfig config = flags.resolve();
  MatrixOptions options = io::make_matrix_options(config);
  options.sizes = parse_int_list(sizes, "--sizes");
  options.uav_counts = parse_int_list(uav_list, "--uavs");
  options.jobs = jobs;

  fs::create_directories(out_dir);
  io::write_file(fs::path(out_dir) / "manifest.txt", "# resolved matrix configuration\nsizes = " + sizes +
                                                         "\nuav_counts = " + uav_list + "\n" + io::config_to_text(config));
  auto write_cell = [&](const MatrixCellResult& r) {
    if (!r.result) return;
    io::RunConfig cell_config = config;
    cell_config.uavs = r.cell.uavs;
    cell_config.controller = r.cell.mode();
    const ExperimentSpec spec = spec_for_cell(r.cell, options);
    cell_config.step_budget = spec.budget.max_steps;
    const std::string name = std::to_string(r.cell.map_size) + "x" + std::to_string(r.cell.map_size) + "_" +
                             std::string(matrix_block_name(r.cell.block)) + "_" + std::to_string(r.cell.uavs) + "uav";
    io::write_run(fs::path(out_dir) / name, cell_config, spec.map, *r.result);
  };
  const auto results = run_matrix(options, write_cell);
  const auto rows = io::matrix_rows(results);
  io::write_file(fs::path(out_dir) / "matrix.csv", io::matrix_csv(rows));
  const std::string table = io::matrix_table(rows);
  io::write_file(fs::path(out_dir) / "matrix.txt", table);
  out << table;
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      err << "cell " << r.map_size << "x" << r.map_size << " " << r.controller << " " << r.uavs
          << " UAVs failed: " << r.error << "\n";
    }
  }
  return failures ? kExitFailure : kExitOk;
}

int do_report(const std::string& run_dir, std::ostream& out) {
  const ExperimentSummary summary = io::read_run(run_dir);
  const fs::path dir(run_dir);
  io::write_file(dir / "coverage_curve.csv", io::coverage_csv(summary));
  io::write_file(dir / "time_evolution.csv", io::time_csv(summary));
  io::write_file(dir / "action_fractions.csv", io::fraction_csv(summary));
  out << "wrote coverage_curve.csv, time_evolution.csv, action_fractions.csv to " << run_dir << "\n";
  return kExitOk;
}

int do_heatmap(const std::string& run_dir, int episode, const std::string& output, std::ostream& out) {
  const ExperimentSummary summary = io::read_run(run_dir);
  for (const auto& r : summary.records) {
    if (r.episode != episode) continue;
    const fs::path path = output.empty() ? fs::path(run_dir) / ("heatmap_" + std::to_string(episode) + ".pgm")
                                         : fs::path(output);
    io::write_file(path, io::to_pgm(metrics::visit_heatmap(r)));
    out << "wrote " << path.string() << "\n";
    return kExitOk;
  }
  throw RangeError("run has no episode " + std::to_string(episode));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-UAV grid coverage with Q-learning"};
  app.require_subcommand(1);

  std::string map_path;
  std::optional<int> rows;
  std::optional<int> cols;
  std::optional<double> cell_size;
  std::string output;
  auto* rasterize = app.add_subcommand("rasterize", "Turn a polygon map into grid text");
  rasterize->add_option("map", map_path, "Polygon JSON or grid map")->required()->check(CLI::ExistingFile);
  rasterize->add_option("--rows", rows, "Grid rows")->check(CLI::PositiveNumber);
  rasterize->add_option("--cols", cols, "Grid columns")->check(CLI::PositiveNumber);
  rasterize->add_option("--cell-size", cell_size, "Cell edge length in meters")->check(CLI::PositiveNumber);
  rasterize->add_option("-o,--output", output, "Output path (default: stdout)");

  RunFlags train_flags;
  std::string train_out = "run";
  auto* train = app.add_subcommand("train", "Train controllers on one map");
  train->add_option("map", map_path, "Grid or polygon map")->required()->check(CLI::ExistingFile);
  train_flags.attach(*train, true);
  train->add_option("-o,--out", train_out, "Output directory");

  RunFlags matrix_flags;
  std::string sizes = "5,6,7,8,9";
  std::string uav_list = "1,2,3";
  int jobs = 1;
  std::string matrix_out = "matrix";
  auto* matrix = app.add_subcommand("matrix", "Run the map-size x UAV-count experiment matrix");
  matrix->add_option("--sizes", sizes, "Square map sizes, comma-separated");
  matrix->add_option("--uavs", uav_list, "UAV counts, comma-separated");
  matrix->add_option("--jobs", jobs, "Experiments run in parallel")->check(CLI::PositiveNumber);
  matrix_flags.attach(*matrix, false);
  matrix->add_option("-o,--out", matrix_out, "Output directory");

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Write coverage, time and action-fraction CSVs for a run");
  report->add_option("run-dir", run_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);

  int episode = 0;
  auto* heatmap = app.add_subcommand("heatmap", "Write a PGM visit heatmap for one episode");
  heatmap->add_option("run-dir", run_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);
  heatmap->add_option("--episode", episode, "Episode index")->required()->check(CLI::NonNegativeNumber);
  heatmap->add_option("-o,--output", output, "Output path (default: <run-dir>/heatmap_<K>.pgm)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (rasterize->parsed()) return do_rasterize(map_path, rows, cols, cell_size, output, out);
    if (train->parsed()) return do_train(map_path, train_flags, train_out, out);
    if (matrix->parsed()) return do_matrix(matrix_flags, sizes, uav_list, jobs, matrix_out, out, err);
    if (report->parsed()) return do_report(run_dir, out);
    if (heatmap->parsed()) return do_heatmap(run_dir, episode, output, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace uavcov::cli
