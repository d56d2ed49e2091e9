#pragma once

#include "laxoc/hj_oracle.hpp"
#include "laxoc/reconstruction.hpp"
#include "laxoc/transcription.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace laxoc {

using ordered_json = nlohmann::ordered_json;

/// One run's configuration: builtin scenario or declarative instance, grid,
/// solver options, output routing. Round-trips through JSON bit-exactly.
struct RunConfig {
  int schema_version = 1;
  std::string scenario;  // builtin name; empty when declarative
  int robots = 1;
  std::uint64_t seed = 0;
  double dt = 0.1;
  int steps = 0;  // 0: derive from dt
  std::map<std::string, double> params;  // scenario knobs (x0, cap, dx, ...)
  int max_iter = 20000;
  double feas_tol = 1e-8;
  double stat_tol = 1e-6;
  bool verbose = false;
  std::string out_dir;
  ordered_json instance;  // declarative instance (optional)

  ordered_json to_json() const;
  static RunConfig from_json(const ordered_json& j);
  SolveOptions solve_options() const;
};

/// Builtin scenario or declarative instance plus its grid.
std::pair<ProblemInstance, TimeGrid> load_instance(const RunConfig& config);

std::uint64_t config_hash(const RunConfig& config);

// ----------------------------------------------------------------- writers

void write_text(const std::filesystem::path& path, const std::string& text);

std::string trajectory_csv(const Trajectory& traj);
std::string cost_curve_csv(const TimeGrid& grid, const std::vector<double>& J,
                           const TerminalChoice& choice);
ordered_json solution_json(const Solution& sol, const ConvexProgram& program);
ordered_json control_json(const PiecewiseControl& control);
ordered_json convexity_json(const ConvexityReport& report);

/// Run manifest: config, hash, seed, versions, wall times, notes. Timestamps
/// and timings live only here so the numeric artifacts stay byte-stable.
ordered_json manifest_json(const RunConfig& config,
                           const std::map<std::string, double>& wall_times,
                           const std::map<std::string, std::string>& notes);

/// Minimal standalone SVG line plot (pure rendering of already-written data).
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotSeries>& series,
                          int width = 640, int height = 420);

/// Grid value function export: raw little-endian doubles plus a JSON header
/// manifest, and a CSV slice at a chosen time index for plotting.
void export_value_function(const GridValueFunction& vf,
                           const std::filesystem::path& base_path);
std::string value_function_slice_csv(const GridValueFunction& vf, int slice);

}  // namespace laxoc
