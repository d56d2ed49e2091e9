#include "laxoc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"laxoc: state-constrained min-max / min-min optimal control via Lax formulae"};
  app.require_subcommand(1);

  laxoc::RunConfig config;
  std::string config_path;
  double x0 = std::numeric_limits<double>::quiet_NaN();
  double dx = std::numeric_limits<double>::quiet_NaN();
  double tol = std::numeric_limits<double>::quiet_NaN();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", config.scenario,
                    "builtin scenario (example_a, example_b, toy1d, toy1d_drift, toy_lq, "
                    "toy_nonconvex_stage)");
    cmd->add_option("--config", config_path, "JSON config file (declarative instances)");
    cmd->add_option("--robots", config.robots, "number of robots for the builtin examples");
    cmd->add_option("--dt", config.dt, "grid step");
    cmd->add_option("--steps", config.steps, "grid step count (overrides --dt)");
    cmd->add_option("--seed", config.seed, "run seed");
    cmd->add_option("--out", config.out_dir, "output directory (LAXOC_OUT fallback)");
    cmd->add_option("--max-iter", config.max_iter, "solver iteration budget");
    cmd->add_option("--tol", tol, "solver stationarity tolerance");
    cmd->add_option("--x0", x0, "toy initial state");
    cmd->add_option("--dx", dx, "grid oracle spatial step");
    cmd->add_flag("--verbose", config.verbose, "iteration log");
  };

  std::vector<std::string> command_names = {"solve", "reconstruct", "verify", "audit",
                                            "oracle"};
  for (const auto& name : command_names) add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 1;
    }
    laxoc::ordered_json j = laxoc::ordered_json::parse(f, nullptr, true);
    laxoc::RunConfig file_config = laxoc::RunConfig::from_json(j);
    // command-line flags override file values where given
    if (config.scenario.empty()) config.scenario = file_config.scenario;
    if (config.instance.is_null()) config.instance = file_config.instance;
    if (app.count_all() >= 0) {  // keep file values unless flags were set
      auto* sub = app.get_subcommands().front();
      if (!sub->count("--robots")) config.robots = file_config.robots;
      if (!sub->count("--dt")) config.dt = file_config.dt;
      if (!sub->count("--steps")) config.steps = file_config.steps;
      if (!sub->count("--seed")) config.seed = file_config.seed;
      if (!sub->count("--out") && config.out_dir.empty()) config.out_dir = file_config.out_dir;
      if (!sub->count("--max-iter")) config.max_iter = file_config.max_iter;
      if (!sub->count("--verbose")) config.verbose = file_config.verbose;
      config.params = file_config.params;
      config.feas_tol = file_config.feas_tol;
      config.stat_tol = file_config.stat_tol;
    }
  }
  if (!std::isnan(x0)) config.params["x0"] = x0;
  if (!std::isnan(dx)) config.params["dx"] = dx;
  if (!std::isnan(tol)) config.stat_tol = tol;

  const std::string command = app.get_subcommands().front()->get_name();
  return laxoc::run_command(command, config);
}
