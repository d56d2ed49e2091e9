#include "laxoc/cli.hpp"

#include "laxoc/scenarios.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace laxoc {

namespace {

namespace fs = std::filesystem;

fs::path resolve_out_dir(const RunConfig& config, const std::string& command) {
  std::string dir = config.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("LAXOC_OUT")) dir = env;
  }
  if (dir.empty()) dir = "laxoc_out";
  return fs::path(dir) / command;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

Solution solve_dispatch(const ProblemInstance& inst, const TimeGrid& grid,
                        const SolveOptions& opt, ConvexProgram* program_out,
                        int* sweep_k_out) {
  if (inst.cls == ProblemClass::MinMax) {
    *program_out = build_phi1_program(inst, grid);
    if (sweep_k_out) *sweep_k_out = -1;
    return solve(*program_out, opt);
  }
  if (inst.time_invariant) {
    *program_out = build_phi2ti_program(inst, grid);
    if (sweep_k_out) *sweep_k_out = -1;
    return solve(*program_out, opt);
  }
  auto [k, sol] = solve_phi2_sweep(inst, grid, opt);
  if (k < 0) throw std::runtime_error("solve: " + sol.status);
  *program_out = build_phi2_subprogram(inst, grid, k);
  if (sweep_k_out) *sweep_k_out = k;
  return sol;
}

Trajectory relaxed_trajectory(const ConvexProgram& program, const Solution& sol) {
  Trajectory t;
  for (size_t k = 0; k < sol.assignment.states.size(); ++k) {
    t.times.push_back(program.grid.nodes[k]);
    t.states.push_back(sol.assignment.states[k]);
    t.controls.push_back(k < sol.assignment.controls.size()
                             ? sol.assignment.controls[k]
                             : sol.assignment.controls.empty()
                                   ? VectorXd()
                                   : sol.assignment.controls.back());
  }
  if (!t.controls.empty() && t.controls.front().size() == 0) t.controls.clear();
  return t;
}

void write_plots(const fs::path& dir, const ProblemInstance& inst, const TimeGrid& grid,
                 const Trajectory& dense, const std::vector<double>& J,
                 const TerminalChoice& choice) {
  // cost-vs-tau curve
  PlotSeries cost;
  cost.label = "J(tau)";
  for (size_t k = 0; k < J.size(); ++k) {
    cost.x.push_back(grid.nodes[k]);
    cost.y.push_back(J[k]);
  }
  PlotSeries marker;
  marker.label = "tau*";
  if (choice.k_star >= 0) {
    marker.x = {choice.tau, choice.tau};
    double lo = *std::min_element(cost.y.begin(), cost.y.end());
    double hi = *std::max_element(cost.y.begin(), cost.y.end());
    marker.y = {lo, hi};
  }
  write_text(dir / "cost_curve.svg",
             svg_line_plot("running cost vs terminal time", "tau (s)", "J",
                           {cost, marker}));

  // trajectory plane: position pairs per agent when the layout is known
  std::vector<PlotSeries> plane;
  int agents = 0, px = 0, py = 0, stride = 0;
  if (inst.name.rfind("example_a", 0) == 0) {
    stride = 4;
    px = 0;
    py = 2;
    agents = inst.state_dim / 4;
  } else if (inst.name.rfind("example_b", 0) == 0) {
    stride = 2;
    px = 0;
    py = 1;
    agents = inst.state_dim / 2;
  }
  if (agents > 0) {
    for (int r = 0; r < agents; ++r) {
      PlotSeries s;
      s.label = "robot " + std::to_string(r + 1);
      for (const auto& x : dense.states) {
        s.x.push_back(x[stride * r + px]);
        s.y.push_back(x[stride * r + py]);
      }
      plane.push_back(std::move(s));
    }
    write_text(dir / "trajectory_plane.svg",
               svg_line_plot("position trajectories", "x", "y", plane));
  } else {
    std::vector<PlotSeries> states;
    for (int i = 0; i < inst.state_dim; ++i) {
      PlotSeries s;
      s.label = "x_" + std::to_string(i);
      for (int row = 0; row < dense.size(); ++row) {
        s.x.push_back(dense.times[row]);
        s.y.push_back(dense.states[row][i]);
      }
      states.push_back(std::move(s));
    }
    write_text(dir / "trajectory_plane.svg",
               svg_line_plot("state trajectories", "t (s)", "x", states));
  }
}

}  // namespace

ReconstructOutcome run_reconstruction(const ProblemInstance& inst, const TimeGrid& grid,
                                      const SolveOptions& options, int substeps) {
  ReconstructOutcome out;
  out.solution = solve_dispatch(inst, grid, options, &out.program, &out.sweep_k);
  out.decomposition = decompose_relaxed_solution(inst, out.program, out.solution);

  if (out.program.kind == ProgramKind::LaxPhi2TI) {
    auto scheds = build_alpha_schedule_p2ti(inst, out.decomposition, out.program.grid,
                                            out.solution.assignment.states);
    out.alpha = scheds.alpha_eps;
    out.beta1 = scheds.beta1;
    out.sigma_T = scheds.sigma_T;
  } else {
    PiecewiseControl alpha = build_alpha_schedule_p1(out.decomposition, out.program.grid);
    if (alpha.breaks.back() < grid.horizon() - 1e-12) {
      // time-varying min-min prefix: admissible filler past the fixed index
      VectorXd filler =
          inst.filler_control.size() ? inst.filler_control : inst.controls.some_point();
      alpha.breaks.push_back(grid.horizon());
      alpha.values.push_back(filler);
    }
    out.alpha = alpha;
  }
  out.dense = integrate_dynamics(inst, out.alpha, inst.initial_state, substeps);
  out.cost_curve = evaluate_running_objective(inst, out.dense, out.alpha, grid);
  out.feasibility = check_feasibility(inst, out.dense, grid);
  out.terminal = select_terminal_time(inst, out.cost_curve, out.feasibility.feasible_upto, grid);
  return out;
}

int run_command(const std::string& command, const RunConfig& config) {
  fs::path dir = resolve_out_dir(config, command);
  try {
    std::map<std::string, double> times;
    std::map<std::string, std::string> notes;
    Timer total;

    if (command == "audit") {
      auto [inst, grid] = load_instance(config);
      (void)grid;
      ConvexityReport rep = audit_convexity(inst);
      write_text(dir / "convexity_report.json", convexity_json(rep).dump(2) + "\n");
    } else if (command == "solve") {
      auto [inst, grid] = load_instance(config);
      Timer t;
      ConvexProgram program;
      int sweep_k = -1;
      Solution sol = solve_dispatch(inst, grid, config.solve_options(), &program, &sweep_k);
      times["solve"] = t.elapsed();
      ordered_json sj = solution_json(sol, program);
      if (sweep_k >= 0) sj["sweep_k_star"] = sweep_k;
      write_text(dir / "solution.json", sj.dump(2) + "\n");
      write_text(dir / "trajectory.csv", trajectory_csv(relaxed_trajectory(program, sol)));
      times["wall"] = sol.wall_time_s;
    } else if (command == "reconstruct") {
      auto [inst, grid] = load_instance(config);
      Timer t;
      ReconstructOutcome rec = run_reconstruction(inst, grid, config.solve_options());
      times["reconstruct"] = t.elapsed();
      ordered_json sj = solution_json(rec.solution, rec.program);
      if (rec.sweep_k >= 0) sj["sweep_k_star"] = rec.sweep_k;
      write_text(dir / "solution.json", sj.dump(2) + "\n");
      write_text(dir / "trajectory.csv", trajectory_csv(rec.dense));
      ordered_json cj = control_json(rec.alpha);
      cj["tau_star"] = rec.terminal.tau;
      cj["k_star"] = rec.terminal.k_star;
      cj["value_at_tau"] = rec.terminal.value;
      if (rec.sigma_T >= 0.0) {
        cj["sigma_T"] = rec.sigma_T;
        cj["beta1"] = control_json(rec.beta1);
      }
      write_text(dir / "control.json", cj.dump(2) + "\n");
      write_text(dir / "cost_curve.csv", cost_curve_csv(grid, rec.cost_curve, rec.terminal));
      write_plots(dir, inst, grid, rec.dense, rec.cost_curve, rec.terminal);
      notes["example_b_perturbation_radius"] = std::to_string(kExampleBPerturbation);
    } else if (command == "verify") {
      // oracle-vs-Lax comparison on the 1D min-max toy
      double dx = config.params.count("dx") ? config.params.at("dx") : 0.02;
      int probes = config.params.count("probes")
                       ? static_cast<int>(config.params.at("probes"))
                       : 20;
      Timer t;
      ProblemInstance probe_inst = toy_1d_minmax(0.0);
      std::vector<AxisGrid> xa = {
          {-3.0, 3.2, static_cast<int>(std::lround(6.2 / dx)) + 1}};
      AxisGrid za = suggest_z_axis(probe_inst, xa, dx);
      GridValueFunction vf = solve_hj(probe_inst, HJKind::V1, xa, za);
      times["oracle"] = t.elapsed();
      ordered_json rows = ordered_json::array();
      double max_diff = 0.0;
      for (int i = 0; i < probes; ++i) {
        double x0 = -1.5 + 3.0 * i / (probes - 1);
        ProblemInstance inst = toy_1d_minmax(x0);
        TimeGrid grid = TimeGrid::with_dt(inst.horizon, config.dt);
        Solution sol = solve(build_phi1_program(inst, grid), config.solve_options());
        double theta = extract_theta(vf, 0.0, (VectorXd(1) << x0).finished());
        double diff = std::abs(theta - sol.objective);
        max_diff = std::max(max_diff, diff);
        rows.push_back({{"x0", x0}, {"theta_grid", theta}, {"phi1", sol.objective},
                        {"abs_diff", diff}});
      }
      times["verify"] = t.elapsed();
      ordered_json vj;
      vj["toy"] = "toy1d";
      vj["dx"] = dx;
      vj["rows"] = rows;
      vj["max_abs_diff"] = max_diff;
      write_text(dir / "verify.json", vj.dump(2) + "\n");
    } else if (command == "oracle") {
      auto [inst, grid] = load_instance(config);
      (void)grid;
      double dx = config.params.count("dx") ? config.params.at("dx") : 0.02;
      if (inst.state_dim > 2)
        throw std::invalid_argument("oracle: grid solver supports state dimension <= 2");
      std::string kind_name = config.scenario == "toy1d_drift" ? "V2_TI" : "V1";
      HJKind kind = kind_name == "V2_TI" ? HJKind::V2TI : HJKind::V1;
      std::vector<AxisGrid> xa;
      for (int d = 0; d < inst.state_dim; ++d) {
        double reach = inst.horizon * 3.0 + 1.0;
        double lo = inst.initial_state[d] - reach, hi = inst.initial_state[d] + reach;
        xa.push_back({lo, hi, static_cast<int>(std::lround((hi - lo) / dx)) + 1});
      }
      AxisGrid za = suggest_z_axis(inst, xa, dx);
      Timer t;
      GridValueFunction vf = solve_hj(inst, kind, xa, za);
      times["oracle"] = t.elapsed();
      export_value_function(vf, dir / ("value_" + kind_name));
    } else {
      throw std::invalid_argument("unknown command '" + command +
                                  "' (expected solve, reconstruct, verify, audit, oracle)");
    }

    times["total"] = total.elapsed();
    std::map<std::string, std::string> notes2 = {
        {"example_b_perturbation_radius", std::to_string(kExampleBPerturbation)}};
    write_text(dir / "manifest.json", manifest_json(config, times, notes2).dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = e.what();
    err["command"] = command;
    try {
      write_text(dir / "error.json", err.dump(2) + "\n");
    } catch (...) {
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace laxoc
