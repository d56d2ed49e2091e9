#include "laxoc/io.hpp"

#include "laxoc/scenarios.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace laxoc {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MatrixXd json_matrix(const ordered_json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("config: " + field + " must be a matrix (array of arrays)");
  MatrixXd M(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size())
      throw std::invalid_argument("config: " + field + " has ragged rows");
    for (size_t k = 0; k < j[i].size(); ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

VectorXd json_vector(const ordered_json& j, const std::string& field) {
  if (!j.is_array()) throw std::invalid_argument("config: " + field + " must be an array");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

ordered_json vector_json(const VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ProblemInstance load_declarative(const ordered_json& spec) {
  ProblemInstance inst;
  inst.name = spec.value("name", std::string("declarative"));
  std::string cls = spec.value("class", std::string("minmax"));
  if (cls == "minmax")
    inst.cls = ProblemClass::MinMax;
  else if (cls == "minmin")
    inst.cls = ProblemClass::MinMin;
  else
    throw std::invalid_argument("config: instance.class must be minmax or minmin");
  inst.time_invariant = spec.value("time_invariant", false);
  inst.horizon = spec.value("horizon", 1.0);
  if (!spec.contains("initial_state"))
    throw std::invalid_argument("config: instance.initial_state is required");
  inst.initial_state = json_vector(spec["initial_state"], "instance.initial_state");
  inst.state_dim = static_cast<int>(inst.initial_state.size());

  // dynamics: f = N a + drift (state-coupled declarative dynamics are outside
  // the supported transcription forms; the builtin scenarios cover those)
  if (!spec.contains("dynamics"))
    throw std::invalid_argument("config: instance.dynamics is required");
  const auto& dyn = spec["dynamics"];
  if (dyn.contains("M")) {
    MatrixXd M = json_matrix(dyn["M"], "instance.dynamics.M");
    if (M.cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument(
          "config: instance.dynamics.M: state-coupled declarative dynamics are not "
          "supported by the Lax transcription");
  }
  MatrixXd N;
  if (dyn.contains("N"))
    N = json_matrix(dyn["N"], "instance.dynamics.N");
  else
    N = MatrixXd::Identity(inst.state_dim, inst.state_dim);
  VectorXd drift = dyn.contains("drift") ? json_vector(dyn["drift"], "instance.dynamics.drift")
                                         : VectorXd(VectorXd::Zero(inst.state_dim));
  if (N.rows() != inst.state_dim || drift.size() != inst.state_dim)
    throw std::invalid_argument("config: instance.dynamics dimensions mismatch the state");
  inst.control_dim = static_cast<int>(N.cols());
  inst.dynamics.control_only = true;
  inst.dynamics.affine_in_control = true;
  inst.dynamics.control_matrix = [N](double) { return N; };
  inst.dynamics.drift = [drift](double) { return drift; };
  inst.dynamics.f = [N, drift](double, const VectorXd&, const VectorXd& a) {
    return VectorXd(N * a + drift);
  };

  if (!spec.contains("control_set"))
    throw std::invalid_argument("config: instance.control_set is required");
  const auto& cs = spec["control_set"];
  std::string cstype = cs.value("type", std::string("box"));
  if (cstype == "box") {
    inst.controls = ControlSet::box(json_vector(cs.at("lo"), "control_set.lo"),
                                    json_vector(cs.at("hi"), "control_set.hi"));
  } else if (cstype == "ball") {
    if ((N - MatrixXd::Identity(N.rows(), N.cols())).cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument(
          "config: instance.control_set: ball control sets need identity dynamics.N");
    inst.controls = ControlSet::ball(json_vector(cs.at("center"), "control_set.center"),
                                     cs.at("radius").get<double>());
  } else {
    throw std::invalid_argument("config: instance.control_set.type must be box or ball");
  }
  if (inst.controls.dim() != inst.control_dim)
    throw std::invalid_argument("config: instance.control_set dimension mismatch");

  std::string Ltype = spec.contains("stage_cost")
                          ? spec["stage_cost"].value("type", std::string("zero"))
                          : std::string("zero");
  if (Ltype != "zero")
    throw std::invalid_argument(
        "config: instance.stage_cost.type: only zero stage cost is supported "
        "declaratively");
  inst.stage.is_zero = true;

  if (spec.contains("terminal_cost")) {
    const auto& tc = spec["terminal_cost"];
    if (tc.contains("norms")) {
      for (const auto& nj : tc["norms"]) {
        NormTerm t;
        t.weight = nj.value("weight", 1.0);
        t.A = json_matrix(nj.at("A"), "terminal_cost.norms.A");
        if (nj.contains("offset")) {
          VectorXd off = json_vector(nj["offset"], "terminal_cost.norms.offset");
          t.offset = [off](double) { return off; };
        }
        inst.terminal.norms.push_back(std::move(t));
      }
    }
    if (tc.contains("quad")) inst.terminal.quad = json_matrix(tc["quad"], "terminal_cost.quad");
    if (tc.contains("lin")) inst.terminal.lin = json_vector(tc["lin"], "terminal_cost.lin");
    inst.terminal.convex_in_x = true;
  } else {
    inst.terminal.is_zero = true;
  }

  if (spec.contains("state_constraint")) {
    for (const auto& rj : spec["state_constraint"].at("rows")) {
      AffineRow row;
      row.a = json_vector(rj.at("a"), "state_constraint.rows.a");
      double b = rj.value("b", 0.0);
      row.b = [b](double) { return b; };
      inst.constraint.rows.push_back(std::move(row));
    }
    inst.constraint.convex_in_x = true;
  }

  // image: affine transform of the control set, by vertices for boxes
  ControlSet A = inst.controls;
  const int n = inst.state_dim;
  inst.image = [A, N, drift, n](double, const VectorXd&, bool include_zero) {
    ControlImage img;
    img.dim = n;
    for (int i = 0; i < n; ++i) img.free_idx.push_back(i);
    if (A.kind == ControlSet::Kind::Ball) {
      VectorXd center = -(N * A.center + drift);
      if (include_zero) {
        // hull of a ball and the origin is not a ball; fall back to samples
        std::vector<VectorXd> verts;
        verts.push_back(VectorXd::Zero(n));
        for (const auto& a : A.sample_grid(9)) verts.push_back(-(N * a + drift));
        img.free_set = std::make_shared<VertexHullSet>(std::move(verts));
        img.includes_zero = true;
      } else {
        img.free_set = std::make_shared<BallSet>(center, A.radius);
      }
      return img;
    }
    std::vector<VectorXd> verts;
    BoxSet box(A.lo, A.hi);
    const int d = static_cast<int>(A.lo.size());
    for (int c = 0; c < (1 << d); ++c) {
      VectorXd a(d);
      for (int i = 0; i < d; ++i) a[i] = ((c >> i) & 1) ? A.hi[i] : A.lo[i];
      verts.push_back(-(N * a + drift));
    }
    if (include_zero) {
      verts.push_back(VectorXd::Zero(n));
      img.includes_zero = true;
      BoxSet rawbox(A.lo, A.hi);
      MatrixXd Ninv;  // raw membership through the witness map when N is square
      img.raw_margin = [N, drift, rawbox](const VectorXd& bf) {
        Eigen::FullPivLU<MatrixXd> lu(N);
        if (!lu.isInvertible()) return kInf;
        VectorXd a = lu.solve(-bf - drift);
        return rawbox.margin(a);
      };
    }
    img.free_set = std::make_shared<VertexHullSet>(std::move(verts));
    return img;
  };
  inst.filler_control = inst.controls.some_point();
  return inst;
}

}  // namespace

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["schema_version"] = schema_version;
  j["scenario"] = scenario;
  j["robots"] = robots;
  j["seed"] = seed;
  j["dt"] = dt;
  j["steps"] = steps;
  ordered_json pj = ordered_json::object();
  for (const auto& [k, v] : params) pj[k] = v;
  j["params"] = pj;
  j["max_iter"] = max_iter;
  j["feas_tol"] = feas_tol;
  j["stat_tol"] = stat_tol;
  j["verbose"] = verbose;
  j["out_dir"] = out_dir;
  if (!instance.is_null()) j["instance"] = instance;
  return j;
}

RunConfig RunConfig::from_json(const ordered_json& j) {
  RunConfig c;
  c.schema_version = j.value("schema_version", 1);
  if (c.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version");
  c.scenario = j.value("scenario", std::string());
  c.robots = j.value("robots", 1);
  c.seed = j.value("seed", std::uint64_t(0));
  c.dt = j.value("dt", 0.1);
  c.steps = j.value("steps", 0);
  if (j.contains("params"))
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      c.params[it.key()] = it.value().get<double>();
  c.max_iter = j.value("max_iter", 20000);
  c.feas_tol = j.value("feas_tol", 1e-8);
  c.stat_tol = j.value("stat_tol", 1e-6);
  c.verbose = j.value("verbose", false);
  c.out_dir = j.value("out_dir", std::string());
  if (j.contains("instance")) c.instance = j["instance"];
  return c;
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.max_iter = max_iter;
  o.feas_tol = feas_tol;
  o.stat_tol = stat_tol;
  o.seed = seed;
  o.verbose = verbose;
  return o;
}

std::pair<ProblemInstance, TimeGrid> load_instance(const RunConfig& config) {
  ProblemInstance inst;
  if (!config.instance.is_null() && !config.scenario.empty())
    throw std::invalid_argument("config: give either a scenario or an instance, not both");
  if (!config.instance.is_null()) {
    inst = load_declarative(config.instance);
  } else if (config.scenario == "example_a") {
    inst = gen_example_a(config.robots, config.seed);
  } else if (config.scenario == "example_b") {
    inst = gen_example_b(config.robots, config.seed);
  } else if (config.scenario == "toy1d") {
    inst = toy_1d_minmax(config.params.count("x0") ? config.params.at("x0") : 0.5);
  } else if (config.scenario == "toy1d_drift") {
    inst = toy_1d_drift_minmin(config.params.count("x0") ? config.params.at("x0") : 0.0,
                               config.params.count("cap") ? config.params.at("cap") : 5.0);
  } else if (config.scenario == "toy_lq") {
    inst = toy_lq(config.params.count("x0") ? config.params.at("x0") : 0.5);
  } else if (config.scenario == "toy_nonconvex_stage") {
    inst = toy_nonconvex_stage(config.params.count("x0") ? config.params.at("x0") : 0.5);
  } else {
    throw std::invalid_argument("config: unknown scenario '" + config.scenario + "'");
  }
  TimeGrid grid = config.steps > 0 ? TimeGrid::uniform(inst.horizon, config.steps)
                                   : TimeGrid::with_dt(inst.horizon, config.dt);
  return {std::move(inst), grid};
}

std::uint64_t config_hash(const RunConfig& config) {
  std::string dump = config.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls.front().size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x_" << i;
  for (int i = 0; i < m; ++i) os << ",u_" << i;
  os << "\n";
  for (int row = 0; row < traj.size(); ++row) {
    os << fmt_double(traj.times[row]);
    for (int i = 0; i < n; ++i) os << "," << fmt_double(traj.states[row][i]);
    for (int i = 0; i < m; ++i)
      os << "," << fmt_double(traj.controls.empty() ? 0.0 : traj.controls[row][i]);
    os << "\n";
  }
  return os.str();
}

std::string cost_curve_csv(const TimeGrid& grid, const std::vector<double>& J,
                           const TerminalChoice& choice) {
  std::ostringstream os;
  os << "t,J,is_tau_star\n";
  for (size_t k = 0; k < J.size(); ++k) {
    os << fmt_double(grid.nodes[k]) << "," << fmt_double(J[k]) << ","
       << (static_cast<int>(k) == choice.k_star ? 1 : 0) << "\n";
  }
  return os.str();
}

ordered_json solution_json(const Solution& sol, const ConvexProgram& program) {
  ordered_json j;
  j["objective"] = sol.objective;
  j["converged"] = sol.converged;
  j["infeasible"] = sol.infeasible;
  j["status"] = sol.status;
  j["iterations"] = sol.iterations;
  j["residuals"] = {{"dynamics", sol.dynamics_residual},
                    {"state_constraint", sol.constraint_violation},
                    {"control_margin", sol.control_margin},
                    {"stationarity", sol.stationarity}};
  j["audited_convex"] = program.audited_convex;
  j["convexity_note"] = program.convexity_note;
  if (std::isfinite(sol.assignment.eta)) j["eta"] = sol.assignment.eta;
  ordered_json xs = ordered_json::array();
  for (const auto& x : sol.assignment.states) xs.push_back(vector_json(x));
  j["states"] = xs;
  ordered_json us = ordered_json::array();
  for (const auto& u : sol.assignment.controls) us.push_back(vector_json(u));
  j["controls"] = us;
  ordered_json ts = ordered_json::array();
  for (double t : program.grid.nodes) ts.push_back(t);
  j["grid"] = ts;
  return j;
}

ordered_json control_json(const PiecewiseControl& control) {
  ordered_json j;
  ordered_json br = ordered_json::array();
  for (double b : control.breaks) br.push_back(b);
  j["breakpoints"] = br;
  ordered_json vals = ordered_json::array();
  for (const auto& v : control.values) vals.push_back(vector_json(v));
  j["values"] = vals;
  return j;
}

namespace {
ordered_json verdict_json(const ColumnVerdict& v) {
  ordered_json j;
  j["convex"] = v.convex;
  j["first_violation"] = v.first_violation;
  return j;
}
}  // namespace

ordered_json convexity_json(const ConvexityReport& report) {
  ordered_json j;
  j["theta1"] = verdict_json(report.theta1);
  j["phi1"] = verdict_json(report.phi1);
  j["theta2"] = verdict_json(report.theta2);
  j["phi2"] = verdict_json(report.phi2);
  j["phi2_ti"] = verdict_json(report.phi2ti);
  return j;
}

ordered_json manifest_json(const RunConfig& config,
                           const std::map<std::string, double>& wall_times,
                           const std::map<std::string, std::string>& notes) {
  ordered_json j;
  j["config"] = config.to_json();
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, config_hash(config));
  j["config_hash"] = hex;
  j["seed"] = config.seed;
  j["versions"] = {{"laxoc", "0.1.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  ordered_json wt = ordered_json::object();
  for (const auto& [k, v] : wall_times) wt[k] = v;
  j["wall_times_s"] = wt;
  ordered_json nj = ordered_json::object();
  for (const auto& [k, v] : notes) nj[k] = v;
  j["notes"] = nj;
  return j;
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotSeries>& series,
                          int width, int height) {
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  const int ml = 60, mr = 20, mt = 40, mb = 50;
  auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto Y = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };
  const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
     << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
     << height - mb << "\" stroke=\"black\"/>\n";
  char buf[64];
  for (int i = 0; i <= 4; ++i) {
    double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    os << "<text x=\"" << X(xv) << "\" y=\"" << height - mb + 18
       << "\" text-anchor=\"middle\" font-size=\"10\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(yv) + 3
       << "\" text-anchor=\"end\" font-size=\"10\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (mt + height - mb) / 2 << ")\">" << ylabel << "</text>\n";
  for (size_t si = 0; si < series.size(); ++si) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[si % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[si].x.size(); ++i) {
      if (!std::isfinite(series[si].y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(series[si].x[i]), Y(series[si].y[i]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 14 * (si + 1)
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[si % 6] << "\">"
       << series[si].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_value_function(const GridValueFunction& vf,
                           const std::filesystem::path& base_path) {
  std::filesystem::create_directories(base_path.parent_path());
  {
    std::ofstream bin(base_path.string() + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(vf.values.data()),
              static_cast<std::streamsize>(vf.values.size() * sizeof(double)));
  }
  ordered_json j;
  j["kind"] = hj_kind_name(vf.kind);
  ordered_json ts = ordered_json::array();
  for (double t : vf.t_slices) ts.push_back(t);
  j["t_slices"] = ts;
  ordered_json axes = ordered_json::array();
  for (const auto& ax : vf.x_axes)
    axes.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"count", ax.count}});
  j["x_axes"] = axes;
  j["z_axis"] = {{"lo", vf.z_axis.lo}, {"hi", vf.z_axis.hi}, {"count", vf.z_axis.count}};
  j["layout"] = "row-major [t][x0][x1][z], float64 little-endian";
  ordered_json sx = ordered_json::array();
  for (double s : vf.scheme.sigma_x) sx.push_back(s);
  j["scheme"] = {{"type", "lax-friedrichs"},
                 {"sigma_x", sx},
                 {"sigma_z", vf.scheme.sigma_z},
                 {"cfl", vf.scheme.cfl},
                 {"total_substeps", vf.scheme.total_substeps},
                 {"edge_extrapolation", vf.scheme.edge_extrapolation}};
  write_text(base_path.string() + ".manifest.json", j.dump(2) + "\n");
  write_text(base_path.string() + ".t0.csv", value_function_slice_csv(vf, 0));
}

std::string value_function_slice_csv(const GridValueFunction& vf, int slice) {
  std::ostringstream os;
  const int n = vf.x_dim();
  for (int d = 0; d < n; ++d) os << "x_" << d << ",";
  os << "z,V\n";
  std::vector<int> xi(n, 0);
  while (true) {
    for (int zi = 0; zi < vf.z_axis.count; ++zi) {
      for (int d = 0; d < n; ++d) os << fmt_double(vf.x_axes[d].at(xi[d])) << ",";
      os << fmt_double(vf.z_axis.at(zi)) << "," << fmt_double(vf.at(slice, xi, zi)) << "\n";
    }
    int d = n - 1;
    for (; d >= 0; --d) {
      if (++xi[d] < vf.x_axes[d].count) break;
      xi[d] = 0;
    }
    if (d < 0) break;
  }
  return os.str();
}

}  // namespace laxoc
