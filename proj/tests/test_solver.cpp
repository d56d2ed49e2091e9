#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "laxoc/scenarios.hpp"
#include "laxoc/solver.hpp"

#include <cstring>
#include <sstream>

using namespace laxoc;

TEST_CASE("solve phi1 toy: brute-forced value 0.5 within 1e-4") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  ConvexProgram prog = build_phi1_program(inst, grid);
  Solution sol = solve(prog);
  // brute force over a fine beta grid (oracle, independent of the solver)
  double oracle = kInf;
  const int levels = 21;
  std::vector<int> idx(4, 0);
  while (true) {
    double x = 0.5, maxc = 0.5;
    for (int k = 0; k < 4; ++k) {
      x -= 0.25 * (-1.0 + 2.0 * idx[k] / (levels - 1.0));
      maxc = std::max(maxc, std::abs(x));
    }
    oracle = std::min(oracle, maxc);
    int k = 0;
    for (; k < 4; ++k) {
      if (++idx[k] < levels) break;
      idx[k] = 0;
    }
    if (k == 4) break;
  }
  CHECK(oracle == doctest::Approx(0.5));
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(sol.converged);
  CHECK_FALSE(sol.infeasible);
  CHECK(sol.dynamics_residual <= 1e-8);
  CHECK(sol.constraint_violation <= 1e-8);
}

TEST_CASE("solve phi2ti drift toy: reaches the goal, value 0") {
  ProblemInstance inst = toy_1d_drift_minmin(0.0);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  ConvexProgram prog = build_phi2ti_program(inst, grid);
  Solution sol = solve(prog);
  // oracle: reachable terminal set under xdot = -b, b in [-3, 0]
  double oracle = kInf;
  const int levels = 13;
  std::vector<int> idx(4, 0);
  while (true) {
    double x = 0.0;
    for (int k = 0; k < 4; ++k) x -= 0.25 * (-3.0 + 3.0 * idx[k] / (levels - 1.0));
    oracle = std::min(oracle, std::abs(x - 1.0));
    int k = 0;
    for (; k < 4; ++k) {
      if (++idx[k] < levels) break;
      idx[k] = 0;
    }
    if (k == 4) break;
  }
  CHECK(oracle == doctest::Approx(0.0));
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(sol.converged);
}

TEST_CASE("solve phi2ti with an active cap lands on the boundary value") {
  ProblemInstance inst = toy_1d_drift_minmin(0.0, 0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  Solution sol = solve(build_phi2ti_program(inst, grid));
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(2e-4));
  CHECK(sol.constraint_violation <= 1e-6);
}

TEST_CASE("solve: constant positive constraint reports infeasibility") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  inst.constraint.rows.clear();
  AffineRow row;
  row.a = (VectorXd(1) << 0.0).finished();
  row.b = [](double) { return 1.0; };  // c == +1, never satisfiable
  inst.constraint.rows.push_back(row);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  Solution sol = solve(build_phi1_program(inst, grid));
  CHECK(sol.infeasible);
  CHECK_FALSE(sol.converged);
  CHECK(sol.status.find("infeasible") != std::string::npos);
}

TEST_CASE("solve example-b at the goal: freezing keeps the cost at zero") {
  ProblemInstance inst = gen_example_b(1, 2);
  inst.initial_state = (VectorXd(2) << 1.0, 1.0).finished();
  TimeGrid grid = TimeGrid::uniform(2.0, 10);
  Solution sol = solve(build_phi2ti_program(inst, grid));
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-5));
  for (const auto& b : sol.assignment.controls)
    CHECK(b.lpNorm<Eigen::Infinity>() <= 1e-4);  // beta stays at the freeze point
}

TEST_CASE("solve_phi2_sweep: terminal index selection") {
  SUBCASE("goal reached at t = 0.5, smallest index wins ties") {
    ProblemInstance inst = toy_1d_minmax(0.5);
    inst.cls = ProblemClass::MinMin;
    inst.time_invariant = false;  // force the time-varying sweep
    TimeGrid grid = TimeGrid::uniform(1.0, 4);
    auto [k, sol] = solve_phi2_sweep(inst, grid);
    CHECK(k == 2);  // t = 0.5 is the earliest index reaching 0
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-4));
  }
  SUBCASE("x0 already optimal picks k' = 0") {
    ProblemInstance inst = toy_1d_minmax(0.0);
    inst.cls = ProblemClass::MinMin;
    inst.time_invariant = false;
    TimeGrid grid = TimeGrid::uniform(1.0, 4);
    auto [k, sol] = solve_phi2_sweep(inst, grid);
    CHECK(k == 0);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("constraint wall from node 2 caps the sweep at k' = 1") {
    ProblemInstance inst = toy_1d_minmax(0.5);
    inst.cls = ProblemClass::MinMin;
    inst.time_invariant = false;
    TimeGrid grid = TimeGrid::uniform(1.0, 4);
    inst.constraint.rows.clear();
    inst.constraint.generic = [&](double s, const VectorXd&) {
      return (s >= grid.nodes[2] - 1e-9) ? 1.0 : -1.0;
    };
    inst.constraint.state_independent = true;
    auto [k, sol] = solve_phi2_sweep(inst, grid);
    CHECK(k == 1);
    CHECK(sol.objective == doctest::Approx(0.25).epsilon(1e-4));  // best |x| by t=0.25
  }
  SUBCASE("all subprograms infeasible reports as such") {
    ProblemInstance inst = toy_1d_minmax(0.5);
    inst.cls = ProblemClass::MinMin;
    inst.time_invariant = false;
    inst.constraint.rows.clear();
    inst.constraint.generic = [](double, const VectorXd&) { return 1.0; };
    inst.constraint.state_independent = true;
    TimeGrid grid = TimeGrid::uniform(1.0, 4);
    auto [k, sol] = solve_phi2_sweep(inst, grid);
    CHECK(k == -1);
    CHECK(sol.infeasible);
  }
}

TEST_CASE("direct and phi1 transcriptions agree on the LQ toy") {
  ProblemInstance inst = toy_lq(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 5);
  Solution lax = solve(build_phi1_program(inst, grid));
  Solution direct = solve(build_direct_program(inst, grid));
  CHECK(lax.converged);
  CHECK(direct.converged);
  CHECK(lax.objective == doctest::Approx(direct.objective).epsilon(5e-4));
}

TEST_CASE("direct single step matches an exhaustive control scan") {
  ProblemInstance inst = toy_lq(0.4);
  TimeGrid grid = TimeGrid::uniform(1.0, 1);
  Solution sol = solve(build_direct_program(inst, grid));
  double oracle = kInf;
  for (int i = 0; i <= 4000; ++i) {
    double a = -1.0 + 2.0 * i / 4000.0;
    double x1 = 0.4 + 1.0 * a;
    double j1 = a * a * 1.0 + x1 * x1;
    oracle = std::min(oracle, std::max(0.4 * 0.4, j1));
  }
  CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("certify: residual recomputation and row flagging") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  ConvexProgram prog = build_phi1_program(inst, grid);
  SUBCASE("hand-built feasible assignment has vanishing residuals") {
    ProgramAssignment a;
    a.states.resize(5);
    a.controls.resize(4);
    double x = 0.5;
    for (int k = 0; k < 5; ++k) {
      a.states[k] = (VectorXd(1) << x).finished();
      if (k < 4) {
        a.controls[k] = (VectorXd(1) << 0.5).finished();
        x -= 0.25 * 0.5;
      }
    }
    auto costs_x = [&] {
      double m = -kInf;
      for (const auto& s : a.states) m = std::max(m, std::abs(s[0]));
      return m;
    }();
    a.eta = costs_x;
    a.objective = costs_x;
    Solution sol;
    sol.assignment = a;
    ResidualReport rep = certify(prog, sol);
    CHECK(rep.dynamics <= 1e-12);
    CHECK(rep.control_margin <= 1e-12);
    CHECK(rep.state_constraint <= 0.0);
    CHECK(rep.epigraph <= 1e-12);
    CHECK(rep.objective_gap <= 1e-12);
    CHECK(rep.flagged_dynamics_rows.empty());
  }
  SUBCASE("a 1e-3 dynamics violation is flagged at its row") {
    Solution sol = solve(prog);
    sol.assignment.states[2][0] += 1e-3;
    ResidualReport rep = certify(prog, sol, 1e-8);
    CHECK(rep.dynamics == doctest::Approx(1e-3).epsilon(1e-6));
    REQUIRE(rep.flagged_dynamics_rows.size() == 2);  // rows k=1 and k=2 touch x[2]
    CHECK(rep.flagged_dynamics_rows[0] == 1);
    CHECK(rep.flagged_dynamics_rows[1] == 2);
  }
}

TEST_CASE("determinism: identical program + options give identical values") {
  ProblemInstance inst = gen_example_b(2, 5);
  TimeGrid grid = TimeGrid::uniform(2.0, 8);
  ConvexProgram prog = build_phi2ti_program(inst, grid);
  SolveOptions opt;
  Solution a = solve(prog, opt);
  Solution b = solve(prog, opt);
  CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.assignment.controls.size() == b.assignment.controls.size());
  for (size_t k = 0; k < a.assignment.controls.size(); ++k)
    CHECK(std::memcmp(a.assignment.controls[k].data(), b.assignment.controls[k].data(),
                      sizeof(double) * a.assignment.controls[k].size()) == 0);
}

TEST_CASE("iteration log: merit decreases within each smoothing stage") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 8);
  ConvexProgram prog = build_phi1_program(inst, grid);
  SolveOptions opt;
  opt.verbose = true;
  std::ostringstream log;
  opt.log = &log;
  solve(prog, opt);
  std::istringstream in(log.str());
  std::string tok;
  double prev_merit = kInf, prev_mu = -1.0;
  int checked = 0;
  while (in >> tok) {
    if (tok != "iter") continue;
    long iter;
    double obj, merit, feas, mu;
    in >> iter >> tok >> obj >> tok >> merit >> tok >> feas >> tok >> mu;
    if (mu == prev_mu) {
      CHECK(merit <= prev_merit + 1e-12);
      ++checked;
    }
    prev_merit = merit;
    prev_mu = mu;
  }
  CHECK(checked > 10);
}

TEST_CASE("two starting points agree on an audited-convex program") {
  ProblemInstance inst = toy_1d_minmax(0.8);
  TimeGrid grid = TimeGrid::uniform(1.0, 6);
  ConvexProgram prog = build_phi1_program(inst, grid);
  SolveOptions opt;
  opt.stat_tol = 1e-4;
  Solution from_zero = solve(prog, opt);
  SolveOptions warm = opt;
  VectorXd other = VectorXd::Constant(prog.reduced_dim(), -0.9);
  warm.warm_start = other;
  Solution from_other = solve(prog, warm);
  CHECK(std::abs(from_zero.objective - from_other.objective) <= 10 * opt.stat_tol);
}

TEST_CASE("reported objective equals re-evaluation on the assignment") {
  ProblemInstance inst = gen_example_b(1, 6);
  TimeGrid grid = TimeGrid::uniform(2.0, 10);
  ConvexProgram prog = build_phi2ti_program(inst, grid);
  Solution sol = solve(prog);
  auto costs = prog.assignment_costs(sol.assignment);
  CHECK(std::abs(sol.objective - costs.back()) <= 1e-10);
}
