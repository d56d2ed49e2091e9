#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "laxoc/scenarios.hpp"
#include "laxoc/transcription.hpp"

#include <random>

using namespace laxoc;

namespace {

VectorXd random_feasible(const ConvexProgram& prog, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  VectorXd u(prog.reduced_dim());
  for (int i = 0; i < u.size(); ++i) u[i] = g(rng);
  prog.project_steps(u);
  return u;
}

}  // namespace

TEST_CASE("audit: example-a reproduces the published verdicts") {
  ConvexityReport rep = audit_convexity(gen_example_a(3, 1));
  CHECK(rep.phi1.convex);
  CHECK_FALSE(rep.theta1.convex);
  CHECK(rep.theta1.first_violation.find("dynamics") != std::string::npos);
  CHECK_FALSE(rep.theta2.convex);
  CHECK_FALSE(rep.phi2.convex);
  CHECK_FALSE(rep.phi2ti.convex);
}

TEST_CASE("audit: example-b is convex in the time-invariant min-min column") {
  ConvexityReport rep = audit_convexity(gen_example_b(2, 1));
  CHECK(rep.phi2ti.convex);
  CHECK(rep.phi1.convex);
  CHECK(rep.theta1.convex);  // box controls with affine dynamics
  CHECK_FALSE(rep.phi2.convex);
  CHECK(rep.phi2.first_violation == "g=0");
}

TEST_CASE("audit: nonzero stage cost fails the phi2 column at the L row") {
  ProblemInstance inst = toy_lq(0.0);
  inst.cls = ProblemClass::MinMin;
  ConvexityReport rep = audit_convexity(inst);
  CHECK_FALSE(rep.phi2.convex);
  CHECK(rep.phi2.first_violation == "L=0");
}

TEST_CASE("phi1 program: dynamics rows, epigraph form, frozen toy values") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  ConvexProgram prog = build_phi1_program(inst, grid);
  CHECK(prog.audited_convex);
  CHECK(prog.reduced_dim() == 4);

  SUBCASE("independent brute force over a beta grid gives 0.5") {
    double best = kInf;
    std::vector<int> idx(4, 0);
    const double levels[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    while (true) {
      double x = 0.5, maxcost = std::abs(x);
      bool feas = x <= 2.0;
      for (int k = 0; k < 4; ++k) {
        x -= 0.25 * levels[idx[k]];
        maxcost = std::max(maxcost, std::abs(x));
        feas = feas && x <= 2.0;
      }
      if (feas) best = std::min(best, maxcost);
      int k = 0;
      for (; k < 4; ++k) {
        if (++idx[k] < 5) break;
        idx[k] = 0;
      }
      if (k == 4) break;
    }
    CHECK(best == doctest::Approx(0.5));
    // the transcription reproduces the brute-force value at the same point
    VectorXd u(4);
    u << 1.0, 1.0, 0.0, 0.0;  // move to 0 in two steps, stay
    CHECK(prog.objective_exact(u) == doctest::Approx(0.5));
  }

  SUBCASE("epigraph soundness: eta equals the max cost exactly") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      VectorXd u = random_feasible(prog, rng, 1.0);
      ProgramAssignment a = prog.expand(u);
      auto costs = prog.assignment_costs(a);
      CHECK(a.eta == *std::max_element(costs.begin(), costs.end()));
      CHECK(a.objective == a.eta);
      ResidualReport r = prog.residuals(a);
      CHECK(r.dynamics <= 1e-14);
      CHECK(r.epigraph <= 0.0);
    }
  }

  SUBCASE("x0 at the goal gives zero") {
    ProblemInstance at_goal = toy_1d_minmax(0.0);
    ConvexProgram p0 = build_phi1_program(at_goal, grid);
    CHECK(p0.objective_exact(VectorXd::Zero(4)) == doctest::Approx(0.0));
  }
}

TEST_CASE("phi1 program: example-a at the goal with zero velocity is free") {
  ProblemInstance inst = gen_example_a(1, 1);
  inst.initial_state = (VectorXd(4) << 1.0, 0.0, 1.0, 0.0).finished();
  TimeGrid grid = TimeGrid::uniform(2.0, 10);
  ConvexProgram prog = build_phi1_program(inst, grid);
  // the relaxed control can hold the state: beta2 = -d(t_k) cancellation is
  // inside the stadium, beta4 = 0
  VectorXd u(prog.reduced_dim());
  for (int k = 0; k < 10; ++k) {
    u[2 * k] = 0.0;
    u[2 * k + 1] = 0.0;
  }
  prog.project_steps(u);
  CHECK(prog.objective_exact(u) == doctest::Approx(0.0).epsilon(1e-12));
  ProgramAssignment a = prog.expand(u);
  ResidualReport r = prog.residuals(a);
  CHECK(r.control_margin <= 1e-9);
  CHECK(r.state_constraint <= 0.0);
}

TEST_CASE("phi2ti program: freezing start is feasible with value g(x0)") {
  ProblemInstance inst = gen_example_b(1, 2);
  inst.initial_state = (VectorXd(2) << 1.0, 1.0).finished();  // exactly the goal
  TimeGrid grid = TimeGrid::uniform(2.0, 8);
  ConvexProgram prog = build_phi2ti_program(inst, grid);
  VectorXd u = VectorXd::Zero(prog.reduced_dim());
  prog.project_steps(u);
  CHECK(u.lpNorm<Eigen::Infinity>() == 0.0);  // zero is in co({0} u B)
  CHECK(prog.objective_exact(u) == doctest::Approx(0.0));
}

TEST_CASE("phi2 subprograms: degenerate index and prefix windows") {
  ProblemInstance inst = toy_1d_drift_minmin(0.0);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  SUBCASE("k' = 0 degenerates to g(0, x0)") {
    ConvexProgram sub0 = build_phi2_subprogram(inst, grid, 0);
    CHECK(sub0.reduced_dim() == 0);
    VectorXd empty(0);
    CHECK(sub0.objective_exact(empty) == doctest::Approx(1.0));  // |0 - 1|
  }
  SUBCASE("a time-spike constraint only blocks suffixes that include it") {
    // c(s) spikes above zero only near node 3
    inst.constraint.rows.clear();
    inst.constraint.generic = [&](double s, const VectorXd&) {
      return (std::abs(s - grid.nodes[3]) < 0.1) ? 1.0 : -1.0;
    };
    inst.constraint.state_independent = true;
    bool prev_feasible = true;
    for (int kp = 0; kp <= 4; ++kp) {
      ConvexProgram sub = build_phi2_subprogram(inst, grid, kp);
      VectorXd u = VectorXd::Zero(sub.reduced_dim());
      sub.project_steps(u);
      VectorXd rows;
      sub.node_rows_all(u, &rows);
      bool feasible = rows.size() == 0 || rows.maxCoeff() <= 0.0;
      CHECK((kp <= 2) == feasible);
      // monotone: once infeasible, larger prefixes stay infeasible
      if (!prev_feasible) CHECK_FALSE(feasible);
      prev_feasible = feasible;
    }
  }
}

TEST_CASE("direct program: shapes, flags, and the min-min index requirement") {
  SUBCASE("nonlinear-in-control dynamics build but are flagged") {
    ProblemInstance inst = gen_example_a(1, 1);
    TimeGrid grid = TimeGrid::uniform(2.0, 5);
    ConvexProgram prog = build_direct_program(inst, grid);
    CHECK_FALSE(prog.audited_convex);
    CHECK(prog.convexity_note.find("dynamics") != std::string::npos);
    // rollout uses f directly
    VectorXd u = VectorXd::Zero(prog.reduced_dim());
    auto xs = prog.rollout(u);
    CHECK(xs.size() == 6);
  }
  SUBCASE("min-min needs an explicit terminal index") {
    ProblemInstance inst = toy_1d_drift_minmin(0.0);
    TimeGrid grid = TimeGrid::uniform(1.0, 4);
    CHECK_THROWS_AS(build_direct_program(inst, grid), std::invalid_argument);
    ConvexProgram sub = build_direct_program(inst, grid, 2);
    CHECK(sub.num_steps() == 2);
  }
}

TEST_CASE("time-invariant min-max has no Lax transcription") {
  ProblemInstance inst = toy_1d_minmax(0.5);
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  CHECK_THROWS_WITH_AS(build_phi1ti_program(inst, grid),
                       doctest::Contains("no Lax transcription"), std::invalid_argument);
  // the general min-max transcription still covers time-invariant data
  CHECK_NOTHROW(build_phi1_program(inst, grid));
}

TEST_CASE("nonzero stage cost without conjugate machinery is a build error") {
  ProblemInstance inst = toy_lq(0.5);
  inst.conjugate_hook = nullptr;
  inst.conjugate_grad_hook = nullptr;
  inst.dynamics.control_only = false;  // no sampled-envelope route either
  TimeGrid grid = TimeGrid::uniform(1.0, 4);
  CHECK_THROWS_WITH_AS(build_phi1_program(inst, grid), doctest::Contains("conjugate"),
                       std::invalid_argument);
}

TEST_CASE("gradient check: smoothed objectives match finite differences") {
  std::mt19937_64 rng(9);
  auto check_gradient = [&](const ConvexProgram& prog, double scale) {
    for (int trial = 0; trial < 5; ++trial) {
      VectorXd u = random_feasible(prog, rng, scale);
      // keep strictly inside the sets so projections do not clip the probes
      u *= 0.8;
      VectorXd grad;
      double f0 = prog.objective_smoothed(u, 0.05, 0.05, &grad);
      (void)f0;
      const double h = 1e-6;
      for (int i = 0; i < std::min<int>(u.size(), 10); ++i) {
        VectorXd up = u, um = u;
        up[i] += h;
        um[i] -= h;
        double fd = (prog.objective_smoothed(up, 0.05, 0.05, nullptr) -
                     prog.objective_smoothed(um, 0.05, 0.05, nullptr)) /
                    (2 * h);
        CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4));
      }
    }
  };
  SUBCASE("phi1 toy") {
    ProblemInstance inst = toy_1d_minmax(0.4);
    check_gradient(build_phi1_program(inst, TimeGrid::uniform(1.0, 5)), 0.6);
  }
  SUBCASE("phi1 example-a with coupled image rows") {
    ProblemInstance inst = gen_example_a(2, 4);
    check_gradient(build_phi1_program(inst, TimeGrid::uniform(2.0, 6)), 0.4);
  }
  SUBCASE("phi2ti example-b") {
    ProblemInstance inst = gen_example_b(2, 4);
    check_gradient(build_phi2ti_program(inst, TimeGrid::uniform(2.0, 6)), 0.5);
  }
  SUBCASE("phi1 with a smooth conjugate stage (lq)") {
    ProblemInstance inst = toy_lq(0.4);
    check_gradient(build_phi1_program(inst, TimeGrid::uniform(1.0, 5)), 0.5);
  }
  SUBCASE("direct min-max (lq)") {
    ProblemInstance inst = toy_lq(0.4);
    check_gradient(build_direct_program(inst, TimeGrid::uniform(1.0, 5)), 0.5);
  }
}

TEST_CASE("node rows: values and gradients against finite differences") {
  ProblemInstance inst = gen_example_a(1, 6);
  TimeGrid grid = TimeGrid::uniform(2.0, 5);
  ConvexProgram prog = build_phi1_program(inst, grid);
  std::mt19937_64 rng(21);
  VectorXd u = random_feasible(prog, rng, 0.5);
  VectorXd rows;
  prog.node_rows_all(u, &rows);
  REQUIRE(rows.size() == prog.node_row_count());
  const double h = 1e-6;
  for (int j = 0; j < rows.size(); j += 3) {
    CHECK(rows[j] == doctest::Approx(prog.node_row_value(j, u)).epsilon(1e-12));
    VectorXd g = prog.node_row_grad(j, u);
    for (int i = 0; i < std::min<int>(u.size(), 6); ++i) {
      VectorXd up = u, um = u;
      up[i] += h;
      um[i] -= h;
      double fd = (prog.node_row_value(j, up) - prog.node_row_value(j, um)) / (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: audited programs pass randomized midpoint convexity") {
  std::mt19937_64 rng(33);
  std::vector<ConvexProgram> progs;
  progs.push_back(build_phi1_program(toy_1d_minmax(0.4), TimeGrid::uniform(1.0, 5)));
  progs.push_back(build_phi1_program(gen_example_a(1, 6), TimeGrid::uniform(2.0, 6)));
  progs.push_back(build_phi2ti_program(gen_example_b(1, 6), TimeGrid::uniform(2.0, 6)));
  progs.push_back(build_phi1_program(toy_lq(0.4), TimeGrid::uniform(1.0, 5)));
  for (const auto& prog : progs) {
    REQUIRE(prog.audited_convex);
    for (int trial = 0; trial < 125; ++trial) {
      VectorXd u1 = random_feasible(prog, rng, 0.8);
      VectorXd u2 = random_feasible(prog, rng, 0.8);
      VectorXd mid = 0.5 * (u1 + u2);
      // control sets are convex, so the midpoint stays feasible
      VectorXd proj = mid;
      prog.project_steps(proj);
      CHECK((proj - mid).lpNorm<Eigen::Infinity>() <= 1e-9);
      double fmid = prog.objective_exact(mid);
      double favg = 0.5 * (prog.objective_exact(u1) + prog.objective_exact(u2));
      CHECK(fmid <= favg + 1e-9);
    }
  }
}

TEST_CASE("expand / reduce round-trips the reduced controls") {
  ProblemInstance inst = gen_example_a(2, 8);
  ConvexProgram prog = build_phi1_program(inst, TimeGrid::uniform(2.0, 5));
  std::mt19937_64 rng(41);
  VectorXd u = random_feasible(prog, rng, 0.5);
  ProgramAssignment a = prog.expand(u);
  VectorXd back = prog.reduce(a);
  CHECK((back - u).lpNorm<Eigen::Infinity>() <= 1e-14);
}
