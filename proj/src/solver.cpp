#include "laxoc/solver.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace laxoc {

namespace {

struct AlState {
  VectorXd multipliers;  // one per node row
  double rho = 10.0;
  double prev_excess = kInf;
};

// Augmented-Lagrangian hinge on q <= 0 rows: psi(q) = max(0, mu + rho q)^2/(2 rho) - mu^2/(2 rho).
double al_penalty(const ConvexProgram& prog, const VectorXd& u, const AlState& al,
                  VectorXd* grad) {
  const int m = prog.node_row_count();
  if (m == 0) return 0.0;
  VectorXd vals;
  prog.node_rows_all(u, &vals);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    double t = al.multipliers[j] + al.rho * vals[j];
    if (t > 0.0) {
      total += (t * t - al.multipliers[j] * al.multipliers[j]) / (2.0 * al.rho);
      if (grad) *grad += t * prog.node_row_grad(j, u);
    } else {
      total -= al.multipliers[j] * al.multipliers[j] / (2.0 * al.rho);
    }
  }
  return total;
}

double feasibility_excess(const ConvexProgram& prog, const VectorXd& u) {
  if (prog.node_row_count() == 0) return 0.0;
  VectorXd vals;
  prog.node_rows_all(u, &vals);
  return std::max(0.0, vals.maxCoeff());
}

}  // namespace

Solution solve(const ConvexProgram& program, const SolveOptions& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  Solution sol;
  const int U = program.reduced_dim();

  VectorXd u = opt.warm_start ? *opt.warm_start : VectorXd::Zero(U);
  program.project_steps(u);

  AlState al;
  al.multipliers = VectorXd::Zero(program.node_row_count());

  auto merit = [&](const VectorXd& v, double mu, VectorXd* grad) {
    if (grad) grad->setZero(U);
    double f = program.objective_smoothed(v, mu, mu, grad);
    f += al_penalty(program, v, al, grad);
    return f;
  };

  // Smoothing schedule (geometric) interleaved with multiplier rounds.
  std::vector<double> mus(std::max(1, opt.stages));
  for (int i = 0; i < static_cast<int>(mus.size()); ++i) {
    double w = (mus.size() == 1) ? 1.0 : static_cast<double>(i) / (mus.size() - 1);
    mus[i] = opt.mu_initial * std::pow(opt.mu_final / opt.mu_initial, w);
  }

  int iters_used = 0;
  double lip = 1.0;
  double final_stat = kInf;
  const int budget_per_stage =
      std::max(50, opt.max_iter / std::max(1, static_cast<int>(mus.size()) * 2));

  int al_round = 0;
  bool rho_capped_stall = false;
  const double rho_cap = 1e9;

  for (size_t stage = 0; stage < mus.size() * 2; ++stage) {
    const double mu = mus[std::min(stage / 2, mus.size() - 1)];
    VectorXd grad(U);
    double fu = merit(u, mu, &grad);
    VectorXd v = u, u_prev = u;
    double tk = 1.0;
    double window_best = fu;
    int window_len = 0;
    double stage_stat = kInf;

    for (int it = 0; it < budget_per_stage && iters_used < opt.max_iter; ++it, ++iters_used) {
      VectorXd gy(U);
      double fy = merit(v, mu, &gy);
      // backtracking prox step from the extrapolated point
      VectorXd cand;
      double fc = kInf;
      for (int bt = 0; bt < 60; ++bt) {
        cand = v - gy / lip;
        program.project_steps(cand);
        fc = merit(cand, mu, nullptr);
        VectorXd d = cand - v;
        double qmodel = fy + gy.dot(d) + 0.5 * lip * d.squaredNorm();
        if (fc <= qmodel + 1e-12 * std::max(1.0, std::abs(fy))) break;
        lip *= 2.0;
      }
      lip = std::max(1e-6, lip * 0.7);  // allow the estimate to relax again

      // monotone acceptance
      VectorXd u_new;
      double f_new;
      if (fc <= fu) {
        u_new = cand;
        f_new = fc;
      } else {
        VectorXd gu(U);
        merit(u, mu, &gu);
        VectorXd cand2 = u - gu / lip;
        program.project_steps(cand2);
        double fc2 = merit(cand2, mu, nullptr);
        if (fc2 <= fu) {
          u_new = cand2;
          f_new = fc2;
        } else {
          u_new = u;
          f_new = fu;
        }
      }
      double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      v = u_new + ((tk - 1.0) / t_next) * (u_new - u_prev);
      program.project_steps(v);
      u_prev = u_new;
      tk = t_next;

      if (opt.verbose && opt.log && (iters_used % 10 == 0)) {
        (*opt.log) << "iter " << iters_used << " obj " << std::setprecision(12)
                   << program.objective_exact(u_new) << " merit " << f_new << " feas "
                   << feasibility_excess(program, u_new) << " mu " << mu << "\n";
      }

      double drop = fu - f_new;
      u = u_new;
      fu = f_new;
      ++window_len;
      if (window_len >= 25) {
        stage_stat = (window_best - fu) / std::max(1.0, std::abs(fu)) / window_len;
        window_best = fu;
        window_len = 0;
        if (stage_stat < 1e-14 && drop <= 0.0) break;  // stage converged
        if (stage == mus.size() * 2 - 1 && stage_stat < 0.1 * opt.stat_tol) break;
      }
    }
    final_stat = stage_stat;

    // Multiplier update between stages.
    if (program.node_row_count() > 0 && al_round < opt.al_rounds + static_cast<int>(mus.size())) {
      VectorXd vals;
      program.node_rows_all(u, &vals);
      double excess = std::max(0.0, vals.maxCoeff());
      for (int j = 0; j < vals.size(); ++j)
        al.multipliers[j] = std::max(0.0, al.multipliers[j] + al.rho * vals[j]);
      if (excess > opt.feas_tol) {
        if (excess > 0.25 * al.prev_excess) {
          if (al.rho < rho_cap)
            al.rho *= 10.0;
          else if (excess > 0.9 * al.prev_excess)
            rho_capped_stall = true;
        }
        al.prev_excess = excess;
      }
      ++al_round;
    }
  }

  sol.assignment = program.expand(u);
  sol.objective = sol.assignment.objective;
  ResidualReport res = program.residuals(sol.assignment, opt.feas_tol);
  sol.dynamics_residual = res.dynamics;
  sol.constraint_violation = res.state_constraint;
  sol.control_margin = res.control_margin;
  sol.iterations = iters_used;
  double feas_excess = std::max(0.0, sol.constraint_violation);
  sol.stationarity = std::max(final_stat, feas_excess);
  sol.converged = final_stat <= opt.stat_tol && feas_excess <= opt.feas_tol;
  sol.infeasible = rho_capped_stall && feas_excess > std::sqrt(opt.feas_tol);
  if (sol.infeasible) {
    sol.status = "infeasible: node constraints could not be driven below tolerance "
                 "(penalty saturated at residual " +
                 std::to_string(feas_excess) + ")";
    sol.converged = false;
  } else if (!sol.converged && iters_used >= opt.max_iter) {
    sol.status = "iteration budget exhausted; best point returned";
  } else if (sol.converged) {
    sol.status = program.audited_convex ? "optimal (audited convex program)"
                                        : "stationary (local for non-convex program)";
  } else {
    sol.status = "stopped: stationarity " + std::to_string(final_stat);
  }
  sol.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

std::pair<int, Solution> solve_phi2_sweep(const ProblemInstance& inst, const TimeGrid& grid,
                                          const SolveOptions& options) {
  int best_k = -1;
  Solution best;
  best.objective = kInf;
  for (int k = 0; k <= grid.steps(); ++k) {
    ConvexProgram sub = build_phi2_subprogram(inst, grid, k);
    Solution s = solve(sub, options);
    if (s.infeasible || s.constraint_violation > std::sqrt(options.feas_tol)) continue;
    if (s.objective < best.objective - 1e-12) {
      best = s;
      best_k = k;
    }
  }
  if (best_k < 0) {
    best.infeasible = true;
    best.status = "all terminal-index subprograms infeasible";
  }
  return {best_k, best};
}

ResidualReport certify(const ConvexProgram& program, const Solution& solution,
                       double flag_tol) {
  return program.residuals(solution.assignment, flag_tol);
}

}  // namespace laxoc
