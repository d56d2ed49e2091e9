#pragma once

#include "laxoc/transcription.hpp"

#include <cstdint>
#include <iosfwd>

namespace laxoc {

struct SolveOptions {
  int max_iter = 20000;
  double feas_tol = 1e-8;
  double stat_tol = 1e-6;
  std::uint64_t seed = 0;  // recorded; the method itself is deterministic
  bool verbose = false;
  std::ostream* log = nullptr;          // iteration log sink when verbose
  double mu_initial = 0.3;              // smoothing start
  double mu_final = 1e-4;               // smoothing floor (softmax + Huber)
  int stages = 8;                       // continuation stages
  int al_rounds = 6;                    // multiplier updates on active nodes
  std::optional<VectorXd> warm_start;   // reduced controls
};

struct Solution {
  ProgramAssignment assignment;
  double objective = kInf;
  double dynamics_residual = 0.0;
  double constraint_violation = -kInf;  // max c(t_k, x_k)
  double control_margin = -kInf;
  double stationarity = kInf;  // trailing relative objective decrease at the
                               // final smoothing level plus feasibility excess
  int iterations = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool infeasible = false;
  std::string status;
};

/// Gradient-based solve of a transcribed program: smoothing continuation with
/// a monotone accelerated projected-gradient inner loop and an augmented
/// Lagrangian on the node constraints. States are recovered exactly from the
/// rollout, so dynamics residuals vanish by construction.
Solution solve(const ConvexProgram& program, const SolveOptions& options = {});

/// Exhaustive terminal-index sweep for the time-varying min-min Lax formula;
/// ties break toward the smallest index.
std::pair<int, Solution> solve_phi2_sweep(const ProblemInstance& inst, const TimeGrid& grid,
                                          const SolveOptions& options = {});

/// Independent residual recomputation for a solution's assignment.
ResidualReport certify(const ConvexProgram& program, const Solution& solution,
                       double flag_tol = 1e-8);

}  // namespace laxoc
