#pragma once

#include "laxoc/solver.hpp"

namespace laxoc {

/// Per-step convex-combination decompositions of (H*, -beta) into admissible
/// controls. ExactSumOne is the min-max mode (weights sum to one); SubOne is
/// the time-invariant min-min mode where the deficit is freezing time.
struct Decomposition {
  enum class Mode { ExactSumOne, SubOne };
  Mode mode = Mode::ExactSumOne;
  std::vector<std::vector<ControlAtom>> steps;
};

/// Decompose one step: find controls a_i in A and weights gamma_i with
/// sum_i gamma_i (L, f)(s, x, a_i) = (hstar_value, -beta). Uses the
/// instance's closed-form decomposer when declared, otherwise a linear
/// feasibility problem over the candidate atoms (pruned to a basic solution).
std::vector<ControlAtom> decompose_step(const ProblemInstance& inst, double s,
                                        const VectorXd& x, const VectorXd& beta,
                                        double hstar_value,
                                        const std::vector<ImageAtom>& candidates,
                                        bool sub_one, double tol = 1e-6);

/// Componentwise residual of the decomposition identity at one step.
double decomposition_residual(const ProblemInstance& inst, double s, const VectorXd& x,
                              const VectorXd& beta, double hstar_value,
                              const std::vector<ControlAtom>& atoms, bool sub_one);

/// Decompose every step of a solved relaxed program.
Decomposition decompose_relaxed_solution(const ProblemInstance& inst,
                                         const ConvexProgram& program,
                                         const Solution& solution, double tol = 1e-6);

/// Min-max schedule: within [t_k, t_{k+1}), atom i runs for gamma_i dt_k in
/// declared order. Weights must sum to one per step.
PiecewiseControl build_alpha_schedule_p1(const Decomposition& decomp, const TimeGrid& grid,
                                         double tol = 1e-9);

/// Time-invariant min-min schedule: the relaxed control with motion segments
/// then a frozen (zero) tail per step, and the pseudo-time-compressed
/// admissible control on [0, sigma(T)] with the instance filler beyond.
struct P2TISchedules {
  PiecewiseControl beta1;      // relaxed: -f(x_k, a_i) segments then zeros
  PiecewiseControl alpha_eps;  // admissible, spans [0, T]
  double sigma_T = 0.0;
};
P2TISchedules build_alpha_schedule_p2ti(const ProblemInstance& inst,
                                        const Decomposition& decomp, const TimeGrid& grid,
                                        const std::vector<VectorXd>& relaxed_states,
                                        double tol = 1e-9);

/// Pseudo-time sigma(s) = measure of { tau <= s : beta1(tau) != 0 }, exact on
/// the piecewise-constant schedule; the inverse returns the earliest
/// preimage and rejects queries beyond sigma(T).
double pseudo_time(const PiecewiseControl& beta1, double s);
double pseudo_time_inverse(const PiecewiseControl& beta1, double sigma_value);

struct TerminalChoice {
  double tau = 0.0;
  int k_star = -1;
  double value = kInf;
  bool feasible = true;
};

/// Optimal terminal grid time from a cost curve, honoring the class's
/// feasibility window.
TerminalChoice select_terminal_time(const ProblemInstance& inst,
                                    const std::vector<double>& J, int feasible_upto,
                                    const TimeGrid& grid);

}  // namespace laxoc
