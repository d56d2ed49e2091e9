#pragma once

#include "laxoc/hamiltonian.hpp"
#include "laxoc/problem.hpp"

namespace laxoc {

enum class ProgramKind { LaxPhi1, LaxPhi2Sub, LaxPhi2TI, DirectMinMax, DirectMinMinSub };

/// Per-column verdict mirroring the convexity-conditions table.
struct ColumnVerdict {
  bool convex = false;
  std::string first_violation;  // empty when convex
};

struct ConvexityReport {
  ColumnVerdict theta1, phi1, theta2, phi2, phi2ti;
};

ConvexityReport audit_convexity(const ProblemInstance& inst);

/// Full variable assignment of a transcribed program.
struct ProgramAssignment {
  std::vector<VectorXd> states;    // x[0..S]
  std::vector<VectorXd> controls;  // beta or alpha [0..S-1], full vectors
  double eta = std::numeric_limits<double>::quiet_NaN();  // epigraph scalar
  double objective = std::numeric_limits<double>::quiet_NaN();
};

struct ResidualReport {
  double dynamics = 0.0;            // max |x[k+1]-x[k]-rhs_k|_inf
  double control_margin = -kInf;    // max membership margin over steps
  double state_constraint = -kInf;  // max c(t_k, x[k])
  double epigraph = -kInf;          // max (cost_k' - eta); -inf when no eta
  double objective_gap = 0.0;       // |reported - re-evaluated|
  std::vector<int> flagged_dynamics_rows;
  std::vector<int> flagged_constraint_nodes;
};

/// A temporally discretized program over per-step reduced controls, with the
/// states eliminated through the (linear, for the Lax forms) rollout. The
/// solver sees a smoothed objective with exact gradients, per-step projectable
/// control sets, and affine node-constraint rows.
class ConvexProgram {
 public:
  struct Step {
    double t = 0.0, dt = 0.0;
    int u_dim = 0;
    ConvexSetPtr set;                 // feasible set of the reduced control
    std::vector<int> free_idx, fixed_idx;  // image rows (Lax); empty for direct
    MatrixXd fixed_P;                 // d(fixed rows)/dx
    VectorXd fixed_r;                 // offset: fixed = P x + r
  };

  ProgramKind kind = ProgramKind::LaxPhi1;
  std::shared_ptr<const ProblemInstance> inst;  // owned copy; programs outlive callers
  TimeGrid grid;          // program-local grid (truncated for subprograms)
  VectorXd x0;
  std::vector<Step> steps;
  bool audited_convex = false;
  std::string convexity_note;

  int num_steps() const { return static_cast<int>(steps.size()); }
  int reduced_dim() const;
  bool is_minmax() const { return kind == ProgramKind::LaxPhi1 || kind == ProgramKind::DirectMinMax; }

  /// States under the program dynamics for reduced controls u.
  std::vector<VectorXd> rollout(const VectorXd& u) const;

  double objective_exact(const VectorXd& u) const;
  /// Smoothed objective (softmax temperature mu_max over the per-index costs,
  /// Huber scale mu_norm inside the terminal cost) with its exact gradient.
  double objective_smoothed(const VectorXd& u, double mu_max, double mu_norm,
                            VectorXd* grad) const;

  /// Project each per-step block of u onto its control set, in place.
  void project_steps(VectorXd& u) const;

  /// Affine node-constraint rows c_row(t_k, x_k) <= 0 flattened over nodes.
  int node_row_count() const;
  double node_row_value(int row, const VectorXd& u) const;
  /// Gradient of a node row w.r.t. u (constant: rollouts here are affine in u
  /// for the Lax kinds; direct kinds recompute at u).
  VectorXd node_row_grad(int row, const VectorXd& u) const;
  void node_rows_all(const VectorXd& u, VectorXd* vals) const;

  ProgramAssignment expand(const VectorXd& u) const;
  /// Reduced vector whose expansion matches the assignment's controls.
  VectorXd reduce(const ProgramAssignment& a) const;

  /// Residuals of an arbitrary assignment, recomputed from scratch.
  ResidualReport residuals(const ProgramAssignment& a, double flag_tol = 1e-8) const;

  /// Per-index cumulative costs (stage sums plus terminal term) from an
  /// assignment, as the epigraph rows see them.
  std::vector<double> assignment_costs(const ProgramAssignment& a) const;

 private:
  friend ConvexProgram build_phi1_program(const ProblemInstance&, const TimeGrid&);
  friend ConvexProgram build_phi2ti_program(const ProblemInstance&, const TimeGrid&);
  friend ConvexProgram build_phi2_subprogram(const ProblemInstance&, const TimeGrid&, int);
  friend ConvexProgram build_direct_program(const ProblemInstance&, const TimeGrid&, int);

  bool lax() const { return kind != ProgramKind::DirectMinMax && kind != ProgramKind::DirectMinMinSub; }
  VectorXd full_control(int k, const VectorXd& u_k, const VectorXd& x_k) const;
  // stage cost H* (Lax) or L (direct) with gradient pieces
  double stage_value(int k, const VectorXd& x_k, const VectorXd& ctrl_full) const;
  void stage_grad(int k, const VectorXd& x_k, const VectorXd& ctrl_full,
                  VectorXd* d_ctrl, VectorXd* d_x) const;
  mutable std::vector<MatrixXd> jac_cache_;  // d x_k / d u for linear rollouts
  void ensure_jacobians() const;
};

/// Epigraph transcription of the min-max Lax formula: state constraints at
/// every node, relaxed controls in co(B(t_k, x_k)).
ConvexProgram build_phi1_program(const ProblemInstance& inst, const TimeGrid& grid);

/// Fixed-horizon transcription of the time-invariant min-min Lax formula,
/// with freezing admitted through co({0} u B).
ConvexProgram build_phi2ti_program(const ProblemInstance& inst, const TimeGrid& grid);

/// Time-varying min-min Lax transcription with the terminal index pinned to
/// k'; state constraints only on the prefix.
ConvexProgram build_phi2_subprogram(const ProblemInstance& inst, const TimeGrid& grid,
                                    int k_prime);

/// Direct (non-relaxed) transcription; min-max instances get the epigraph
/// form, min-min instances need an explicit terminal index.
ConvexProgram build_direct_program(const ProblemInstance& inst, const TimeGrid& grid,
                                   int k_prime = -1);

/// Always rejects: the time-invariant min-max problem has no Lax
/// transcription (its time-invariant Hamiltonian min{0, H} is non-convex in
/// the costate). The general min-max transcription covers those instances.
ConvexProgram build_phi1ti_program(const ProblemInstance& inst, const TimeGrid& grid);

}  // namespace laxoc
