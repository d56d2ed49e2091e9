#pragma once

#include "laxoc/control_image.hpp"
#include "laxoc/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace laxoc {

/// System dynamics with the structural metadata the convexity audit and the
/// transcriptions read.
struct Dynamics {
  std::function<VectorXd(double s, const VectorXd& x, const VectorXd& a)> f;

  bool affine_in_state = false;   // f = M(s) x + control_part(s, a)
  bool affine_in_control = false; // control_part(s, a) = N(s) a + drift(s)
  bool control_only = false;      // f = control_part(a), no s or x dependence

  std::function<MatrixXd(double s)> state_matrix;                      // M(s)
  std::function<VectorXd(double s, const VectorXd& a)> control_part;   // f^a(s,a)
  std::function<MatrixXd(double s)> control_matrix;                    // N(s)
  std::function<VectorXd(double s)> drift;                             // C(s)

  VectorXd eval(double s, const VectorXd& x, const VectorXd& a) const;
};

/// Stage cost L(s, x, a) plus structure flags.
struct StageCost {
  bool is_zero = true;
  std::function<double(double s, const VectorXd& x, const VectorXd& a)> eval;
  std::function<VectorXd(double s, const VectorXd& x, const VectorXd& a)> grad_a;

  bool separable = false;        // L = state_part(s,x) + ctrl_part(s,a)
  bool state_part_zero = true;
  bool state_part_convex = true;
  bool ctrl_part_convex = false;
  bool convex_in_xa = false;

  std::function<double(double s, const VectorXd& x)> state_part;
  std::function<double(double s, const VectorXd& a)> ctrl_part;
  /// Per-coordinate pieces when ctrl_part sums over control coordinates.
  std::vector<std::function<double(double ai)>> ctrl_coords;

  double value(double s, const VectorXd& x, const VectorXd& a) const;
};

/// Terminal cost g(s, x) as a structured convex expression:
/// sum_j w_j ||A_j x + offset_j(s)|| + 0.5 x'Qx + lin.x + constant(s).
struct NormTerm {
  double weight = 1.0;
  MatrixXd A;
  std::function<VectorXd(double s)> offset;  // may be null (zero offset)
  VectorXd offset_at(double s) const;
};

struct TerminalCost {
  bool is_zero = false;
  std::vector<NormTerm> norms;
  MatrixXd quad;   // empty or n x n (PSD for the convex flag to be honest)
  VectorXd lin;    // empty or n
  std::function<double(double s)> constant;
  bool convex_in_x = true;
  bool time_dependent = false;

  double eval(double s, const VectorXd& x) const;
  VectorXd subgrad(double s, const VectorXd& x) const;
  /// Huber-smoothed value/gradient (norm terms smoothed at scale mu).
  double smooth_eval(double s, const VectorXd& x, double mu, VectorXd* grad) const;
};

/// State constraint c(s, x) <= 0 as the max of affine rows a.x + b(s) and an
/// optional generic convex term.
struct AffineRow {
  VectorXd a;
  std::function<double(double s)> b;  // may be null (zero)
  double offset_at(double s) const { return b ? b(s) : 0.0; }
};

struct StateConstraint {
  std::vector<AffineRow> rows;
  std::function<double(double s, const VectorXd& x)> generic;
  std::function<VectorXd(double s, const VectorXd& x)> generic_subgrad;
  bool convex_in_x = true;
  bool state_independent = false;  // c = c(s)

  double eval(double s, const VectorXd& x) const;
};

/// Control constraint set A.
struct ControlSet {
  enum class Kind { Box, Ball, Vertices, Samples };
  Kind kind = Kind::Box;
  VectorXd lo, hi;                  // Box
  VectorXd center;                  // Ball
  double radius = 0.0;              // Ball
  std::vector<VectorXd> points;     // Vertices / Samples

  int dim() const;
  bool contains(const VectorXd& a, double tol = 1e-9) const;
  VectorXd project(const VectorXd& a) const;
  /// max_{a in A} c.a with a maximizer (exact for Box/Ball/Vertices).
  std::pair<double, VectorXd> support(const VectorXd& c) const;
  /// Deterministic sample grid with the given per-axis resolution.
  std::vector<VectorXd> sample_grid(int per_axis) const;
  VectorXd some_point() const;

  static ControlSet box(VectorXd lo, VectorXd hi);
  static ControlSet ball(VectorXd center, double radius);
  static ControlSet vertices(std::vector<VectorXd> pts);
  static ControlSet samples(std::vector<VectorXd> pts);
};

struct HbarResult {
  double value = 0.0;
  VectorXd maximizer;
};

/// A state-constrained problem instance (min-max or min-min over the
/// horizon), with the structure hooks the Hamiltonian and transcription
/// layers use when closed forms are available.
struct ProblemInstance {
  std::string name;
  ProblemClass cls = ProblemClass::MinMax;
  bool time_invariant = false;
  double horizon = 1.0;
  int state_dim = 0;
  int control_dim = 0;
  VectorXd initial_state;

  Dynamics dynamics;
  StageCost stage;
  TerminalCost terminal;
  StateConstraint constraint;
  ControlSet controls;

  /// Closed-form max_a { -p.f + q L } when available.
  std::function<HbarResult(double s, const VectorXd& x, const VectorXd& p, double q)>
      hamiltonian_hook;
  /// Closed-form conjugate H*(s, x, b) on its domain (domain enforcement is
  /// external), with gradient for smooth hooks.
  std::function<double(double s, const VectorXd& x, const VectorXd& b)> conjugate_hook;
  std::function<VectorXd(double s, const VectorXd& x, const VectorXd& b)>
      conjugate_grad_hook;
  /// Relaxed control image description.
  ImageFactory image;
  /// Closed-form step decomposition (atoms with weights); sub_one selects the
  /// time-invariant min-min mode where weights may sum below one.
  std::function<std::vector<ControlAtom>(double s, const VectorXd& x,
                                         const VectorXd& beta, bool sub_one)>
      decomposer_hook;

  VectorXd filler_control;     // admissible filler for reconstructed tails
  int sample_resolution = 201; // fallback grid resolution per control axis

  /// Spot check that a time-invariant instance ignores the time argument.
  bool looks_time_invariant(double tol = 1e-12) const;
};

struct FeasibilityReport {
  double max_violation = -kInf;
  std::optional<double> first_violation_time;
  int feasible_upto = -1;  // largest grid index k' with c <= tol on [0, t_k']
};

struct ProblemValue {
  double value = kInf;
  int k_star = -1;
  bool feasible = true;
  std::string note;
};

/// Classical RK4 integration of the instance dynamics under a piecewise
/// control, sampled at every control breakpoint with `substeps` subdivisions
/// in between.
Trajectory integrate_dynamics(const ProblemInstance& inst, const PiecewiseControl& control,
                              const VectorXd& x0, int substeps);

/// Running objective J[k'] = sum_{segments before t_k'} L * ds + g(t_k', x(t_k'))
/// by left-endpoint quadrature over the dense samples.
std::vector<double> evaluate_running_objective(const ProblemInstance& inst,
                                               const Trajectory& traj,
                                               const PiecewiseControl& control,
                                               const TimeGrid& grid);

/// Min-max or min-min value over the grid indices, honoring the feasibility
/// window of the problem class. Ties break toward the smallest index.
ProblemValue evaluate_problem_value(const ProblemInstance& inst,
                                    const std::vector<double>& J, int feasible_upto);

/// Max constraint violation along the dense trajectory plus the largest grid
/// prefix that stays within tol.
FeasibilityReport check_feasibility(const ProblemInstance& inst, const Trajectory& traj,
                                    const TimeGrid& grid, double tol = 1e-6);

}  // namespace laxoc
