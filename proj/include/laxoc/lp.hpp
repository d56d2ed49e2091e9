#pragma once

#include "laxoc/types.hpp"

namespace laxoc {

/// Result of min c.x subject to A x = b, x >= 0.
struct LpResult {
  bool feasible = false;
  double objective = kInf;
  VectorXd x;            // primal solution (size n)
  VectorXd dual;         // equality multipliers (size m)
  double infeasibility = kInf;  // phase-1 objective (0 when feasible)
};

/// Dense two-phase simplex with Bland's rule. Sized for the small
/// equality systems used by conjugate envelopes and decompositions
/// (a handful of rows, up to a few thousand columns).
LpResult solve_lp(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
                  double tol = 1e-11);

/// Lower convex envelope of scalar points (b_i, v_i): the largest convex
/// piecewise-linear function below all points, defined on [min b, max b].
class LowerEnvelope1D {
 public:
  LowerEnvelope1D(const std::vector<double>& b, const std::vector<double>& v);
  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  /// Envelope value; +inf outside [lo, hi].
  double value(double b) const;
  /// One-sided-consistent subgradient (slope of the active segment).
  double slope(double b) const;
  /// Hull breakpoints (as indices into the constructor arrays).
  const std::vector<int>& hull_indices() const { return hull_; }

 private:
  std::vector<double> xs_, vs_;  // hull breakpoints, increasing in x
  std::vector<int> hull_;
};

}  // namespace laxoc
