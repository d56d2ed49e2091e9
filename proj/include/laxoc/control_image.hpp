#pragma once

#include "laxoc/convex_sets.hpp"

#include <functional>

namespace laxoc {

/// A candidate point of the control image together with its witness control
/// and stage cost: b = -f(s, x, a), cost = L(s, x, a).
struct ImageAtom {
  VectorXd control;
  VectorXd b;
  double stage_cost = 0.0;
};

/// Description of the relaxed control image at one (s, x): the convex hull
/// co(B(s,x)) of {-f(s,x,a) | a in A}, or co({0} u B(x)) when includes_zero
/// is set. Components split into rows pinned by an affine function of the
/// state (state-coupled image directions) and a free block living in a
/// convex set.
struct ControlImage {
  int dim = 0;
  std::vector<int> free_idx;   // rows of b covered by free_set
  std::vector<int> fixed_idx;  // rows pinned to fixed_vals = P x + r(s)
  VectorXd fixed_vals;         // values at this (s, x)
  MatrixXd fixed_P;            // d(fixed rows)/dx, one row per fixed index
  ConvexSetPtr free_set;
  bool includes_zero = false;

  /// Margin of the free block against the raw (pre-hull) image B; empty when
  /// B is already convex.
  std::function<double(const VectorXd& b_free)> raw_margin;

  /// Witness candidates for conjugate envelopes and decompositions; may be
  /// empty when closed forms cover every use.
  std::vector<ImageAtom> atoms;

  VectorXd free_part(const VectorXd& b) const {
    VectorXd out(free_idx.size());
    for (size_t i = 0; i < free_idx.size(); ++i) out[i] = b[free_idx[i]];
    return out;
  }

  VectorXd assemble(const VectorXd& b_free) const {
    VectorXd out(dim);
    for (size_t i = 0; i < fixed_idx.size(); ++i) out[fixed_idx[i]] = fixed_vals[i];
    for (size_t i = 0; i < free_idx.size(); ++i) out[free_idx[i]] = b_free[i];
    return out;
  }

  /// Signed membership margin of a full image vector; fixed rows contribute
  /// their absolute mismatch.
  double margin(const VectorXd& b) const {
    double m = -kInf;
    for (size_t i = 0; i < fixed_idx.size(); ++i)
      m = std::max(m, std::abs(b[fixed_idx[i]] - fixed_vals[i]));
    if (!free_idx.empty()) m = std::max(m, free_set->margin(free_part(b)));
    return m;
  }

  bool contains(const VectorXd& b, double tol, double* margin_out = nullptr) const {
    double m = margin(b);
    if (margin_out) *margin_out = m;
    return m <= tol;
  }

  /// Membership in the raw image B (not its hull); falls back to the hull
  /// margin when B is convex.
  double margin_raw(const VectorXd& b) const {
    double m = -kInf;
    for (size_t i = 0; i < fixed_idx.size(); ++i)
      m = std::max(m, std::abs(b[fixed_idx[i]] - fixed_vals[i]));
    if (!free_idx.empty()) {
      VectorXd bf = free_part(b);
      m = std::max(m, raw_margin ? raw_margin(bf) : free_set->margin(bf));
    }
    return m;
  }

  /// max_{b in image} p.b with a maximizer.
  std::pair<double, VectorXd> support(const VectorXd& p) const {
    double val = 0.0;
    VectorXd arg(dim);
    for (size_t i = 0; i < fixed_idx.size(); ++i) {
      val += p[fixed_idx[i]] * fixed_vals[i];
      arg[fixed_idx[i]] = fixed_vals[i];
    }
    if (!free_idx.empty()) {
      VectorXd pf(free_idx.size());
      for (size_t i = 0; i < free_idx.size(); ++i) pf[i] = p[free_idx[i]];
      auto [v, a] = free_set->support(pf);
      val += v;
      for (size_t i = 0; i < free_idx.size(); ++i) arg[free_idx[i]] = a[i];
    }
    return {val, arg};
  }

  VectorXd project(const VectorXd& b) const {
    VectorXd out = assemble(free_idx.empty()
                                ? VectorXd()
                                : VectorXd(free_set->project(free_part(b))));
    return out;
  }
};

/// Factory building the image description of an instance at (s, x);
/// include_zero selects co({0} u B) for the time-invariant min-min problem.
using ImageFactory =
    std::function<ControlImage(double s, const VectorXd& x, bool include_zero)>;

/// Coupled hull co({0} u (box x ... x box)) for per-agent boxes
/// [l1, u1] x [-u2, u2] with u1 < 0, written as the pairwise inequality
/// system the scaled representation {theta c : theta in [0,1], c in boxes}
/// induces.
ConvexSetPtr make_scaled_box_hull(int agents, double l1, double u1, double u2);

}  // namespace laxoc
