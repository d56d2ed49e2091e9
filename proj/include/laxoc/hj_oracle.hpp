#pragma once

#include "laxoc/hamiltonian.hpp"

namespace laxoc {

enum class HJKind { V1, W1, V2, V1TI, V2TI, W2TI };

std::string hj_kind_name(HJKind k);

struct AxisGrid {
  double lo = 0.0, hi = 1.0;
  int count = 2;
  double step() const { return (hi - lo) / (count - 1); }
  double at(int i) const { return lo + i * step(); }
};

struct HJOptions {
  double cfl = 0.5;
  int stored_slices = 11;  // time slices kept (including t=0 and t=T)
};

struct SchemeInfo {
  std::vector<double> sigma_x;
  double sigma_z = 0.0;
  double cfl = 0.5;
  int total_substeps = 0;
  bool edge_extrapolation = true;  // one-sided differences at grid edges
};

/// Sampled augmented value function V(t, x, z) from backward Lax-Friedrichs
/// marching with the obstacle operators applied nodewise.
struct GridValueFunction {
  HJKind kind = HJKind::V1;
  std::vector<double> t_slices;    // ascending; front() = 0, back() = T
  std::vector<AxisGrid> x_axes;    // one or two axes
  AxisGrid z_axis;
  std::vector<double> values;      // [slice][x0][x1][z] row-major
  SchemeInfo scheme;

  int x_dim() const { return static_cast<int>(x_axes.size()); }
  int slice_size() const;
  double at(int slice, const std::vector<int>& xi, int zi) const;
  /// Multilinear interpolation over x of the z-profile at a stored slice.
  std::vector<double> z_profile(int slice, const VectorXd& x) const;
  int slice_index(double t, double tol = 1e-9) const;  // -1 when between slices
};

GridValueFunction solve_hj(const ProblemInstance& inst, HJKind kind,
                           const std::vector<AxisGrid>& x_axes, const AxisGrid& z_axis,
                           const HJOptions& options = {});

/// Smallest z with V(t, x, z) <= 0, linearly refined between the bracketing
/// z nodes; +inf when the z range never crosses.
double extract_theta(const GridValueFunction& vf, double t, const VectorXd& x);

struct ZRegularityReport {
  double max_midpoint_defect = 0.0;     // convexity in z
  double max_monotone_defect = 0.0;     // V must not increase in z
  double max_slope_defect = 0.0;        // nor drop faster than slope -1
  std::vector<int> worst_node;          // [slice, x..., z] of the worst defect
  bool pass(double tol) const {
    return max_midpoint_defect <= tol && max_monotone_defect <= tol &&
           max_slope_defect <= tol;
  }
};

ZRegularityReport check_z_regularity(const GridValueFunction& vf);

/// Suggested z range [min g - 1, max g + T max|L| + 1] over a state box.
AxisGrid suggest_z_axis(const ProblemInstance& inst, const std::vector<AxisGrid>& x_axes,
                        double dz);

}  // namespace laxoc
