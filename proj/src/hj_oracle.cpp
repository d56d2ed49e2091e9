#include "laxoc/hj_oracle.hpp"

#include <cmath>

namespace laxoc {

std::string hj_kind_name(HJKind k) {
  switch (k) {
    case HJKind::V1: return "V1";
    case HJKind::W1: return "W1";
    case HJKind::V2: return "V2";
    case HJKind::V1TI: return "V1_TI";
    case HJKind::V2TI: return "V2_TI";
    case HJKind::W2TI: return "W2_TI";
  }
  return "?";
}

int GridValueFunction::slice_size() const {
  int s = z_axis.count;
  for (const auto& ax : x_axes) s *= ax.count;
  return s;
}

double GridValueFunction::at(int slice, const std::vector<int>& xi, int zi) const {
  int idx = 0;
  for (size_t d = 0; d < x_axes.size(); ++d) idx = idx * x_axes[d].count + xi[d];
  idx = idx * z_axis.count + zi;
  return values[static_cast<size_t>(slice) * slice_size() + idx];
}

std::vector<double> GridValueFunction::z_profile(int slice, const VectorXd& x) const {
  const int n = x_dim();
  std::vector<int> base(n);
  std::vector<double> w(n);
  for (int d = 0; d < n; ++d) {
    double pos = (x[d] - x_axes[d].lo) / x_axes[d].step();
    if (pos < -1e-9 || pos > x_axes[d].count - 1 + 1e-9)
      throw std::out_of_range("z_profile: x outside the grid on axis " + std::to_string(d));
    pos = std::min(std::max(pos, 0.0), static_cast<double>(x_axes[d].count - 1));
    base[d] = std::min(static_cast<int>(pos), x_axes[d].count - 2);
    if (x_axes[d].count == 1) base[d] = 0;
    w[d] = pos - base[d];
  }
  std::vector<double> out(z_axis.count, 0.0);
  const int corners = 1 << n;
  std::vector<int> xi(n);
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    for (int d = 0; d < n; ++d) {
      int bit = (c >> d) & 1;
      xi[d] = std::min(base[d] + bit, x_axes[d].count - 1);
      weight *= bit ? w[d] : (1.0 - w[d]);
    }
    if (weight == 0.0) continue;
    for (int zi = 0; zi < z_axis.count; ++zi) out[zi] += weight * at(slice, xi, zi);
  }
  return out;
}

int GridValueFunction::slice_index(double t, double tol) const {
  for (size_t i = 0; i < t_slices.size(); ++i)
    if (std::abs(t_slices[i] - t) <= tol) return static_cast<int>(i);
  return -1;
}

namespace {

struct Shape {
  std::vector<int> nx;
  int nz;
  std::vector<int> x_stride;  // stride in nodes of each x axis
  int total;
};

Shape make_shape(const std::vector<AxisGrid>& x_axes, const AxisGrid& z_axis) {
  Shape s;
  s.nz = z_axis.count;
  int stride = z_axis.count;
  s.x_stride.resize(x_axes.size());
  for (int d = static_cast<int>(x_axes.size()) - 1; d >= 0; --d) {
    s.x_stride[d] = stride;
    stride *= x_axes[d].count;
  }
  for (const auto& ax : x_axes) s.nx.push_back(ax.count);
  s.total = stride;
  return s;
}

}  // namespace

AxisGrid suggest_z_axis(const ProblemInstance& inst, const std::vector<AxisGrid>& x_axes,
                        double dz) {
  double gmin = kInf, gmax = -kInf, lmax = 0.0;
  // corner + center samples of the state box at a few times
  std::vector<VectorXd> xs;
  const int n = static_cast<int>(x_axes.size());
  for (int c = 0; c < (1 << n); ++c) {
    VectorXd x(n);
    for (int d = 0; d < n; ++d) x[d] = ((c >> d) & 1) ? x_axes[d].hi : x_axes[d].lo;
    xs.push_back(x);
  }
  VectorXd mid(n);
  for (int d = 0; d < n; ++d) mid[d] = 0.5 * (x_axes[d].lo + x_axes[d].hi);
  xs.push_back(mid);
  auto ctrl = inst.controls.sample_grid(5);
  for (double t : {0.0, 0.5 * inst.horizon, inst.horizon}) {
    for (const auto& x : xs) {
      double g = inst.terminal.eval(t, x);
      gmin = std::min(gmin, g);
      gmax = std::max(gmax, g);
      for (const auto& a : ctrl) lmax = std::max(lmax, std::abs(inst.stage.value(t, x, a)));
    }
  }
  AxisGrid z;
  z.lo = gmin - 1.0;
  z.hi = gmax + inst.horizon * lmax + 1.0;
  z.count = std::max(2, static_cast<int>(std::lround((z.hi - z.lo) / dz)) + 1);
  z.hi = z.lo + dz * (z.count - 1);
  return z;
}

GridValueFunction solve_hj(const ProblemInstance& inst, HJKind kind,
                           const std::vector<AxisGrid>& x_axes, const AxisGrid& z_axis,
                           const HJOptions& options) {
  const int n = static_cast<int>(x_axes.size());
  if (n < 1 || n > 2) throw std::invalid_argument("solve_hj: supports one or two state axes");
  if (n != inst.state_dim)
    throw std::invalid_argument("solve_hj: axis count must match the state dimension");
  const bool ti_kind = (kind == HJKind::V1TI || kind == HJKind::V2TI || kind == HJKind::W2TI);
  if (ti_kind && !inst.time_invariant)
    throw std::invalid_argument("solve_hj: time-invariant PDE kind on a time-varying instance");

  GridValueFunction vf;
  vf.kind = kind;
  vf.x_axes = x_axes;
  vf.z_axis = z_axis;
  const int slices = std::max(2, options.stored_slices);
  vf.t_slices.resize(slices);
  for (int i = 0; i < slices; ++i) vf.t_slices[i] = inst.horizon * i / (slices - 1);
  vf.t_slices.back() = inst.horizon;

  Shape shape = make_shape(x_axes, z_axis);
  vf.values.assign(static_cast<size_t>(slices) * shape.total, 0.0);

  // Dissipation bounds from sampled |f| and |L| over the grid box.
  std::vector<double> sigma_x(n, 0.0);
  double sigma_z = 0.0;
  {
    auto ctrl = inst.controls.sample_grid(inst.controls.dim() >= 2 ? 9 : 33);
    std::vector<VectorXd> xs;
    for (int c = 0; c < (1 << n); ++c) {
      VectorXd x(n);
      for (int d = 0; d < n; ++d) x[d] = ((c >> d) & 1) ? x_axes[d].hi : x_axes[d].lo;
      xs.push_back(x);
    }
    VectorXd mid(n);
    for (int d = 0; d < n; ++d) mid[d] = 0.5 * (x_axes[d].lo + x_axes[d].hi);
    xs.push_back(mid);
    for (double t : {0.0, 0.25 * inst.horizon, 0.5 * inst.horizon, 0.75 * inst.horizon,
                     inst.horizon}) {
      for (const auto& x : xs) {
        for (const auto& a : ctrl) {
          VectorXd f = inst.dynamics.eval(t, x, a);
          for (int d = 0; d < n; ++d) sigma_x[d] = std::max(sigma_x[d], std::abs(f[d]));
          if (!inst.stage.is_zero)
            sigma_z = std::max(sigma_z, std::abs(inst.stage.value(t, x, a)));
        }
      }
    }
  }
  vf.scheme.sigma_x = sigma_x;
  vf.scheme.sigma_z = sigma_z;
  vf.scheme.cfl = options.cfl;

  // Pre-tabulated node coordinates.
  std::vector<std::vector<double>> xcoord(n);
  for (int d = 0; d < n; ++d) {
    xcoord[d].resize(x_axes[d].count);
    for (int i = 0; i < x_axes[d].count; ++i) xcoord[d][i] = x_axes[d].at(i);
  }
  std::vector<double> zcoord(z_axis.count);
  for (int i = 0; i < z_axis.count; ++i) zcoord[i] = z_axis.at(i);

  // Terminal slice: V(T, x, z) = max{c(T,x), g(T,x) - z}, exact at nodes.
  std::vector<double> cur(shape.total), nxt(shape.total);
  {
    std::vector<int> xi(n, 0);
    VectorXd x(n);
    int flat = 0;
    while (true) {
      for (int d = 0; d < n; ++d) x[d] = xcoord[d][xi[d]];
      double cT = inst.constraint.eval(inst.horizon, x);
      double gT = inst.terminal.eval(inst.horizon, x);
      for (int zi = 0; zi < shape.nz; ++zi)
        cur[flat * shape.nz + zi] = std::max(cT, gT - zcoord[zi]);
      int d = n - 1;
      for (; d >= 0; --d) {
        if (++xi[d] < shape.nx[d]) break;
        xi[d] = 0;
      }
      ++flat;
      if (d < 0) break;
    }
  }
  std::copy(cur.begin(), cur.end(),
            vf.values.begin() + static_cast<size_t>(slices - 1) * shape.total);

  // Hamiltonian dispatch.
  VectorXd pbuf(n);
  auto ham = [&](double t, const VectorXd& x, double z, const VectorXd& p, double q) {
    switch (kind) {
      case HJKind::V1:
      case HJKind::V2: return eval_hbar(inst, t, x, z, p, q).value;
      case HJKind::V1TI: return std::min(0.0, eval_hbar(inst, t, x, z, p, q).value);
      case HJKind::V2TI: return std::max(0.0, eval_hbar(inst, t, x, z, p, q).value);
      case HJKind::W1: return eval_hbar_relaxed(inst, t, x, z, p, q);
      case HJKind::W2TI: return eval_hbar_relaxed_ti(inst, x, z, p, q);
    }
    return 0.0;
  };

  // CFL-limited substep.
  double inv_sum = 0.0;
  for (int d = 0; d < n; ++d) inv_sum += sigma_x[d] / x_axes[d].step();
  if (sigma_z > 0.0) inv_sum += sigma_z / z_axis.step();
  const double dt_max = (inv_sum > 0.0) ? options.cfl / inv_sum : inst.horizon;

  int total_substeps = 0;
  std::vector<int> xi(n, 0);
  VectorXd x(n);
  for (int sl = slices - 1; sl >= 1; --sl) {
    double t_hi = vf.t_slices[sl], t_lo = vf.t_slices[sl - 1];
    int substeps = std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / dt_max)));
    double dt = (t_hi - t_lo) / substeps;
    for (int stp = 0; stp < substeps; ++stp) {
      double t_cur = t_hi - stp * dt;
      double t_new = t_cur - dt;
      ++total_substeps;
      std::fill(xi.begin(), xi.end(), 0);
      int flat = 0;
      while (true) {
        for (int d = 0; d < n; ++d) x[d] = xcoord[d][xi[d]];
        const int row = flat * shape.nz;
        double c_new = inst.constraint.eval(t_new, x);
        double g_new = inst.terminal.eval(t_new, x);
        for (int zi = 0; zi < shape.nz; ++zi) {
          const int idx = row + zi;
          // one-sided differences, replicated at the edges
          double diss = 0.0;
          for (int d = 0; d < n; ++d) {
            const int stride = shape.x_stride[d];
            const double h = x_axes[d].step();
            double vm = (xi[d] > 0) ? cur[idx - stride] : cur[idx];
            double vp = (xi[d] < shape.nx[d] - 1) ? cur[idx + stride] : cur[idx];
            double pminus = (xi[d] > 0) ? (cur[idx] - vm) / h : (vp - cur[idx]) / h;
            double pplus = (xi[d] < shape.nx[d] - 1) ? (vp - cur[idx]) / h : pminus;
            if (xi[d] == 0) pminus = pplus;
            pbuf[d] = 0.5 * (pminus + pplus);
            diss += 0.5 * sigma_x[d] * (pplus - pminus);
          }
          double qminus, qplus;
          {
            const double h = z_axis.step();
            double vm = (zi > 0) ? cur[idx - 1] : cur[idx];
            double vp = (zi < shape.nz - 1) ? cur[idx + 1] : cur[idx];
            qminus = (zi > 0) ? (cur[idx] - vm) / h : (vp - cur[idx]) / h;
            qplus = (zi < shape.nz - 1) ? (vp - cur[idx]) / h : qminus;
            if (zi == 0) qminus = qplus;
          }
          double q = 0.5 * (qminus + qplus);
          diss += 0.5 * sigma_z * (qplus - qminus);
          double advected = cur[idx] - dt * (ham(t_cur, x, zcoord[zi], pbuf, q) - diss);
          double out;
          switch (kind) {
            case HJKind::V1:
            case HJKind::W1:
              out = std::max({c_new, g_new - zcoord[zi], advected});
              break;
            case HJKind::V2:
              out = std::max(c_new, std::min(g_new - zcoord[zi], advected));
              break;
            default:  // time-invariant kinds carry only the constraint obstacle
              out = std::max(c_new, advected);
              break;
          }
          nxt[idx] = out;
        }
        int d = n - 1;
        for (; d >= 0; --d) {
          if (++xi[d] < shape.nx[d]) break;
          xi[d] = 0;
        }
        ++flat;
        if (d < 0) break;
      }
      cur.swap(nxt);
    }
    std::copy(cur.begin(), cur.end(),
              vf.values.begin() + static_cast<size_t>(sl - 1) * shape.total);
  }
  vf.scheme.total_substeps = total_substeps;
  return vf;
}

double extract_theta(const GridValueFunction& vf, double t, const VectorXd& x) {
  int sl = vf.slice_index(t);
  std::vector<double> prof;
  if (sl >= 0) {
    prof = vf.z_profile(sl, x);
  } else {
    // linear interpolation between the bracketing stored slices
    auto it = std::upper_bound(vf.t_slices.begin(), vf.t_slices.end(), t);
    if (it == vf.t_slices.begin() || it == vf.t_slices.end())
      throw std::out_of_range("extract_theta: t outside the stored slices");
    int hi = static_cast<int>(it - vf.t_slices.begin());
    double w = (t - vf.t_slices[hi - 1]) / (vf.t_slices[hi] - vf.t_slices[hi - 1]);
    auto lo_prof = vf.z_profile(hi - 1, x);
    auto hi_prof = vf.z_profile(hi, x);
    prof.resize(lo_prof.size());
    for (size_t i = 0; i < prof.size(); ++i)
      prof[i] = (1.0 - w) * lo_prof[i] + w * hi_prof[i];
  }
  for (int zi = 0; zi < vf.z_axis.count; ++zi) {
    if (prof[zi] <= 0.0) {
      if (zi == 0) return vf.z_axis.at(0);
      double v0 = prof[zi - 1], v1 = prof[zi];
      double w = v0 / (v0 - v1);  // linear crossing between the bracketing nodes
      return vf.z_axis.at(zi - 1) + w * vf.z_axis.step();
    }
  }
  return kInf;  // z range exhausted
}

ZRegularityReport check_z_regularity(const GridValueFunction& vf) {
  ZRegularityReport rep;
  const int nz = vf.z_axis.count;
  const double dz = vf.z_axis.step();
  const int slice = vf.slice_size();
  const int cols = slice / nz;
  for (size_t sl = 0; sl < vf.t_slices.size(); ++sl) {
    const double* base = vf.values.data() + sl * slice;
    for (int c = 0; c < cols; ++c) {
      const double* v = base + static_cast<size_t>(c) * nz;
      for (int zi = 0; zi + 1 < nz; ++zi) {
        double mono = v[zi + 1] - v[zi];
        double lip = v[zi] - dz - v[zi + 1];
        double mid = (zi + 2 < nz) ? 2.0 * v[zi + 1] - v[zi] - v[zi + 2] : -kInf;
        double worst = std::max({mono, lip, mid});
        if (worst > std::max({rep.max_monotone_defect, rep.max_slope_defect,
                              rep.max_midpoint_defect})) {
          rep.worst_node = {static_cast<int>(sl), c, zi};
        }
        rep.max_monotone_defect = std::max(rep.max_monotone_defect, mono);
        rep.max_slope_defect = std::max(rep.max_slope_defect, lip);
        if (mid > -kInf) rep.max_midpoint_defect = std::max(rep.max_midpoint_defect, mid);
      }
    }
  }
  return rep;
}

}  // namespace laxoc
