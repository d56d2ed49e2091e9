#include "laxoc/problem.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace laxoc {

VectorXd Dynamics::eval(double s, const VectorXd& x, const VectorXd& a) const {
  if (f) return f(s, x, a);
  VectorXd out = VectorXd::Zero(x.size());
  if (affine_in_state && state_matrix) out += state_matrix(s) * x;
  if (control_part) out += control_part(s, a);
  else if (affine_in_control) {
    if (control_matrix) out += control_matrix(s) * a;
    if (drift) out += drift(s);
  }
  return out;
}

double StageCost::value(double s, const VectorXd& x, const VectorXd& a) const {
  if (is_zero) return 0.0;
  if (eval) return eval(s, x, a);
  double v = 0.0;
  if (separable) {
    if (!state_part_zero && state_part) v += state_part(s, x);
    if (ctrl_part) v += ctrl_part(s, a);
    else
      for (size_t i = 0; i < ctrl_coords.size(); ++i) v += ctrl_coords[i](a[i]);
  }
  return v;
}

VectorXd NormTerm::offset_at(double s) const {
  if (offset) return offset(s);
  return VectorXd::Zero(A.rows());
}

double TerminalCost::eval(double s, const VectorXd& x) const {
  if (is_zero) return 0.0;
  double v = constant ? constant(s) : 0.0;
  for (const auto& t : norms) v += t.weight * (t.A * x + t.offset_at(s)).norm();
  if (quad.size() > 0) v += 0.5 * x.dot(quad * x);
  if (lin.size() > 0) v += lin.dot(x);
  return v;
}

VectorXd TerminalCost::subgrad(double s, const VectorXd& x) const {
  VectorXd g = VectorXd::Zero(x.size());
  if (is_zero) return g;
  for (const auto& t : norms) {
    VectorXd r = t.A * x + t.offset_at(s);
    double n = r.norm();
    if (n > 0.0) g += (t.weight / n) * (t.A.transpose() * r);
  }
  if (quad.size() > 0) g += quad * x;
  if (lin.size() > 0) g += lin;
  return g;
}

double TerminalCost::smooth_eval(double s, const VectorXd& x, double mu,
                                 VectorXd* grad) const {
  if (grad) grad->setZero(x.size());
  if (is_zero) return 0.0;
  double v = constant ? constant(s) : 0.0;
  for (const auto& t : norms) {
    VectorXd r = t.A * x + t.offset_at(s);
    double n = r.norm();
    if (n >= mu) {
      v += t.weight * (n - 0.5 * mu);
      if (grad) *grad += (t.weight / n) * (t.A.transpose() * r);
    } else {
      v += t.weight * (0.5 / mu) * n * n;
      if (grad) *grad += (t.weight / mu) * (t.A.transpose() * r);
    }
  }
  if (quad.size() > 0) {
    v += 0.5 * x.dot(quad * x);
    if (grad) *grad += quad * x;
  }
  if (lin.size() > 0) {
    v += lin.dot(x);
    if (grad) *grad += lin;
  }
  return v;
}

double StateConstraint::eval(double s, const VectorXd& x) const {
  double v = -kInf;
  for (const auto& r : rows) v = std::max(v, r.a.dot(x) + r.offset_at(s));
  if (generic) v = std::max(v, generic(s, x));
  if (v == -kInf) v = -1.0;  // unconstrained instances count as feasible
  return v;
}

// -------------------------------------------------------------- ControlSet

int ControlSet::dim() const {
  switch (kind) {
    case Kind::Box: return static_cast<int>(lo.size());
    case Kind::Ball: return static_cast<int>(center.size());
    default: return points.empty() ? 0 : static_cast<int>(points.front().size());
  }
}

bool ControlSet::contains(const VectorXd& a, double tol) const {
  switch (kind) {
    case Kind::Box:
      return (a - a.cwiseMax(lo).cwiseMin(hi)).lpNorm<Eigen::Infinity>() <= tol;
    case Kind::Ball:
      return (a - center).norm() <= radius + tol;
    case Kind::Vertices: {
      VertexHullSet h(points);
      return h.margin(a) <= tol;
    }
    case Kind::Samples: {
      for (const auto& p : points)
        if ((a - p).lpNorm<Eigen::Infinity>() <= tol) return true;
      return false;
    }
  }
  return false;
}

VectorXd ControlSet::project(const VectorXd& a) const {
  switch (kind) {
    case Kind::Box: return a.cwiseMax(lo).cwiseMin(hi);
    case Kind::Ball: {
      VectorXd d = a - center;
      double n = d.norm();
      return (n <= radius) ? a : VectorXd(center + (radius / n) * d);
    }
    case Kind::Vertices: {
      VertexHullSet h(points);
      return h.project(a);
    }
    case Kind::Samples: {
      double best = kInf;
      VectorXd arg = points.front();
      for (const auto& p : points) {
        double d = (a - p).squaredNorm();
        if (d < best) {
          best = d;
          arg = p;
        }
      }
      return arg;
    }
  }
  return a;
}

std::pair<double, VectorXd> ControlSet::support(const VectorXd& c) const {
  switch (kind) {
    case Kind::Box: {
      BoxSet b(lo, hi);
      return b.support(c);
    }
    case Kind::Ball: {
      BallSet b(center, radius);
      return b.support(c);
    }
    default: {
      double best = -kInf;
      VectorXd arg;
      for (const auto& p : points) {
        double v = c.dot(p);
        if (v > best) {
          best = v;
          arg = p;
        }
      }
      return {best, arg};
    }
  }
}

std::vector<VectorXd> ControlSet::sample_grid(int per_axis) const {
  std::vector<VectorXd> out;
  switch (kind) {
    case Kind::Box: {
      int d = dim();
      std::vector<int> idx(d, 0);
      while (true) {
        VectorXd a(d);
        for (int i = 0; i < d; ++i) {
          double w = (per_axis == 1) ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
          a[i] = lo[i] + w * (hi[i] - lo[i]);
        }
        out.push_back(a);
        int i = 0;
        for (; i < d; ++i) {
          if (++idx[i] < per_axis) break;
          idx[i] = 0;
        }
        if (i == d) break;
      }
      return out;
    }
    case Kind::Ball: {
      // Rectangular grid over the bounding box, kept if inside the ball.
      VectorXd blo = center.array() - radius, bhi = center.array() + radius;
      ControlSet box_set = box(blo, bhi);
      for (auto& a : box_set.sample_grid(per_axis))
        if ((a - center).norm() <= radius + 1e-12) out.push_back(a);
      return out;
    }
    default:
      return points;
  }
}

VectorXd ControlSet::some_point() const {
  switch (kind) {
    case Kind::Box: return 0.5 * (lo + hi);
    case Kind::Ball: return center;
    default: return points.front();
  }
}

ControlSet ControlSet::box(VectorXd lo, VectorXd hi) {
  ControlSet s;
  s.kind = Kind::Box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}
ControlSet ControlSet::ball(VectorXd center, double radius) {
  ControlSet s;
  s.kind = Kind::Ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}
ControlSet ControlSet::vertices(std::vector<VectorXd> pts) {
  ControlSet s;
  s.kind = Kind::Vertices;
  s.points = std::move(pts);
  return s;
}
ControlSet ControlSet::samples(std::vector<VectorXd> pts) {
  ControlSet s;
  s.kind = Kind::Samples;
  s.points = std::move(pts);
  return s;
}

bool ProblemInstance::looks_time_invariant(double tol) const {
  if (!time_invariant) return false;
  VectorXd x = initial_state.size() ? initial_state : VectorXd::Zero(state_dim);
  VectorXd a = controls.some_point();
  double s0 = 0.1 * horizon, s1 = 0.7 * horizon;
  if ((dynamics.eval(s0, x, a) - dynamics.eval(s1, x, a)).lpNorm<Eigen::Infinity>() > tol)
    return false;
  if (std::abs(stage.value(s0, x, a) - stage.value(s1, x, a)) > tol) return false;
  if (std::abs(terminal.eval(s0, x) - terminal.eval(s1, x)) > tol) return false;
  if (std::abs(constraint.eval(s0, x) - constraint.eval(s1, x)) > tol) return false;
  return true;
}

// --------------------------------------------------------------- dynamics

namespace {

VectorXd rk4_step(const ProblemInstance& inst, double s, const VectorXd& x,
                  const VectorXd& a, double h) {
  const auto& d = inst.dynamics;
  VectorXd k1 = d.eval(s, x, a);
  VectorXd k2 = d.eval(s + 0.5 * h, x + 0.5 * h * k1, a);
  VectorXd k3 = d.eval(s + 0.5 * h, x + 0.5 * h * k2, a);
  VectorXd k4 = d.eval(s + h, x + h * k3, a);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory integrate_dynamics(const ProblemInstance& inst, const PiecewiseControl& control,
                              const VectorXd& x0, int substeps) {
  if (substeps < 1) throw std::invalid_argument("integrate_dynamics: substeps >= 1");
  if (!control.valid()) throw std::invalid_argument("integrate_dynamics: bad control");
  Trajectory traj;
  traj.times.push_back(control.breaks.front());
  traj.states.push_back(x0);
  traj.controls.push_back(control.values.front());
  VectorXd x = x0;
  for (size_t seg = 0; seg + 1 < control.breaks.size(); ++seg) {
    double a0 = control.breaks[seg], a1 = control.breaks[seg + 1];
    const VectorXd& u = control.values[seg];
    double h = (a1 - a0) / substeps;
    for (int i = 0; i < substeps; ++i) {
      double s = a0 + i * h;
      x = rk4_step(inst, s, x, u, h);
      if (!x.allFinite()) {
        std::ostringstream os;
        os << "integrate_dynamics: non-finite state at s=" << s + h << " from x=["
           << traj.states.back().transpose() << "]";
        throw std::runtime_error(os.str());
      }
      traj.times.push_back(s + h);
      traj.states.push_back(x);
      traj.controls.push_back(u);
    }
  }
  return traj;
}

std::vector<double> evaluate_running_objective(const ProblemInstance& inst,
                                               const Trajectory& traj,
                                               const PiecewiseControl& control,
                                               const TimeGrid& grid) {
  const int K = grid.steps();
  std::vector<double> J(K + 1, 0.0);
  // Left-endpoint accumulation over the dense samples, sliced at grid nodes.
  double acc = 0.0;
  size_t i = 0;
  for (int kp = 0; kp <= K; ++kp) {
    double tk = grid.nodes[kp];
    while (i + 1 < traj.times.size() && traj.times[i + 1] <= tk + 1e-12) {
      if (!inst.stage.is_zero) {
        const VectorXd& u =
            traj.controls.empty() ? control.at(traj.times[i]) : traj.controls[i];
        acc += inst.stage.value(traj.times[i], traj.states[i], u) *
               (traj.times[i + 1] - traj.times[i]);
      }
      ++i;
    }
    int node = traj.index_of_time(tk);
    VectorXd xk = (node >= 0) ? traj.states[node] : traj.state_at(tk);
    J[kp] = acc + inst.terminal.eval(tk, xk);
  }
  return J;
}

ProblemValue evaluate_problem_value(const ProblemInstance& inst,
                                    const std::vector<double>& J, int feasible_upto) {
  ProblemValue out;
  const int K = static_cast<int>(J.size()) - 1;
  if (inst.cls == ProblemClass::MinMax) {
    if (feasible_upto < K) {
      out.value = kInf;
      out.feasible = false;
      out.k_star = -1;
      out.note = "state constraint violated on the horizon (feasible up to index " +
                 std::to_string(feasible_upto) + ")";
      return out;
    }
    out.value = -kInf;
    for (int k = 0; k <= K; ++k) {
      if (J[k] > out.value) {
        out.value = J[k];
        out.k_star = k;
      }
    }
  } else {
    if (feasible_upto < 0) {
      out.value = kInf;
      out.feasible = false;
      out.k_star = -1;
      out.note = "no feasible prefix";
      return out;
    }
    out.value = kInf;
    for (int k = 0; k <= std::min(K, feasible_upto); ++k) {
      if (J[k] < out.value) {
        out.value = J[k];
        out.k_star = k;
      }
    }
  }
  return out;
}

FeasibilityReport check_feasibility(const ProblemInstance& inst, const Trajectory& traj,
                                    const TimeGrid& grid, double tol) {
  FeasibilityReport rep;
  double prev_c = -kInf, prev_t = 0.0;
  std::optional<double> first_bad;
  for (int i = 0; i < traj.size(); ++i) {
    double c = inst.constraint.eval(traj.times[i], traj.states[i]);
    rep.max_violation = std::max(rep.max_violation, c);
    if (!first_bad && c > tol) {
      if (i > 0 && prev_c <= tol && c > prev_c) {
        double w = (tol - prev_c) / (c - prev_c);  // linear crossing estimate
        first_bad = prev_t + w * (traj.times[i] - prev_t);
      } else {
        first_bad = traj.times[i];
      }
    }
    prev_c = c;
    prev_t = traj.times[i];
  }
  rep.first_violation_time = first_bad;
  rep.feasible_upto = -1;
  for (int k = 0; k <= grid.steps(); ++k) {
    if (first_bad && grid.nodes[k] >= *first_bad - 1e-12) break;
    rep.feasible_upto = k;
  }
  if (!first_bad) rep.feasible_upto = grid.steps();
  return rep;
}

}  // namespace laxoc
