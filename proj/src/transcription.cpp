#include "laxoc/transcription.hpp"

#include "laxoc/lp.hpp"

#include <cmath>
#include <sstream>

namespace laxoc {

// ------------------------------------------------------------------ audit

namespace {

const char* kRowStage = "stage cost";
const char* kRowTerminal = "terminal cost";
const char* kRowDynamics = "dynamics";
const char* kRowConstraint = "state constraint";

ColumnVerdict verdict(std::initializer_list<std::pair<bool, std::string>> rows) {
  for (const auto& [ok, label] : rows) {
    if (!ok) return {false, label};
  }
  return {true, ""};
}

}  // namespace

ConvexityReport audit_convexity(const ProblemInstance& inst) {
  const auto& L = inst.stage;
  const auto& g = inst.terminal;
  const auto& c = inst.constraint;
  const auto& f = inst.dynamics;

  const bool L_sep_convex = L.is_zero || (L.separable && L.state_part_convex && L.ctrl_part_convex) ||
                            L.convex_in_xa;
  const bool L_statepart_convex = L.is_zero || (L.separable && L.state_part_convex);
  const bool L_ctrl_only = L.is_zero || (L.separable && L.state_part_zero);
  const bool g_convex = g.is_zero || g.convex_in_x;
  const bool g_zero = g.is_zero;
  const bool g_ti_convex = g_convex && !g.time_dependent;
  const bool f_affine_xa = (f.affine_in_state || f.control_only) && f.affine_in_control;
  const bool f_state_affine = f.affine_in_state || f.control_only;
  const bool f_ctrl_only = f.control_only;
  const bool c_convex = c.convex_in_x;
  const bool c_time_only = c.state_independent;

  ConvexityReport r;
  r.theta1 = verdict({{L_sep_convex, std::string(kRowStage) + ": L=L^x+L^a with L^x, L^a convex"},
                      {g_convex, std::string(kRowTerminal) + ": g convex in x"},
                      {f_affine_xa, std::string(kRowDynamics) + ": f=M(s)x+N(s)a+C(s)"},
                      {c_convex, std::string(kRowConstraint) + ": c convex in x"}});
  r.phi1 = verdict({{L_statepart_convex, std::string(kRowStage) + ": L=L^x+L^a with L^x convex"},
                    {g_convex, std::string(kRowTerminal) + ": g convex in x"},
                    {f_state_affine, std::string(kRowDynamics) + ": f=M(s)x+f^a(s,a)"},
                    {c_convex, std::string(kRowConstraint) + ": c convex in x"}});
  r.theta2 = verdict({{L.is_zero, "L=0"},
                      {g_zero, "g=0"},
                      {f_affine_xa, std::string(kRowDynamics) + ": f=M(s)x+N(s)a+C(s)"},
                      {c_time_only, std::string(kRowConstraint) + ": c=c(s)"}});
  r.phi2 = verdict({{L.is_zero, "L=0"},
                    {g_zero, "g=0"},
                    {f_state_affine, std::string(kRowDynamics) + ": f=M(s)x+f^a(s,a)"},
                    {c_time_only, std::string(kRowConstraint) + ": c=c(s)"}});
  r.phi2ti = verdict({{L_ctrl_only, "L^x=0 (L=L^a)"},
                      {g_ti_convex, std::string(kRowTerminal) + ": g=g(x) convex in x"},
                      {f_ctrl_only, std::string(kRowDynamics) + ": f=f^a(a)"},
                      {c_convex, std::string(kRowConstraint) + ": c convex in x"}});
  return r;
}

// --------------------------------------------------------- ConvexProgram

int ConvexProgram::reduced_dim() const {
  int d = 0;
  for (const auto& s : steps) d += s.u_dim;
  return d;
}

VectorXd ConvexProgram::full_control(int k, const VectorXd& u_k, const VectorXd& x_k) const {
  const Step& st = steps[k];
  if (!lax()) return u_k;
  VectorXd b(inst->state_dim);
  VectorXd fixed = st.fixed_idx.empty() ? VectorXd() : VectorXd(st.fixed_P * x_k + st.fixed_r);
  for (size_t i = 0; i < st.fixed_idx.size(); ++i) b[st.fixed_idx[i]] = fixed[i];
  for (size_t i = 0; i < st.free_idx.size(); ++i) b[st.free_idx[i]] = u_k[i];
  return b;
}

std::vector<VectorXd> ConvexProgram::rollout(const VectorXd& u) const {
  std::vector<VectorXd> xs(num_steps() + 1);
  xs[0] = x0;
  int off = 0;
  for (int k = 0; k < num_steps(); ++k) {
    const Step& st = steps[k];
    VectorXd uk = u.segment(off, st.u_dim);
    off += st.u_dim;
    VectorXd ctrl = full_control(k, uk, xs[k]);
    if (lax())
      xs[k + 1] = xs[k] - st.dt * ctrl;
    else
      xs[k + 1] = xs[k] + st.dt * inst->dynamics.eval(st.t, xs[k], ctrl);
  }
  return xs;
}

double ConvexProgram::stage_value(int k, const VectorXd& x_k, const VectorXd& ctrl) const {
  if (!lax()) return inst->stage.value(steps[k].t, x_k, ctrl);
  if (inst->stage.is_zero) return 0.0;
  if (inst->conjugate_hook) return inst->conjugate_hook(steps[k].t, x_k, ctrl);
  if (kind == ProgramKind::LaxPhi2TI)
    return eval_h2ti_star(*inst, x_k, ctrl);
  return eval_h_star(*inst, steps[k].t, x_k, ctrl);
}

void ConvexProgram::stage_grad(int k, const VectorXd& x_k, const VectorXd& ctrl,
                               VectorXd* d_ctrl, VectorXd* d_x) const {
  d_ctrl->setZero(ctrl.size());
  d_x->setZero(x_k.size());
  if (inst->stage.is_zero && lax()) return;
  if (!lax()) {
    const double t = steps[k].t;
    if (inst->stage.is_zero) return;
    if (inst->stage.grad_a) {
      *d_ctrl = inst->stage.grad_a(t, x_k, ctrl);
    } else {
      const double h = 1e-6;
      for (int i = 0; i < ctrl.size(); ++i) {
        VectorXd cp = ctrl, cm = ctrl;
        cp[i] += h;
        cm[i] -= h;
        (*d_ctrl)[i] =
            (inst->stage.value(t, x_k, cp) - inst->stage.value(t, x_k, cm)) / (2 * h);
      }
    }
    if (!inst->stage.separable || !inst->stage.state_part_zero) {
      const double h = 1e-6;
      for (int i = 0; i < x_k.size(); ++i) {
        VectorXd xp = x_k, xm = x_k;
        xp[i] += h;
        xm[i] -= h;
        (*d_x)[i] =
            (inst->stage.value(t, xp, ctrl) - inst->stage.value(t, xm, ctrl)) / (2 * h);
      }
    }
    return;
  }
  if (inst->conjugate_hook) {
    if (inst->conjugate_grad_hook) {
      *d_ctrl = inst->conjugate_grad_hook(steps[k].t, x_k, ctrl);
    } else {
      const double h = 1e-6;
      for (int i = 0; i < ctrl.size(); ++i) {
        VectorXd cp = ctrl, cm = ctrl;
        cp[i] += h;
        cm[i] -= h;
        (*d_ctrl)[i] = (inst->conjugate_hook(steps[k].t, x_k, cp) -
                        inst->conjugate_hook(steps[k].t, x_k, cm)) /
                       (2 * h);
      }
    }
    return;
  }
  // Sampled-envelope conjugate: exact piecewise-linear slope in 1D, finite
  // differences otherwise (reduced-accuracy mode).
  const bool zero = (kind == ProgramKind::LaxPhi2TI);
  if (ctrl.size() == 1) {
    auto atoms = image_atoms(*inst, steps[k].t, x_k, zero);
    std::vector<double> xs, vs;
    for (const auto& at : atoms) {
      xs.push_back(at.b[0]);
      vs.push_back(at.stage_cost);
    }
    if (zero) {
      xs.push_back(0.0);
      vs.push_back(0.0);
    }
    LowerEnvelope1D env(xs, vs);
    (*d_ctrl)[0] = env.slope(ctrl[0]);
    return;
  }
  const double h = 1e-6;
  for (int i = 0; i < ctrl.size(); ++i) {
    VectorXd cp = ctrl, cm = ctrl;
    cp[i] += h;
    cm[i] -= h;
    double vp = stage_value(k, x_k, cp), vm = stage_value(k, x_k, cm);
    if (!std::isfinite(vp)) vp = stage_value(k, x_k, ctrl);
    if (!std::isfinite(vm)) vm = stage_value(k, x_k, ctrl);
    (*d_ctrl)[i] = (vp - vm) / (2 * h);
  }
}

double ConvexProgram::objective_exact(const VectorXd& u) const {
  auto xs = rollout(u);
  const int S = num_steps();
  double cum = 0.0;
  int off = 0;
  std::vector<double> costs(S + 1);
  costs[0] = inst->terminal.eval(grid.nodes[0], xs[0]);
  for (int k = 0; k < S; ++k) {
    VectorXd uk = u.segment(off, steps[k].u_dim);
    off += steps[k].u_dim;
    cum += stage_value(k, xs[k], full_control(k, uk, xs[k])) * steps[k].dt;
    double tk1 = grid.nodes[k + 1];
    costs[k + 1] = cum + inst->terminal.eval(tk1, xs[k + 1]);
  }
  if (is_minmax()) return *std::max_element(costs.begin(), costs.end());
  return costs[S];
}

double ConvexProgram::objective_smoothed(const VectorXd& u, double mu_max, double mu_norm,
                                         VectorXd* grad) const {
  const int S = num_steps();
  const int n = inst->state_dim;
  auto xs = rollout(u);

  // Forward pass: smoothed terminal values/gradients and stage accumulation.
  std::vector<double> gval(S + 1);
  std::vector<VectorXd> ggrad(S + 1);
  std::vector<double> costs(S + 1);
  std::vector<VectorXd> ctrls(S);
  std::vector<VectorXd> stage_dc(S), stage_dx(S);
  double cum = 0.0;
  int off = 0;
  for (int k = 0; k <= S; ++k) {
    VectorXd gg;
    gval[k] = inst->terminal.smooth_eval(grid.nodes[k], xs[k], mu_norm, grad ? &gg : nullptr);
    if (grad) ggrad[k] = gg;
    if (k < S) {
      VectorXd uk = u.segment(off, steps[k].u_dim);
      off += steps[k].u_dim;
      ctrls[k] = full_control(k, uk, xs[k]);
      costs[k] = cum + gval[k];
      cum += stage_value(k, xs[k], ctrls[k]) * steps[k].dt;
      if (grad) stage_grad(k, xs[k], ctrls[k], &stage_dc[k], &stage_dx[k]);
    } else {
      costs[k] = cum + gval[k];
    }
  }

  // Weights: softmax over per-index costs, or the terminal index alone.
  std::vector<double> w(S + 1, 0.0);
  double value;
  if (is_minmax()) {
    double cmax = *std::max_element(costs.begin(), costs.end());
    double Z = 0.0;
    for (int k = 0; k <= S; ++k) {
      w[k] = std::exp((costs[k] - cmax) / mu_max);
      Z += w[k];
    }
    for (auto& wi : w) wi /= Z;
    value = cmax + mu_max * std::log(Z / (S + 1));
    // log(Z/(S+1)) keeps the smoothed max below the true max plus mu ln(K+1)
  } else {
    w[S] = 1.0;
    value = costs[S];
  }
  if (!grad) return value;

  grad->setZero(u.size());
  // Backward adjoint pass.
  std::vector<double> W(S + 1, 0.0);  // weight mass strictly above index k
  double acc = 0.0;
  for (int k = S; k >= 0; --k) {
    W[k] = acc;
    acc += w[k];
  }
  VectorXd a = w[S] * ggrad[S];
  int tail = static_cast<int>(u.size());
  for (int k = S - 1; k >= 0; --k) {
    const Step& st = steps[k];
    tail -= st.u_dim;
    double scale = W[k] * st.dt;
    VectorXd g_ctrl = scale * stage_dc[k];
    if (lax())
      g_ctrl -= st.dt * a;
    else {
      // direct: x_{k+1} = x_k + dt f; chain through f's control Jacobian
      MatrixXd Ja(n, st.u_dim);
      const double h = 1e-6;
      if (inst->dynamics.affine_in_control && inst->dynamics.control_matrix) {
        Ja = inst->dynamics.control_matrix(st.t);
      } else if ((inst->dynamics.affine_in_control || inst->dynamics.control_only) &&
                 !inst->dynamics.control_matrix && !inst->dynamics.f) {
        Ja = MatrixXd::Identity(n, st.u_dim);
      } else {
        for (int i = 0; i < st.u_dim; ++i) {
          VectorXd cp = ctrls[k], cm = ctrls[k];
          cp[i] += h;
          cm[i] -= h;
          Ja.col(i) = (inst->dynamics.eval(st.t, xs[k], cp) -
                       inst->dynamics.eval(st.t, xs[k], cm)) /
                      (2 * h);
        }
      }
      g_ctrl += st.dt * (Ja.transpose() * a);
      // adjoint wrt x through f
      MatrixXd Jx;
      if (inst->dynamics.affine_in_state && inst->dynamics.state_matrix) {
        Jx = inst->dynamics.state_matrix(st.t);
      } else if (inst->dynamics.control_only) {
        Jx = MatrixXd::Zero(n, n);
      } else {
        Jx.resize(n, n);
        for (int i = 0; i < n; ++i) {
          VectorXd xp = xs[k], xm = xs[k];
          xp[i] += h;
          xm[i] -= h;
          Jx.col(i) = (inst->dynamics.eval(st.t, xp, ctrls[k]) -
                       inst->dynamics.eval(st.t, xm, ctrls[k])) /
                      (2 * h);
        }
      }
      grad->segment(tail, st.u_dim) = g_ctrl;
      a = a + st.dt * (Jx.transpose() * a) + scale * stage_dx[k] + w[k] * ggrad[k];
      continue;
    }
    // Lax chain: beta sensitivity splits into free rows (direct into grad)
    // and fixed rows (P x_k + r, chained into the adjoint).
    for (size_t i = 0; i < st.free_idx.size(); ++i)
      (*grad)[tail + static_cast<int>(i)] = g_ctrl[st.free_idx[i]];
    VectorXd a_next = a;
    if (!st.fixed_idx.empty()) {
      VectorXd gfix(st.fixed_idx.size());
      for (size_t i = 0; i < st.fixed_idx.size(); ++i) gfix[i] = g_ctrl[st.fixed_idx[i]];
      a_next += st.fixed_P.transpose() * gfix;
    }
    a_next += scale * stage_dx[k] + w[k] * ggrad[k];
    a = a_next;
  }
  return value;
}

void ConvexProgram::project_steps(VectorXd& u) const {
  int off = 0;
  for (const auto& st : steps) {
    if (st.u_dim > 0)
      u.segment(off, st.u_dim) = st.set->project(u.segment(off, st.u_dim));
    off += st.u_dim;
  }
}

int ConvexProgram::node_row_count() const {
  int per_node = static_cast<int>(inst->constraint.rows.size()) +
                 (inst->constraint.generic ? 1 : 0);
  return (num_steps() + 1) * per_node;
}

void ConvexProgram::ensure_jacobians() const {
  if (!jac_cache_.empty() || !lax()) return;
  const int n = inst->state_dim;
  const int U = reduced_dim();
  jac_cache_.resize(num_steps() + 1);
  jac_cache_[0] = MatrixXd::Zero(n, U);
  int off = 0;
  for (int k = 0; k < num_steps(); ++k) {
    const Step& st = steps[k];
    MatrixXd A = MatrixXd::Identity(n, n);
    if (!st.fixed_idx.empty()) {
      for (size_t i = 0; i < st.fixed_idx.size(); ++i)
        A.row(st.fixed_idx[i]) -= st.dt * st.fixed_P.row(i);
      // A = I - dt * Pfull, assembled row-wise
      MatrixXd Pfull = MatrixXd::Zero(n, n);
      for (size_t i = 0; i < st.fixed_idx.size(); ++i)
        Pfull.row(st.fixed_idx[i]) = st.fixed_P.row(i);
      A = MatrixXd::Identity(n, n) - st.dt * Pfull;
    }
    jac_cache_[k + 1] = A * jac_cache_[k];
    for (size_t i = 0; i < st.free_idx.size(); ++i)
      jac_cache_[k + 1].col(off + static_cast<int>(i)) -=
          st.dt * VectorXd::Unit(n, st.free_idx[i]);
    off += st.u_dim;
  }
}

double ConvexProgram::node_row_value(int row, const VectorXd& u) const {
  const int per_node = static_cast<int>(inst->constraint.rows.size()) +
                       (inst->constraint.generic ? 1 : 0);
  int k = row / per_node, j = row % per_node;
  auto xs = rollout(u);
  double t = grid.nodes[k];
  if (j < static_cast<int>(inst->constraint.rows.size())) {
    const auto& r = inst->constraint.rows[j];
    return r.a.dot(xs[k]) + r.offset_at(t);
  }
  return inst->constraint.generic(t, xs[k]);
}

void ConvexProgram::node_rows_all(const VectorXd& u, VectorXd* vals) const {
  vals->resize(node_row_count());
  auto xs = rollout(u);
  int idx = 0;
  for (int k = 0; k <= num_steps(); ++k) {
    double t = grid.nodes[k];
    for (int j = 0; j < static_cast<int>(inst->constraint.rows.size()); ++j) {
      const auto& r = inst->constraint.rows[j];
      (*vals)[idx++] = r.a.dot(xs[k]) + r.offset_at(t);
    }
    if (inst->constraint.generic) (*vals)[idx++] = inst->constraint.generic(t, xs[k]);
  }
}

VectorXd ConvexProgram::node_row_grad(int row, const VectorXd& u) const {
  const int per_node = static_cast<int>(inst->constraint.rows.size()) +
                       (inst->constraint.generic ? 1 : 0);
  int k = row / per_node, j = row % per_node;
  const int n = inst->state_dim;
  MatrixXd Jk;
  if (lax()) {
    ensure_jacobians();
    Jk = jac_cache_[k];
  } else {
    // sensitivity propagation with finite-difference Jacobians
    const int U = reduced_dim();
    Jk = MatrixXd::Zero(n, U);
    auto xs = rollout(u);
    MatrixXd J = MatrixXd::Zero(n, U);
    int off = 0;
    const double h = 1e-6;
    for (int kk = 0; kk < k; ++kk) {
      const Step& st = steps[kk];
      VectorXd uk = u.segment(off, st.u_dim);
      VectorXd ctrl = uk;
      MatrixXd Jx(n, n), Ja(n, st.u_dim);
      for (int i = 0; i < n; ++i) {
        VectorXd xp = xs[kk], xm = xs[kk];
        xp[i] += h;
        xm[i] -= h;
        Jx.col(i) = (inst->dynamics.eval(st.t, xp, ctrl) -
                     inst->dynamics.eval(st.t, xm, ctrl)) /
                    (2 * h);
      }
      for (int i = 0; i < st.u_dim; ++i) {
        VectorXd cp = ctrl, cm = ctrl;
        cp[i] += h;
        cm[i] -= h;
        Ja.col(i) = (inst->dynamics.eval(st.t, xs[kk], cp) -
                     inst->dynamics.eval(st.t, xs[kk], cm)) /
                    (2 * h);
      }
      J = J + st.dt * (Jx * J);
      J.block(0, off, n, st.u_dim) += st.dt * Ja;
      off += st.u_dim;
    }
    Jk = J;
  }
  VectorXd a_row;
  if (j < static_cast<int>(inst->constraint.rows.size())) {
    a_row = inst->constraint.rows[j].a;
  } else {
    auto xs = rollout(u);
    a_row = inst->constraint.generic_subgrad
                ? inst->constraint.generic_subgrad(grid.nodes[k], xs[k])
                : VectorXd::Zero(n);
  }
  return Jk.transpose() * a_row;
}

ProgramAssignment ConvexProgram::expand(const VectorXd& u) const {
  ProgramAssignment a;
  a.states = rollout(u);
  a.controls.resize(num_steps());
  int off = 0;
  for (int k = 0; k < num_steps(); ++k) {
    a.controls[k] = full_control(k, u.segment(off, steps[k].u_dim), a.states[k]);
    off += steps[k].u_dim;
  }
  auto costs = assignment_costs(a);
  if (is_minmax()) {
    a.eta = *std::max_element(costs.begin(), costs.end());
    a.objective = a.eta;
  } else {
    a.objective = costs.back();
  }
  return a;
}

VectorXd ConvexProgram::reduce(const ProgramAssignment& a) const {
  VectorXd u(reduced_dim());
  int off = 0;
  for (int k = 0; k < num_steps(); ++k) {
    if (lax()) {
      for (size_t i = 0; i < steps[k].free_idx.size(); ++i)
        u[off + static_cast<int>(i)] = a.controls[k][steps[k].free_idx[i]];
    } else {
      u.segment(off, steps[k].u_dim) = a.controls[k];
    }
    off += steps[k].u_dim;
  }
  return u;
}

std::vector<double> ConvexProgram::assignment_costs(const ProgramAssignment& a) const {
  const int S = num_steps();
  std::vector<double> costs(S + 1);
  double cum = 0.0;
  costs[0] = inst->terminal.eval(grid.nodes[0], a.states[0]);
  for (int k = 0; k < S; ++k) {
    cum += stage_value(k, a.states[k], a.controls[k]) * steps[k].dt;
    costs[k + 1] = cum + inst->terminal.eval(grid.nodes[k + 1], a.states[k + 1]);
  }
  return costs;
}

ResidualReport ConvexProgram::residuals(const ProgramAssignment& a, double flag_tol) const {
  ResidualReport r;
  const int S = num_steps();
  for (int k = 0; k < S; ++k) {
    VectorXd rhs = lax() ? VectorXd(-steps[k].dt * a.controls[k])
                         : VectorXd(steps[k].dt * inst->dynamics.eval(steps[k].t, a.states[k],
                                                                      a.controls[k]));
    double res = (a.states[k + 1] - a.states[k] - rhs).lpNorm<Eigen::Infinity>();
    r.dynamics = std::max(r.dynamics, res);
    if (res > flag_tol) r.flagged_dynamics_rows.push_back(k);
  }
  for (int k = 0; k < S; ++k) {
    double m;
    if (lax()) {
      ControlImage img =
          inst->image(steps[k].t, a.states[k], kind == ProgramKind::LaxPhi2TI);
      m = img.margin(a.controls[k]);
    } else {
      m = inst->controls.contains(a.controls[k], 0.0)
              ? 0.0
              : (a.controls[k] - inst->controls.project(a.controls[k])).norm();
    }
    r.control_margin = std::max(r.control_margin, m);
  }
  for (int k = 0; k <= S; ++k) {
    double c = inst->constraint.eval(grid.nodes[k], a.states[k]);
    r.state_constraint = std::max(r.state_constraint, c);
    if (c > flag_tol) r.flagged_constraint_nodes.push_back(k);
  }
  if (is_minmax() && std::isfinite(a.eta)) {
    auto costs = assignment_costs(a);
    for (double c : costs) r.epigraph = std::max(r.epigraph, c - a.eta);
  }
  if (std::isfinite(a.objective)) {
    auto costs = assignment_costs(a);
    double obj = is_minmax() ? *std::max_element(costs.begin(), costs.end()) : costs.back();
    r.objective_gap = std::abs(obj - a.objective);
  }
  return r;
}

// ---------------------------------------------------------------- builders

namespace {

TimeGrid truncate(const TimeGrid& grid, int k_prime) {
  TimeGrid g;
  g.nodes.assign(grid.nodes.begin(), grid.nodes.begin() + k_prime + 1);
  return g;
}

void require_conjugate_machinery(const ProblemInstance& inst, const char* which) {
  if (inst.stage.is_zero || inst.conjugate_hook) return;
  if (inst.dynamics.control_only) return;  // sampled-envelope route applies
  std::ostringstream os;
  os << which
     << ": nonzero stage cost needs a conjugate evaluator (closed-form hook) or "
        "control-only dynamics for the sampled envelope; instance '"
     << inst.name << "' provides neither";
  throw std::invalid_argument(os.str());
}

void make_lax_steps(ConvexProgram& prog, const ProblemInstance& inst, bool include_zero) {
  const int S = static_cast<int>(prog.grid.nodes.size()) - 1;
  prog.steps.resize(std::max(0, S));
  for (int k = 0; k < static_cast<int>(prog.steps.size()); ++k) {
    auto& st = prog.steps[k];
    st.t = prog.grid.nodes[k];
    st.dt = prog.grid.dt(k);
    ControlImage img = inst.image(st.t, inst.initial_state, include_zero);
    st.free_idx = img.free_idx;
    st.fixed_idx = img.fixed_idx;
    st.fixed_P = img.fixed_P;
    if (!img.fixed_idx.empty())
      st.fixed_r = img.fixed_vals - img.fixed_P * inst.initial_state;
    st.set = img.free_set;
    st.u_dim = static_cast<int>(img.free_idx.size());
  }
}

ConvexSetPtr control_set_as_convex(const ControlSet& A) {
  switch (A.kind) {
    case ControlSet::Kind::Box: return std::make_shared<BoxSet>(A.lo, A.hi);
    case ControlSet::Kind::Ball: return std::make_shared<BallSet>(A.center, A.radius);
    case ControlSet::Kind::Vertices: return std::make_shared<VertexHullSet>(A.points);
    default:
      throw std::invalid_argument("direct transcription needs a convex control set");
  }
}

}  // namespace

ConvexProgram build_phi1_program(const ProblemInstance& inst, const TimeGrid& grid) {
  if (inst.cls != ProblemClass::MinMax)
    throw std::invalid_argument("build_phi1_program: instance is not min-max");
  if (!inst.image)
    throw std::invalid_argument("build_phi1_program: instance has no control image");
  require_conjugate_machinery(inst, "build_phi1_program");
  ConvexProgram p;
  p.kind = ProgramKind::LaxPhi1;
  p.inst = std::make_shared<ProblemInstance>(inst);
  p.grid = grid;
  p.x0 = inst.initial_state;
  make_lax_steps(p, inst, false);
  auto rep = audit_convexity(inst);
  p.audited_convex = rep.phi1.convex;
  p.convexity_note = rep.phi1.convex ? "convex (phi1 conditions)" : rep.phi1.first_violation;
  return p;
}

ConvexProgram build_phi2ti_program(const ProblemInstance& inst, const TimeGrid& grid) {
  if (inst.cls != ProblemClass::MinMin)
    throw std::invalid_argument("build_phi2ti_program: instance is not min-min");
  if (!inst.time_invariant)
    throw std::invalid_argument("build_phi2ti_program: instance is not time-invariant");
  if (!inst.image)
    throw std::invalid_argument("build_phi2ti_program: instance has no control image");
  require_conjugate_machinery(inst, "build_phi2ti_program");
  ConvexProgram p;
  p.kind = ProgramKind::LaxPhi2TI;
  p.inst = std::make_shared<ProblemInstance>(inst);
  p.grid = grid;
  p.x0 = inst.initial_state;
  make_lax_steps(p, inst, true);
  auto rep = audit_convexity(inst);
  p.audited_convex = rep.phi2ti.convex;
  p.convexity_note = rep.phi2ti.convex ? "convex (phi2^TI conditions)" : rep.phi2ti.first_violation;
  return p;
}

ConvexProgram build_phi2_subprogram(const ProblemInstance& inst, const TimeGrid& grid,
                                    int k_prime) {
  if (inst.cls != ProblemClass::MinMin)
    throw std::invalid_argument("build_phi2_subprogram: instance is not min-min");
  if (k_prime < 0 || k_prime > grid.steps())
    throw std::invalid_argument("build_phi2_subprogram: terminal index out of range");
  if (!inst.image)
    throw std::invalid_argument("build_phi2_subprogram: instance has no control image");
  require_conjugate_machinery(inst, "build_phi2_subprogram");
  ConvexProgram p;
  p.kind = ProgramKind::LaxPhi2Sub;
  p.inst = std::make_shared<ProblemInstance>(inst);
  p.grid = truncate(grid, k_prime);
  p.x0 = inst.initial_state;
  make_lax_steps(p, inst, false);
  // convexity: per-subprogram conditions match the phi1 column without the
  // g = 0 row (the terminal index is fixed here)
  auto rep = audit_convexity(inst);
  p.audited_convex = rep.phi1.convex && inst.constraint.convex_in_x;
  p.convexity_note = p.audited_convex ? "convex (fixed terminal index)" : rep.phi1.first_violation;
  return p;
}

ConvexProgram build_phi1ti_program(const ProblemInstance&, const TimeGrid&) {
  throw std::invalid_argument(
      "build_phi1ti_program: no Lax transcription exists for the time-invariant "
      "min-max problem (the Hamiltonian min{0,H} is non-convex in the costate); "
      "use build_phi1_program, which covers time-invariant data as well");
}

ConvexProgram build_direct_program(const ProblemInstance& inst, const TimeGrid& grid,
                                   int k_prime) {
  ConvexProgram p;
  p.inst = std::make_shared<ProblemInstance>(inst);
  p.x0 = inst.initial_state;
  auto rep = audit_convexity(inst);
  if (inst.cls == ProblemClass::MinMax) {
    if (k_prime >= 0 && k_prime != grid.steps())
      throw std::invalid_argument("build_direct_program: min-max form has no terminal index");
    p.kind = ProgramKind::DirectMinMax;
    p.grid = grid;
    p.audited_convex = rep.theta1.convex;
    p.convexity_note = rep.theta1.convex ? "convex (theta1 conditions)" : rep.theta1.first_violation;
  } else {
    if (k_prime < 0)
      throw std::invalid_argument(
          "build_direct_program: min-min direct transcription needs an explicit terminal "
          "index (the joint minimization over k' is discrete)");
    p.kind = ProgramKind::DirectMinMinSub;
    p.grid = truncate(grid, k_prime);
    p.audited_convex = rep.theta1.convex;
    p.convexity_note = rep.theta1.convex ? "convex (fixed terminal index)" : rep.theta1.first_violation;
  }
  const int S = static_cast<int>(p.grid.nodes.size()) - 1;
  p.steps.resize(S);
  auto set = S > 0 ? control_set_as_convex(inst.controls) : nullptr;
  for (int k = 0; k < S; ++k) {
    auto& st = p.steps[k];
    st.t = p.grid.nodes[k];
    st.dt = p.grid.dt(k);
    st.set = set;
    st.u_dim = inst.controls.dim();
  }
  return p;
}

}  // namespace laxoc
