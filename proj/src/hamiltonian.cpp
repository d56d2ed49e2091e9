#include "laxoc/hamiltonian.hpp"

#include "laxoc/lp.hpp"

#include <cmath>

namespace laxoc {

namespace {

// Maximize phi over [lo, hi] by a dense scan plus golden-section polish in
// the winning cell. Resolution is the instance's documented sample grid.
std::pair<double, double> maximize_1d(const std::function<double(double)>& phi,
                                      double lo, double hi, int grid) {
  grid = std::max(grid, 3);
  double best = -kInf, arg = lo;
  double h = (hi - lo) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    double a = lo + i * h;
    double v = phi(a);
    if (v > best) {
      best = v;
      arg = a;
    }
  }
  double a = std::max(lo, arg - h), b = std::min(hi, arg + h);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 120; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = phi(d);
    }
  }
  double mid = 0.5 * (a + b), fm = phi(mid);
  if (fm > best) {
    best = fm;
    arg = mid;
  }
  return {best, arg};
}

HbarResult hbar_by_sampling(const ProblemInstance& inst, double s, const VectorXd& x,
                            const VectorXd& p, double q) {
  int per_axis = inst.sample_resolution;
  if (inst.controls.dim() >= 2) per_axis = std::min(per_axis, 61);
  if (inst.controls.dim() >= 3) per_axis = std::min(per_axis, 15);
  auto samples = inst.controls.sample_grid(per_axis);
  HbarResult best;
  best.value = -kInf;
  for (const auto& a : samples) {
    double v = -p.dot(inst.dynamics.eval(s, x, a));
    if (!inst.stage.is_zero && q != 0.0) v += q * inst.stage.value(s, x, a);
    if (!std::isfinite(v)) throw std::runtime_error("eval_hbar: non-finite evaluation");
    if (v > best.value) {
      best.value = v;
      best.maximizer = a;
    }
  }
  return best;
}

}  // namespace

HbarResult eval_hbar(const ProblemInstance& inst, double s, const VectorXd& x, double /*z*/,
                     const VectorXd& p, double q) {
  if (inst.hamiltonian_hook) return inst.hamiltonian_hook(s, x, p, q);

  const auto& dyn = inst.dynamics;
  const bool linear_objective = inst.stage.is_zero || q == 0.0;

  if (linear_objective && (dyn.affine_in_control || dyn.control_only) &&
      (dyn.control_matrix || dyn.control_part)) {
    // -p.f = -p.(Mx + Na + C): linear in a, so a closed-form support.
    VectorXd base = VectorXd::Zero(x.size());
    if (dyn.affine_in_state && dyn.state_matrix) base += dyn.state_matrix(s) * x;
    if (dyn.drift) base += dyn.drift(s);
    VectorXd c;
    if (dyn.control_matrix) {
      c = -dyn.control_matrix(s).transpose() * p;
    } else {
      c = -p;  // N = I convention when only control_part is declared
    }
    auto [v, a] = inst.controls.support(c);
    HbarResult out;
    out.maximizer = a;
    out.value = -p.dot(dyn.eval(s, x, a));
    if (!inst.stage.is_zero && q != 0.0) out.value += q * inst.stage.value(s, x, a);
    (void)v;
    return out;
  }

  if (!linear_objective && inst.controls.kind == ControlSet::Kind::Box &&
      (dyn.affine_in_control || dyn.control_only) && inst.stage.separable &&
      !inst.stage.ctrl_coords.empty()) {
    // Coordinate-separable objective over a box: per-axis 1D maximization.
    VectorXd base = VectorXd::Zero(x.size());
    if (dyn.affine_in_state && dyn.state_matrix) base += dyn.state_matrix(s) * x;
    if (dyn.drift) base += dyn.drift(s);
    MatrixXd N = dyn.control_matrix ? dyn.control_matrix(s)
                                    : MatrixXd::Identity(x.size(), inst.controls.dim());
    VectorXd c = -N.transpose() * p;
    HbarResult out;
    out.value = -p.dot(base);
    if (inst.stage.state_part && !inst.stage.state_part_zero)
      out.value += q * inst.stage.state_part(s, x);
    out.maximizer.resize(inst.controls.dim());
    for (int i = 0; i < inst.controls.dim(); ++i) {
      auto phi = [&](double ai) { return c[i] * ai + q * inst.stage.ctrl_coords[i](ai); };
      auto [v, a] = maximize_1d(phi, inst.controls.lo[i], inst.controls.hi[i],
                                inst.sample_resolution);
      out.value += v;
      out.maximizer[i] = a;
    }
    return out;
  }

  return hbar_by_sampling(inst, s, x, p, q);
}

double eval_h(const ProblemInstance& inst, double s, const VectorXd& x, const VectorXd& p) {
  return eval_hbar(inst, s, x, 0.0, p, -1.0).value;
}

std::vector<ImageAtom> image_atoms(const ProblemInstance& inst, double s,
                                   const VectorXd& x, bool include_zero) {
  std::vector<ImageAtom> atoms;
  if (inst.image) {
    ControlImage img = inst.image(s, x, include_zero);
    if (!img.atoms.empty()) atoms = img.atoms;
  }
  if (atoms.empty()) {
    int per_axis = inst.sample_resolution;
    if (inst.controls.dim() >= 2) per_axis = std::min(per_axis, 41);
    if (inst.controls.dim() >= 3) per_axis = std::min(per_axis, 9);
    for (const auto& a : inst.controls.sample_grid(per_axis)) {
      ImageAtom at;
      at.control = a;
      at.b = -inst.dynamics.eval(s, x, a);
      at.stage_cost = inst.stage.value(s, x, a);
      atoms.push_back(std::move(at));
    }
  }
  return atoms;
}

namespace {

// Sampled-envelope conjugate: the lower convex envelope of the witness costs
// over the atom image points, evaluated at b. include_zero adds the freezing
// atom (b = 0, cost 0) and relaxes the weight sum to <= 1.
double conjugate_from_atoms(const std::vector<ImageAtom>& atoms, const VectorXd& b,
                            bool include_zero) {
  const int n = static_cast<int>(b.size());
  if (n == 1) {
    std::vector<double> xs, vs;
    xs.reserve(atoms.size() + 1);
    for (const auto& at : atoms) {
      xs.push_back(at.b[0]);
      vs.push_back(at.stage_cost);
    }
    if (include_zero) {
      xs.push_back(0.0);
      vs.push_back(0.0);
    }
    LowerEnvelope1D env(xs, vs);
    return env.value(b[0]);
  }
  const int m = static_cast<int>(atoms.size()) + (include_zero ? 1 : 0);
  MatrixXd A(n + 1, m);
  VectorXd cost(m), rhs(n + 1);
  for (int j = 0; j < static_cast<int>(atoms.size()); ++j) {
    A.block(0, j, n, 1) = atoms[j].b;
    A(n, j) = 1.0;
    cost[j] = atoms[j].stage_cost;
  }
  if (include_zero) {
    A.col(m - 1).setZero();
    A(n, m - 1) = 1.0;
    cost[m - 1] = 0.0;
  }
  rhs.head(n) = b;
  rhs[n] = 1.0;
  LpResult lp = solve_lp(A, rhs, cost);
  return lp.feasible ? lp.objective : kInf;
}

}  // namespace

double eval_h_star(const ProblemInstance& inst, double s, const VectorXd& x,
                   const VectorXd& b) {
  if (inst.image) {
    ControlImage img = inst.image(s, x, false);
    if (!img.contains(b, 1e-9)) return kInf;
    if (inst.conjugate_hook) return inst.conjugate_hook(s, x, b);
    if (inst.stage.is_zero) return 0.0;
    return conjugate_from_atoms(image_atoms(inst, s, x, false), b, false);
  }
  if (inst.conjugate_hook) return inst.conjugate_hook(s, x, b);
  return conjugate_from_atoms(image_atoms(inst, s, x, false), b, false);
}

double eval_h2ti(const ProblemInstance& inst, const VectorXd& x, const VectorXd& p) {
  return std::max(0.0, eval_h(inst, 0.0, x, p));
}

double eval_h2ti_star(const ProblemInstance& inst, const VectorXd& x, const VectorXd& b) {
  if (inst.image) {
    ControlImage img = inst.image(0.0, x, true);
    if (!img.contains(b, 1e-9)) return kInf;
    if (inst.stage.is_zero) return 0.0;
  }
  return conjugate_from_atoms(image_atoms(inst, 0.0, x, true), b, true);
}

namespace {

double relaxed_max(const ProblemInstance& inst, double s, const VectorXd& x,
                   const VectorXd& p, double q, bool include_zero) {
  // L = 0 collapses the conjugate to zero on its domain: the max is the
  // support function of the image.
  if (inst.stage.is_zero && !inst.conjugate_hook) {
    ControlImage img = inst.image(s, x, include_zero);
    return img.support(p).first;
  }

  auto atoms = image_atoms(inst, s, x, include_zero);
  if (include_zero) {
    ImageAtom zero;
    zero.b = VectorXd::Zero(x.size());
    zero.control = VectorXd::Zero(inst.control_dim);
    zero.stage_cost = 0.0;
    atoms.push_back(zero);
  }
  if (q <= 0.0) {
    // max over the hull of p.b + q H*(b) equals the max over raw atoms of
    // p.b_i + q L_i when H* is the envelope of the atom costs.
    double best = -kInf;
    for (const auto& at : atoms) best = std::max(best, p.dot(at.b) + q * at.stage_cost);
    return best;
  }
  // q > 0: p.b + q H*(b) is convex in b, so the max over the hull is attained
  // at atom points with the envelope value there.
  if (x.size() == 1) {
    std::vector<double> xs, vs;
    for (const auto& at : atoms) {
      xs.push_back(at.b[0]);
      vs.push_back(at.stage_cost);
    }
    LowerEnvelope1D env(xs, vs);
    double best = -kInf;
    for (const auto& at : atoms)
      best = std::max(best, p.dot(at.b) + q * env.value(at.b[0]));
    return best;
  }
  double best = -kInf;
  for (const auto& at : atoms) {
    double hs = inst.conjugate_hook ? inst.conjugate_hook(s, x, at.b)
                                    : conjugate_from_atoms(atoms, at.b, include_zero);
    best = std::max(best, p.dot(at.b) + q * hs);
  }
  return best;
}

}  // namespace

double eval_hbar_relaxed(const ProblemInstance& inst, double s, const VectorXd& x,
                         double /*z*/, const VectorXd& p, double q) {
  if (inst.conjugate_hook && x.size() == 1 && inst.image) {
    // Smooth scalar conjugate: concave objective for q <= 0 (golden search),
    // extreme points for q > 0.
    ControlImage img = inst.image(s, x, false);
    double hi = img.support((VectorXd(1) << 1.0).finished()).first;
    double lo = -img.support((VectorXd(1) << -1.0).finished()).first;
    auto phi = [&](double b) {
      return p[0] * b + q * inst.conjugate_hook(s, x, (VectorXd(1) << b).finished());
    };
    if (q > 0.0) return std::max(phi(lo), phi(hi));
    return maximize_1d(phi, lo, hi, 64).first;
  }
  if (inst.conjugate_hook) {
    auto atoms = image_atoms(inst, s, x, false);
    double best = -kInf;
    for (const auto& at : atoms)
      best = std::max(best, p.dot(at.b) + q * inst.conjugate_hook(s, x, at.b));
    return best;
  }
  return relaxed_max(inst, s, x, p, q, false);
}

double eval_hbar_relaxed_ti(const ProblemInstance& inst, const VectorXd& x, double /*z*/,
                            const VectorXd& p, double q) {
  if (inst.stage.is_zero) {
    ControlImage img = inst.image(0.0, x, true);
    return img.support(p).first;  // q H2TI* vanishes on the domain
  }
  return relaxed_max(inst, 0.0, x, p, q, true);
}

std::pair<bool, double> domain_contains(const ControlImage& image, const VectorXd& b,
                                        double tol) {
  double m = image.margin(b);
  return {m <= tol, m};
}

}  // namespace laxoc
