#include "laxoc/scenarios.hpp"

#include <cmath>
#include <random>

namespace laxoc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt3 = 1.7320508075688772;

double disturbance(double s) { return 0.5 * (1.0 + std::cos(kPi * s)); }

// Support of the acceleration image over [-1,1] x [-pi/6, pi/6]:
// max |pv cos a2 + pw sin a2| over the sector, with the maximizing control.
double sector_support(double pv, double pw, double* a_mag, double* a_ang) {
  double mag = std::hypot(pv, pw);
  if (mag == 0.0) {
    if (a_mag) *a_mag = 0.0;
    if (a_ang) *a_ang = 0.0;
    return 0.0;
  }
  if (std::abs(pw) <= std::abs(pv) / kSqrt3) {
    // the optimal direction lies inside the sector (or its reflection)
    if (a_mag || a_ang) {
      double psi = std::atan2(pw, pv);
      double ang = psi;
      if (std::abs(psi) > kPi / 6.0) ang = psi - std::copysign(kPi, psi);
      double h = pv * std::cos(ang) + pw * std::sin(ang);
      if (a_ang) *a_ang = ang;
      if (a_mag) *a_mag = (h >= 0.0) ? -1.0 : 1.0;
    }
    return mag;
  }
  double s2 = (pv >= 0.0) == (pw >= 0.0) ? 1.0 : -1.0;
  if (pv == 0.0) s2 = 1.0;
  double ang = s2 * kPi / 6.0;
  double h = pv * std::cos(ang) + pw * std::sin(ang);
  if (a_ang) *a_ang = ang;
  if (a_mag) *a_mag = (h >= 0.0) ? -1.0 : 1.0;
  return 0.5 * kSqrt3 * std::abs(pv) + 0.5 * std::abs(pw);
}

void merge_agent_schedules(const std::vector<std::vector<ControlAtom>>& per_agent,
                           int ctrl_per_agent, std::vector<ControlAtom>& out) {
  // Union of the per-agent weight boundaries; each merged segment stacks the
  // atom active there for every agent.
  std::vector<double> bounds = {0.0, 1.0};
  for (const auto& atoms : per_agent) {
    double acc = 0.0;
    for (const auto& a : atoms) {
      acc += a.weight;
      bounds.push_back(std::min(1.0, acc));
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               bounds.end());
  const int R = static_cast<int>(per_agent.size());
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    double w = bounds[i + 1] - bounds[i];
    if (w <= 1e-14) continue;
    double mid = 0.5 * (bounds[i] + bounds[i + 1]);
    ControlAtom atom;
    atom.weight = w;
    atom.control = VectorXd::Zero(static_cast<long>(R) * ctrl_per_agent);
    for (int r = 0; r < R; ++r) {
      double acc = 0.0;
      const VectorXd* pick = nullptr;
      for (const auto& a : per_agent[r]) {
        acc += a.weight;
        if (mid <= acc) {
          pick = &a.control;
          break;
        }
      }
      if (!pick) pick = &per_agent[r].back().control;
      atom.control.segment(static_cast<long>(r) * ctrl_per_agent, ctrl_per_agent) = *pick;
    }
    out.push_back(std::move(atom));
  }
}

double offset_x(int paper_index, int robots) {
  return 0.4 * paper_index * robots / (robots - 1.0);
}

}  // namespace

ProblemInstance gen_example_a(int robots, std::uint64_t seed) {
  if (robots < 1) throw std::invalid_argument("gen_example_a: robots >= 1");
  const int R = robots;
  const int n = 4 * R, m = 2 * R;
  ProblemInstance inst;
  inst.name = "example_a_R" + std::to_string(R);
  inst.cls = ProblemClass::MinMax;
  inst.time_invariant = false;
  inst.horizon = 2.0;
  inst.state_dim = n;
  inst.control_dim = m;

  // dynamics: position-velocity chains plus angle/magnitude acceleration
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int r = 0; r < R; ++r) {
    M(4 * r + 0, 4 * r + 1) = 1.0;
    M(4 * r + 2, 4 * r + 3) = 1.0;
  }
  inst.dynamics.affine_in_state = true;
  inst.dynamics.state_matrix = [M](double) { return M; };
  inst.dynamics.control_part = [R, n](double s, const VectorXd& a) {
    VectorXd out = VectorXd::Zero(n);
    for (int r = 0; r < R; ++r) {
      out[4 * r + 1] = a[2 * r] * std::cos(a[2 * r + 1]) + disturbance(s);
      out[4 * r + 3] = a[2 * r] * std::sin(a[2 * r + 1]);
    }
    return out;
  };
  inst.dynamics.f = [M, R, n](double s, const VectorXd& x, const VectorXd& a) {
    VectorXd out = M * x;
    for (int r = 0; r < R; ++r) {
      out[4 * r + 1] += a[2 * r] * std::cos(a[2 * r + 1]) + disturbance(s);
      out[4 * r + 3] += a[2 * r] * std::sin(a[2 * r + 1]);
    }
    return out;
  };

  VectorXd alo(m), ahi(m);
  for (int r = 0; r < R; ++r) {
    alo[2 * r] = -1.0;
    ahi[2 * r] = 1.0;
    alo[2 * r + 1] = -kPi / 6.0;
    ahi[2 * r + 1] = kPi / 6.0;
  }
  inst.controls = ControlSet::box(alo, ahi);

  inst.stage.is_zero = true;

  // terminal cost: leader-to-goal plus formation offsets
  {
    NormTerm lead;
    lead.A = MatrixXd::Zero(2, n);
    lead.A(0, 0) = 1.0;
    lead.A(1, 2) = 1.0;
    VectorXd goal(2);
    goal << -1.0, -1.0;
    lead.offset = [goal](double) { return goal; };
    inst.terminal.norms.push_back(lead);
    for (int r = 1; r < R; ++r) {
      NormTerm t;
      t.A = MatrixXd::Zero(2, n);
      t.A(0, 4 * r) = 1.0;
      t.A(0, 0) = -1.0;
      t.A(1, 4 * r + 2) = 1.0;
      t.A(1, 2) = -1.0;
      VectorXd off(2);
      off << -offset_x(r + 1, R), 0.0;
      t.offset = [off](double) { return off; };
      inst.terminal.norms.push_back(t);
    }
    inst.terminal.convex_in_x = true;
    inst.terminal.time_dependent = false;
  }

  for (int r = 0; r < R; ++r) {
    AffineRow cap;
    cap.a = VectorXd::Zero(n);
    cap.a[4 * r] = 1.0;
    cap.b = [](double) { return -5.2; };
    inst.constraint.rows.push_back(cap);
    AffineRow vel;
    vel.a = VectorXd::Zero(n);
    vel.a[4 * r + 1] = -1.0;
    inst.constraint.rows.push_back(vel);
  }
  inst.constraint.convex_in_x = true;

  inst.hamiltonian_hook = [R](double s, const VectorXd& x, const VectorXd& p,
                              double) -> HbarResult {
    HbarResult out;
    out.maximizer = VectorXd::Zero(2 * R);
    double d = disturbance(s);
    double v = 0.0;
    for (int r = 0; r < R; ++r) {
      double mag, ang;
      v += -p[4 * r] * x[4 * r + 1] - p[4 * r + 1] * d - p[4 * r + 2] * x[4 * r + 3] +
           sector_support(p[4 * r + 1], p[4 * r + 3], &mag, &ang);
      out.maximizer[2 * r] = mag;
      out.maximizer[2 * r + 1] = ang;
    }
    out.value = v;
    return out;
  };

  Dynamics dyn_copy = inst.dynamics;
  inst.image = [R, n, dyn_copy](double s, const VectorXd& x,
                                bool include_zero) -> ControlImage {
    if (include_zero)
      throw std::invalid_argument("example_a: co({0} u B) is not defined for this min-max instance");
    ControlImage img;
    img.dim = n;
    double d = disturbance(s);
    std::vector<ConvexSetPtr> blocks;
    img.fixed_vals.resize(2 * R);
    img.fixed_P = MatrixXd::Zero(2 * R, n);
    for (int r = 0; r < R; ++r) {
      img.fixed_idx.push_back(4 * r);
      img.fixed_idx.push_back(4 * r + 2);
      img.fixed_vals[2 * r] = -x[4 * r + 1];
      img.fixed_vals[2 * r + 1] = -x[4 * r + 3];
      img.fixed_P(2 * r, 4 * r + 1) = -1.0;
      img.fixed_P(2 * r + 1, 4 * r + 3) = -1.0;
      img.free_idx.push_back(4 * r + 1);
      img.free_idx.push_back(4 * r + 3);
      blocks.push_back(std::make_shared<StadiumSet>(-d, 1.0, 0.5));
    }
    img.free_set = std::make_shared<ProductSet>(std::move(blocks));
    img.raw_margin = [R, d](const VectorXd& bf) {
      double m = -kInf;
      for (int r = 0; r < R; ++r) {
        double u = bf[2 * r] + d, w = bf[2 * r + 1];
        m = std::max(m, std::hypot(u, w) - 1.0);
        m = std::max(m, kSqrt3 * std::abs(w) - std::abs(u));
      }
      return m;
    };
    if (R == 1) {
      // witness candidates from a control grid (generic-path tests)
      const int res = 41;
      for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
          double a1 = -1.0 + 2.0 * i / (res - 1);
          double a2 = -kPi / 6.0 + (kPi / 3.0) * j / (res - 1);
          ImageAtom at;
          at.control = (VectorXd(2) << a1, a2).finished();
          at.b = -dyn_copy.eval(s, x, at.control);
          at.stage_cost = 0.0;
          img.atoms.push_back(std::move(at));
        }
      }
    }
    return img;
  };

  inst.decomposer_hook = [R](double s, const VectorXd& /*x*/, const VectorXd& beta,
                             bool sub_one) -> std::vector<ControlAtom> {
    if (sub_one)
      throw std::invalid_argument("example_a: sub-one decomposition mode is a min-min construct");
    double d = disturbance(s);
    std::vector<std::vector<ControlAtom>> per(R);
    for (int r = 0; r < R; ++r) {
      double u = -beta[4 * r + 1] - d;     // target a1 cos a2
      double w = -beta[4 * r + 3];         // target a1 sin a2
      double rho = std::hypot(u, w);
      bool in_raw = rho <= 1.0 + 1e-9 && kSqrt3 * std::abs(w) <= std::abs(u) + 1e-9;
      if (in_raw) {
        ControlAtom a;
        a.weight = 1.0;
        a.control.resize(2);
        if (rho < 1e-13) {
          a.control << 0.0, 0.0;
        } else {
          a.control << std::copysign(rho, u), std::atan(w / u);
        }
        per[r].push_back(std::move(a));
      } else {
        // two sector-edge atoms sharing the step
        double g1 = (u + kSqrt3 * w) / (2.0 * kSqrt3 * w);
        double g2 = (kSqrt3 * w - u) / (2.0 * kSqrt3 * w);
        ControlAtom a1, a2;
        a1.control = (VectorXd(2) << 2.0 * w, kPi / 6.0).finished();
        a1.weight = g1;
        a2.control = (VectorXd(2) << -2.0 * w, -kPi / 6.0).finished();
        a2.weight = g2;
        per[r].push_back(std::move(a1));
        per[r].push_back(std::move(a2));
      }
    }
    std::vector<ControlAtom> merged;
    merge_agent_schedules(per, 2, merged);
    return merged;
  };

  // initial state: goal formation with seeded velocities
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> vel(-0.5, 0.5);
  inst.initial_state = VectorXd::Zero(n);
  for (int r = 0; r < R; ++r) {
    inst.initial_state[4 * r] = 1.0 + (r > 0 ? offset_x(r + 1, R) : 0.0);
    inst.initial_state[4 * r + 2] = 1.0;
    inst.initial_state[4 * r + 1] = vel(rng);
    inst.initial_state[4 * r + 3] = vel(rng);
  }
  inst.filler_control = VectorXd::Zero(m);
  return inst;
}

ProblemInstance gen_example_b(int robots, std::uint64_t seed) {
  if (robots < 1) throw std::invalid_argument("gen_example_b: robots >= 1");
  const int R = robots;
  const int n = 2 * R, m = 2 * R;
  ProblemInstance inst;
  inst.name = "example_b_R" + std::to_string(R);
  inst.cls = ProblemClass::MinMin;
  inst.time_invariant = true;
  inst.horizon = 2.0;
  inst.state_dim = n;
  inst.control_dim = m;

  VectorXd drift = VectorXd::Zero(n);
  for (int r = 0; r < R; ++r) drift[2 * r] = 2.0;
  inst.dynamics.control_only = true;
  inst.dynamics.affine_in_control = true;
  inst.dynamics.control_matrix = [n](double) { return MatrixXd::Identity(n, n); };
  inst.dynamics.drift = [drift](double) { return drift; };
  inst.dynamics.control_part = [drift](double, const VectorXd& a) {
    return VectorXd(a + drift);
  };
  inst.dynamics.f = [drift](double, const VectorXd&, const VectorXd& a) {
    return VectorXd(a + drift);
  };

  inst.controls = ControlSet::box(VectorXd::Constant(m, -1.0), VectorXd::Constant(m, 1.0));
  inst.stage.is_zero = true;

  {
    NormTerm lead;
    lead.A = MatrixXd::Zero(2, n);
    lead.A(0, 0) = 1.0;
    lead.A(1, 1) = 1.0;
    VectorXd goal(2);
    goal << -1.0, -1.0;
    lead.offset = [goal](double) { return goal; };
    inst.terminal.norms.push_back(lead);
    for (int r = 1; r < R; ++r) {
      NormTerm t;
      t.A = MatrixXd::Zero(2, n);
      t.A(0, 2 * r) = 1.0;
      t.A(0, 0) = -1.0;
      t.A(1, 2 * r + 1) = 1.0;
      t.A(1, 1) = -1.0;
      VectorXd off(2);
      off << -offset_x(r + 1, R), 0.0;
      t.offset = [off](double) { return off; };
      inst.terminal.norms.push_back(t);
    }
    inst.terminal.convex_in_x = true;
  }

  for (int r = 0; r < R; ++r) {
    AffineRow cap;
    cap.a = VectorXd::Zero(n);
    cap.a[2 * r] = 1.0;
    cap.b = [](double) { return -5.0; };
    inst.constraint.rows.push_back(cap);
    AffineRow vel;
    vel.a = VectorXd::Zero(n);
    vel.a[2 * r + 1] = -1.0;
    inst.constraint.rows.push_back(vel);
  }
  inst.constraint.convex_in_x = true;

  const double b1lo = -3.0, b1hi = -1.0, b2max = 1.0;
  inst.image = [R, n, b1lo, b1hi, b2max](double, const VectorXd&,
                                         bool include_zero) -> ControlImage {
    ControlImage img;
    img.dim = n;
    for (int i = 0; i < n; ++i) img.free_idx.push_back(i);
    if (include_zero) {
      img.free_set = make_scaled_box_hull(R, b1lo, b1hi, b2max);
      img.includes_zero = true;
      VectorXd lo(n), hi(n);
      for (int r = 0; r < R; ++r) {
        lo[2 * r] = b1lo;
        hi[2 * r] = b1hi;
        lo[2 * r + 1] = -b2max;
        hi[2 * r + 1] = b2max;
      }
      BoxSet raw(lo, hi);
      img.raw_margin = [raw](const VectorXd& bf) { return raw.margin(bf); };
    } else {
      VectorXd lo(n), hi(n);
      for (int r = 0; r < R; ++r) {
        lo[2 * r] = b1lo;
        hi[2 * r] = b1hi;
        lo[2 * r + 1] = -b2max;
        hi[2 * r + 1] = b2max;
      }
      img.free_set = std::make_shared<BoxSet>(lo, hi);
    }
    return img;
  };

  inst.decomposer_hook = [R, n, b1lo, b1hi, b2max](double, const VectorXd&,
                                                   const VectorXd& beta,
                                                   bool sub_one) -> std::vector<ControlAtom> {
    bool in_raw = true;
    for (int r = 0; r < R && in_raw; ++r) {
      if (beta[2 * r] < b1lo - 1e-9 || beta[2 * r] > b1hi + 1e-9 ||
          std::abs(beta[2 * r + 1]) > b2max + 1e-9)
        in_raw = false;
    }
    std::vector<ControlAtom> atoms;
    if (in_raw) {
      ControlAtom a;
      a.weight = 1.0;
      a.control.resize(n);
      for (int r = 0; r < R; ++r) {
        a.control[2 * r] = -beta[2 * r] - 2.0;
        a.control[2 * r + 1] = -beta[2 * r + 1];
      }
      atoms.push_back(std::move(a));
      return atoms;
    }
    if (!sub_one)
      throw std::runtime_error(
          "example_b: beta outside B needs the freezing (sub-one) decomposition mode");
    double gamma = 0.0;
    for (int r = 0; r < R; ++r) gamma = std::max(gamma, -beta[2 * r]);
    gamma = std::min(1.0, gamma);
    if (gamma <= 1e-13) {
      if (beta.lpNorm<Eigen::Infinity>() > 1e-9)
        throw std::runtime_error("example_b: nonzero beta with zero scaling weight");
      return atoms;  // pure freezing
    }
    ControlAtom a;
    a.weight = gamma;
    a.control.resize(n);
    for (int r = 0; r < R; ++r) {
      a.control[2 * r] = std::min(1.0, std::max(-1.0, -beta[2 * r] / gamma - 2.0));
      a.control[2 * r + 1] = std::min(1.0, std::max(-1.0, -beta[2 * r + 1] / gamma));
    }
    atoms.push_back(std::move(a));
    return atoms;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> perturb(-kExampleBPerturbation,
                                                 kExampleBPerturbation);
  inst.initial_state = VectorXd::Zero(n);
  for (int r = 0; r < R; ++r) {
    inst.initial_state[2 * r] = 1.0 + (r > 0 ? offset_x(r + 1, R) : 0.0) + perturb(rng);
    inst.initial_state[2 * r + 1] = 1.0 + perturb(rng);
  }
  inst.filler_control = VectorXd::Zero(m);
  return inst;
}

namespace {

ProblemInstance toy_1d_base(double x0) {
  ProblemInstance inst;
  inst.state_dim = 1;
  inst.control_dim = 1;
  inst.horizon = 1.0;
  inst.initial_state = (VectorXd(1) << x0).finished();
  inst.controls =
      ControlSet::box((VectorXd(1) << -1.0).finished(), (VectorXd(1) << 1.0).finished());
  inst.dynamics.control_only = true;
  inst.dynamics.affine_in_control = true;
  inst.dynamics.control_matrix = [](double) { return MatrixXd::Identity(1, 1); };
  inst.dynamics.drift = [](double) { return VectorXd::Zero(1); };
  inst.dynamics.control_part = [](double, const VectorXd& a) { return a; };
  inst.dynamics.f = [](double, const VectorXd&, const VectorXd& a) { return a; };
  inst.filler_control = VectorXd::Zero(1);
  return inst;
}

ControlImage interval_image(double blo, double bhi, bool include_zero, const Dynamics& dyn,
                            const StageCost& stage, double s, const VectorXd& x) {
  ControlImage img;
  img.dim = 1;
  img.free_idx = {0};
  double lo = blo, hi = bhi;
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    img.includes_zero = true;
    BoxSet raw((VectorXd(1) << blo).finished(), (VectorXd(1) << bhi).finished());
    img.raw_margin = [raw](const VectorXd& bf) { return raw.margin(bf); };
  }
  img.free_set =
      std::make_shared<BoxSet>((VectorXd(1) << lo).finished(), (VectorXd(1) << hi).finished());
  const int res = 201;
  for (int i = 0; i < res; ++i) {
    double a = -1.0 + 2.0 * i / (res - 1);
    ImageAtom at;
    at.control = (VectorXd(1) << a).finished();
    at.b = -dyn.eval(s, x, at.control);
    at.stage_cost = stage.value(s, x, at.control);
    img.atoms.push_back(std::move(at));
  }
  return img;
}

}  // namespace

ProblemInstance toy_1d_minmax(double x0) {
  ProblemInstance inst = toy_1d_base(x0);
  inst.name = "toy1d_minmax";
  inst.cls = ProblemClass::MinMax;
  inst.time_invariant = true;
  inst.stage.is_zero = true;
  NormTerm t;
  t.A = MatrixXd::Identity(1, 1);
  inst.terminal.norms.push_back(t);
  AffineRow row;
  row.a = (VectorXd(1) << 1.0).finished();
  row.b = [](double) { return -2.0; };
  inst.constraint.rows.push_back(row);
  inst.constraint.convex_in_x = true;
  inst.hamiltonian_hook = [](double, const VectorXd&, const VectorXd& p,
                             double) -> HbarResult {
    HbarResult out;
    out.value = std::abs(p[0]);
    out.maximizer = (VectorXd(1) << (p[0] > 0.0 ? -1.0 : (p[0] < 0.0 ? 1.0 : 0.0))).finished();
    return out;
  };
  Dynamics dyn = inst.dynamics;
  StageCost st = inst.stage;
  inst.image = [dyn, st](double s, const VectorXd& x, bool include_zero) {
    return interval_image(-1.0, 1.0, include_zero, dyn, st, s, x);
  };
  return inst;
}

ProblemInstance toy_1d_drift_minmin(double x0, double cap) {
  ProblemInstance inst = toy_1d_base(x0);
  inst.name = "toy1d_drift_minmin";
  inst.cls = ProblemClass::MinMin;
  inst.time_invariant = true;
  inst.dynamics.drift = [](double) { return (VectorXd(1) << 2.0).finished(); };
  inst.dynamics.control_part = [](double, const VectorXd& a) {
    return (VectorXd(1) << a[0] + 2.0).finished();
  };
  inst.dynamics.f = [](double, const VectorXd&, const VectorXd& a) {
    return (VectorXd(1) << a[0] + 2.0).finished();
  };
  inst.stage.is_zero = true;
  NormTerm t;
  t.A = MatrixXd::Identity(1, 1);
  t.offset = [](double) { return (VectorXd(1) << -1.0).finished(); };
  inst.terminal.norms.push_back(t);
  AffineRow row;
  row.a = (VectorXd(1) << 1.0).finished();
  row.b = [cap](double) { return -cap; };
  inst.constraint.rows.push_back(row);
  inst.constraint.convex_in_x = true;
  inst.hamiltonian_hook = [](double, const VectorXd&, const VectorXd& p,
                             double) -> HbarResult {
    HbarResult out;
    out.value = -2.0 * p[0] + std::abs(p[0]);
    out.maximizer = (VectorXd(1) << (p[0] > 0.0 ? -1.0 : (p[0] < 0.0 ? 1.0 : 0.0))).finished();
    return out;
  };
  Dynamics dyn = inst.dynamics;
  StageCost st = inst.stage;
  inst.image = [dyn, st](double s, const VectorXd& x, bool include_zero) {
    return interval_image(-3.0, -1.0, include_zero, dyn, st, s, x);
  };
  return inst;
}

ProblemInstance toy_lq(double x0) {
  ProblemInstance inst = toy_1d_base(x0);
  inst.name = "toy_lq";
  inst.cls = ProblemClass::MinMax;
  inst.time_invariant = true;
  inst.stage.is_zero = false;
  inst.stage.separable = true;
  inst.stage.state_part_zero = true;
  inst.stage.ctrl_part_convex = true;
  inst.stage.convex_in_xa = true;
  inst.stage.eval = [](double, const VectorXd&, const VectorXd& a) { return a[0] * a[0]; };
  inst.stage.grad_a = [](double, const VectorXd&, const VectorXd& a) {
    return (VectorXd(1) << 2.0 * a[0]).finished();
  };
  inst.stage.ctrl_coords = {[](double ai) { return ai * ai; }};
  inst.terminal.quad = 2.0 * MatrixXd::Identity(1, 1);  // 0.5 x'Qx = x^2
  AffineRow row;
  row.a = (VectorXd(1) << 0.0).finished();
  row.b = [](double) { return -1.0; };
  inst.constraint.rows.push_back(row);
  inst.conjugate_hook = [](double, const VectorXd&, const VectorXd& b) {
    return b[0] * b[0];
  };
  inst.conjugate_grad_hook = [](double, const VectorXd&, const VectorXd& b) {
    return (VectorXd(1) << 2.0 * b[0]).finished();
  };
  Dynamics dyn = inst.dynamics;
  StageCost st = inst.stage;
  inst.image = [dyn, st](double s, const VectorXd& x, bool include_zero) {
    return interval_image(-1.0, 1.0, include_zero, dyn, st, s, x);
  };
  return inst;
}

ProblemInstance toy_nonconvex_stage(double x0) {
  ProblemInstance inst = toy_1d_base(x0);
  inst.name = "toy_nonconvex_stage";
  inst.cls = ProblemClass::MinMax;
  inst.time_invariant = true;
  inst.stage.is_zero = false;
  inst.stage.separable = true;
  inst.stage.state_part_zero = true;
  inst.stage.ctrl_part_convex = false;
  auto ell = [](double a) {
    double w = 1.0 - a * a;
    return w * w + 0.5 * a;
  };
  inst.stage.eval = [ell](double, const VectorXd&, const VectorXd& a) { return ell(a[0]); };
  inst.stage.ctrl_coords = {ell};
  NormTerm t;
  t.A = MatrixXd::Identity(1, 1);
  inst.terminal.norms.push_back(t);
  AffineRow row;
  row.a = (VectorXd(1) << 0.0).finished();
  row.b = [](double) { return -1.0; };
  inst.constraint.rows.push_back(row);
  Dynamics dyn = inst.dynamics;
  StageCost st = inst.stage;
  inst.image = [dyn, st](double s, const VectorXd& x, bool include_zero) {
    return interval_image(-1.0, 1.0, include_zero, dyn, st, s, x);
  };
  return inst;
}

}  // namespace laxoc
