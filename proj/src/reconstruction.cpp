#include "laxoc/reconstruction.hpp"

#include "laxoc/lp.hpp"

#include <cmath>
#include <sstream>

namespace laxoc {

double decomposition_residual(const ProblemInstance& inst, double s, const VectorXd& x,
                              const VectorXd& beta, double hstar_value,
                              const std::vector<ControlAtom>& atoms, bool /*sub_one*/) {
  VectorXd fsum = VectorXd::Zero(inst.state_dim);
  double lsum = 0.0;
  for (const auto& at : atoms) {
    fsum += at.weight * inst.dynamics.eval(s, x, at.control);
    lsum += at.weight * inst.stage.value(s, x, at.control);
  }
  double res = (fsum + beta).lpNorm<Eigen::Infinity>();
  if (std::isfinite(hstar_value)) res = std::max(res, std::abs(lsum - hstar_value));
  return res;
}

std::vector<ControlAtom> decompose_step(const ProblemInstance& inst, double s,
                                        const VectorXd& x, const VectorXd& beta,
                                        double hstar_value,
                                        const std::vector<ImageAtom>& candidates,
                                        bool sub_one, double tol) {
  std::vector<ControlAtom> atoms;
  if (inst.decomposer_hook) {
    atoms = inst.decomposer_hook(s, x, beta, sub_one);
  } else {
    std::vector<ImageAtom> cands =
        candidates.empty() ? image_atoms(inst, s, x, sub_one) : candidates;
    const int n = inst.state_dim;
    const int m = static_cast<int>(cands.size()) + (sub_one ? 1 : 0);
    MatrixXd A(n + 1, m);
    VectorXd cost(m), rhs(n + 1);
    for (int j = 0; j < static_cast<int>(cands.size()); ++j) {
      A.block(0, j, n, 1) = cands[j].b;
      A(n, j) = 1.0;
      cost[j] = cands[j].stage_cost;
    }
    if (sub_one) {  // freezing slack: weight with no atom
      A.col(m - 1).setZero();
      A(n, m - 1) = 1.0;
      cost[m - 1] = 0.0;
    }
    rhs.head(n) = beta;
    rhs[n] = 1.0;
    LpResult lp = solve_lp(A, rhs, cost);
    if (!lp.feasible) {
      std::ostringstream os;
      os << "decompose_step: no convex combination of candidates reaches beta (LP "
            "infeasibility "
         << lp.infeasibility << "); candidate set too coarse?";
      throw std::runtime_error(os.str());
    }
    for (int j = 0; j < static_cast<int>(cands.size()); ++j) {
      if (lp.x[j] > 1e-12) atoms.push_back({cands[j].control, lp.x[j]});
    }
  }
  // Basic solutions already satisfy the Caratheodory-style bound; keep a hard
  // cap of n + 2 atoms by dropping the smallest weights and rescaling.
  if (static_cast<int>(atoms.size()) > inst.state_dim + 2) {
    std::sort(atoms.begin(), atoms.end(),
              [](const ControlAtom& a, const ControlAtom& b) { return a.weight > b.weight; });
    atoms.resize(inst.state_dim + 2);
  }
  double res = decomposition_residual(inst, s, x, beta, hstar_value, atoms, sub_one);
  if (res > tol) {
    std::ostringstream os;
    os << "decompose_step: identity residual " << res << " exceeds tolerance " << tol
       << " at s=" << s;
    throw std::runtime_error(os.str());
  }
  double wsum = 0.0;
  for (const auto& a : atoms) wsum += a.weight;
  if (!sub_one && std::abs(wsum - 1.0) > 1e-9)
    throw std::runtime_error("decompose_step: weights must sum to one in min-max mode");
  if (sub_one && wsum > 1.0 + 1e-9)
    throw std::runtime_error("decompose_step: weight sum exceeds one");
  return atoms;
}

Decomposition decompose_relaxed_solution(const ProblemInstance& inst,
                                         const ConvexProgram& program,
                                         const Solution& solution, double tol) {
  Decomposition d;
  const bool sub_one = (program.kind == ProgramKind::LaxPhi2TI);
  d.mode = sub_one ? Decomposition::Mode::SubOne : Decomposition::Mode::ExactSumOne;
  d.steps.resize(program.num_steps());
  for (int k = 0; k < program.num_steps(); ++k) {
    double s = program.grid.nodes[k];
    const VectorXd& x = solution.assignment.states[k];
    const VectorXd& beta = solution.assignment.controls[k];
    double hstar = inst.stage.is_zero
                       ? 0.0
                       : (sub_one ? eval_h2ti_star(inst, x, beta)
                                  : eval_h_star(inst, s, x, beta));
    d.steps[k] = decompose_step(inst, s, x, beta, hstar, {}, sub_one, tol);
  }
  return d;
}

PiecewiseControl build_alpha_schedule_p1(const Decomposition& decomp, const TimeGrid& grid,
                                         double tol) {
  if (decomp.mode != Decomposition::Mode::ExactSumOne)
    throw std::invalid_argument("build_alpha_schedule_p1: needs exact-sum-one mode");
  if (static_cast<int>(decomp.steps.size()) != grid.steps())
    throw std::invalid_argument("build_alpha_schedule_p1: step count mismatch");
  PiecewiseControl out;
  out.breaks.push_back(grid.nodes.front());
  for (int k = 0; k < grid.steps(); ++k) {
    const auto& atoms = decomp.steps[k];
    double wsum = 0.0;
    for (const auto& a : atoms) wsum += a.weight;
    if (std::abs(wsum - 1.0) > tol)
      throw std::runtime_error("build_alpha_schedule_p1: step weights sum to " +
                               std::to_string(wsum));
    double t = grid.nodes[k];
    for (size_t i = 0; i < atoms.size(); ++i) {
      double len = atoms[i].weight / wsum * grid.dt(k);
      if (len <= 1e-15) continue;
      t += len;
      double end = (i + 1 == atoms.size()) ? grid.nodes[k + 1] : std::min(t, grid.nodes[k + 1]);
      if (end <= out.breaks.back() + 1e-15) continue;
      out.breaks.push_back(end);
      out.values.push_back(atoms[i].control);
    }
    if (out.breaks.back() < grid.nodes[k + 1] - 1e-12) {
      // numerical shortfall: extend the last atom to the node
      out.breaks.back() = grid.nodes[k + 1];
    }
  }
  out.breaks.back() = grid.nodes.back();
  return out;
}

P2TISchedules build_alpha_schedule_p2ti(const ProblemInstance& inst,
                                        const Decomposition& decomp, const TimeGrid& grid,
                                        const std::vector<VectorXd>& relaxed_states,
                                        double tol) {
  if (decomp.mode != Decomposition::Mode::SubOne)
    throw std::invalid_argument("build_alpha_schedule_p2ti: needs sub-one mode");
  if (static_cast<int>(decomp.steps.size()) != grid.steps())
    throw std::invalid_argument("build_alpha_schedule_p2ti: step count mismatch");
  P2TISchedules out;
  out.beta1.breaks.push_back(grid.nodes.front());
  out.alpha_eps.breaks.push_back(grid.nodes.front());
  double sigma = 0.0;
  for (int k = 0; k < grid.steps(); ++k) {
    const auto& atoms = decomp.steps[k];
    double wsum = 0.0;
    for (const auto& a : atoms) wsum += a.weight;
    if (wsum > 1.0 + tol)
      throw std::runtime_error("build_alpha_schedule_p2ti: step weight sum " +
                               std::to_string(wsum) + " exceeds one");
    const VectorXd& xk =
        relaxed_states.empty() ? inst.initial_state : relaxed_states[k];
    double t = grid.nodes[k];
    for (const auto& atom : atoms) {
      double len = atom.weight * grid.dt(k);
      if (len <= 1e-15) continue;
      t += len;
      // motion segment of beta1 and the sigma-compressed alpha segment
      out.beta1.breaks.push_back(t);
      out.beta1.values.push_back(-inst.dynamics.eval(grid.nodes[k], xk, atom.control));
      sigma += len;
      out.alpha_eps.breaks.push_back(sigma);
      out.alpha_eps.values.push_back(atom.control);
    }
    if (t < grid.nodes[k + 1] - 1e-15) {  // frozen tail
      out.beta1.breaks.push_back(grid.nodes[k + 1]);
      out.beta1.values.push_back(VectorXd::Zero(inst.state_dim));
    } else {
      out.beta1.breaks.back() = grid.nodes[k + 1];
    }
  }
  out.sigma_T = sigma;
  const double T = grid.horizon();
  if (sigma < T - 1e-15) {  // admissible filler beyond sigma(T)
    VectorXd filler =
        inst.filler_control.size() ? inst.filler_control : inst.controls.some_point();
    out.alpha_eps.breaks.push_back(T);
    out.alpha_eps.values.push_back(filler);
  } else if (!out.alpha_eps.values.empty()) {
    out.alpha_eps.breaks.back() = T;
  }
  if (out.alpha_eps.values.empty()) {  // full freezing: pure filler
    VectorXd filler =
        inst.filler_control.size() ? inst.filler_control : inst.controls.some_point();
    out.alpha_eps.breaks = {0.0, T};
    out.alpha_eps.values = {filler};
  }
  return out;
}

namespace {
bool is_zero_piece(const VectorXd& v) { return v.lpNorm<Eigen::Infinity>() <= 1e-14; }
}  // namespace

double pseudo_time(const PiecewiseControl& beta1, double s) {
  double sigma = 0.0;
  for (size_t i = 0; i < beta1.values.size(); ++i) {
    double a = beta1.breaks[i], b = beta1.breaks[i + 1];
    if (s <= a) break;
    double upto = std::min(s, b);
    if (!is_zero_piece(beta1.values[i])) sigma += upto - a;
    if (s <= b) break;
  }
  return sigma;
}

double pseudo_time_inverse(const PiecewiseControl& beta1, double sigma_value) {
  if (sigma_value < 0.0)
    throw std::out_of_range("pseudo_time_inverse: negative query");
  if (sigma_value == 0.0) return 0.0;  // earliest preimage of zero
  double acc = 0.0;
  for (size_t i = 0; i < beta1.values.size(); ++i) {
    if (is_zero_piece(beta1.values[i])) continue;
    double len = beta1.breaks[i + 1] - beta1.breaks[i];
    if (sigma_value <= acc + len + 1e-15) {
      return beta1.breaks[i] + (sigma_value - acc);
    }
    acc += len;
  }
  throw std::out_of_range("pseudo_time_inverse: query " + std::to_string(sigma_value) +
                          " beyond sigma(T) = " + std::to_string(acc));
}

TerminalChoice select_terminal_time(const ProblemInstance& inst,
                                    const std::vector<double>& J, int feasible_upto,
                                    const TimeGrid& grid) {
  ProblemValue pv = evaluate_problem_value(inst, J, feasible_upto);
  TerminalChoice out;
  out.value = pv.value;
  out.k_star = pv.k_star;
  out.feasible = pv.feasible;
  out.tau = (pv.k_star >= 0) ? grid.nodes[pv.k_star] : grid.horizon();
  return out;
}

}  // namespace laxoc
