#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace laxoc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ProblemClass { MinMax, MinMin };

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Temporal discretization nodes t_0 = 0 < t_1 < ... < t_K = T.
struct TimeGrid {
  std::vector<double> nodes;

  static TimeGrid uniform(double horizon, int steps) {
    if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
    TimeGrid g;
    g.nodes.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) g.nodes[k] = horizon * k / steps;
    g.nodes.back() = horizon;  // exact terminal node
    return g;
  }

  /// Uniform grid with step as close to dt as divides the horizon.
  static TimeGrid with_dt(double horizon, double dt) {
    int steps = std::max(1, static_cast<int>(std::lround(horizon / dt)));
    return uniform(horizon, steps);
  }

  int steps() const { return static_cast<int>(nodes.size()) - 1; }
  double horizon() const { return nodes.back(); }
  double dt(int k) const { return nodes[k + 1] - nodes[k]; }

  bool valid() const {
    if (nodes.size() < 2 || nodes.front() != 0.0) return false;
    for (size_t i = 1; i < nodes.size(); ++i)
      if (nodes[i] <= nodes[i - 1]) return false;
    return true;
  }
};

/// Piecewise-constant control: values[i] on [breaks[i], breaks[i+1]).
struct PiecewiseControl {
  std::vector<double> breaks;
  std::vector<VectorXd> values;

  static PiecewiseControl constant(const VectorXd& value, double horizon) {
    PiecewiseControl c;
    c.breaks = {0.0, horizon};
    c.values = {value};
    return c;
  }

  double span() const { return breaks.empty() ? 0.0 : breaks.back(); }
  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }

  /// Value at time s; the terminal time maps to the last piece.
  const VectorXd& at(double s) const {
    if (breaks.size() < 2) throw std::runtime_error("PiecewiseControl: empty schedule");
    auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
    int idx = static_cast<int>(it - breaks.begin()) - 1;
    if (idx < 0) idx = 0;
    if (idx >= static_cast<int>(values.size())) idx = static_cast<int>(values.size()) - 1;
    return values[idx];
  }

  bool valid() const {
    if (breaks.size() != values.size() + 1) return false;
    for (size_t i = 1; i < breaks.size(); ++i)
      if (breaks[i] <= breaks[i - 1]) return false;
    return true;
  }
};

/// States (and optionally sampled controls) on a sequence of times.
struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> controls;  // empty, or aligned with times

  int size() const { return static_cast<int>(times.size()); }

  /// Index of a sample at time t (within tol); -1 if absent.
  int index_of_time(double t, double tol = 1e-9) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it == times.end()) return -1;
    int i = static_cast<int>(it - times.begin());
    return (std::abs(times[i] - t) <= tol) ? i : -1;
  }

  /// Linear interpolation of the state at time t.
  VectorXd state_at(double t) const {
    if (times.empty()) throw std::runtime_error("Trajectory: empty");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    int i = static_cast<int>(it - times.begin());
    double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return (1.0 - w) * states[i - 1] + w * states[i];
  }
};

/// One admissible control atom with its convex-combination weight.
struct ControlAtom {
  VectorXd control;
  double weight = 0.0;
};

}  // namespace laxoc
