#include "laxoc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laxoc {

namespace {

// One simplex phase on the tableau with Bland's anti-cycling rule.
// basis[i] is the column currently basic in row i.
bool run_simplex(MatrixXd& T, std::vector<int>& basis, int cost_row, int ncols,
                 double tol, int max_pivots) {
  const int m = static_cast<int>(T.rows()) - 1;
  const int rhs = static_cast<int>(T.cols()) - 1;
  for (int pivot_count = 0; pivot_count < max_pivots; ++pivot_count) {
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (T(cost_row, j) < -tol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) return true;  // optimal
    int leave = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m; ++i) {
      double a = T(i, enter);
      if (a > tol) {
        double ratio = T(i, rhs) / a;
        if (ratio < best_ratio - tol ||
            (ratio < best_ratio + tol && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded
    double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[leave] = enter;
  }
  return true;  // pivot cap reached; treat current point as answer
}

}  // namespace

LpResult solve_lp(const MatrixXd& A, const VectorXd& b, const VectorXd& c, double tol) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  LpResult res;

  // Tableau with artificial columns: [A | I | b], phase-1 cost row, phase-2 cost row.
  MatrixXd T = MatrixXd::Zero(m + 1, n + m + 1);
  for (int i = 0; i < m; ++i) {
    double s = (b[i] < 0.0) ? -1.0 : 1.0;
    T.block(i, 0, 1, n) = s * A.row(i);
    T(i, n + i) = 1.0;
    T(i, n + m) = s * b[i];
  }
  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), n);

  // Phase 1: minimize sum of artificials.
  for (int j = 0; j < n; ++j) T(m, j) = -T.block(0, j, m, 1).sum();
  T(m, n + m) = -T.col(n + m).head(m).sum();
  run_simplex(T, basis, m, n, tol, 200 * (n + m));
  double phase1 = -T(m, n + m);
  res.infeasibility = std::max(0.0, phase1);
  if (phase1 > 1e3 * tol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    res.feasible = false;
    return res;
  }

  // Drive any artificial still in the basis out (or accept a zero row).
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(T(i, j)) > tol) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        double piv = T(i, enter);
        T.row(i) /= piv;
        for (int r = 0; r <= m; ++r) {
          if (r == i) continue;
          double f = T(r, enter);
          if (f != 0.0) T.row(r) -= f * T.row(i);
        }
        basis[i] = enter;
      }
    }
  }

  // Phase 2 on the original columns only (artificials can never re-enter
  // because the entering scan is restricted to the first n columns).
  T.row(m).setZero();
  for (int j = 0; j < n; ++j) T(m, j) = c[j];
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n && T(m, basis[i]) != 0.0) T.row(m) -= T(m, basis[i]) * T.row(i);
  }
  run_simplex(T, basis, m, n, tol, 200 * (n + m));

  res.feasible = true;
  res.x = VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = T(i, n + m);
  res.objective = c.dot(res.x);
  // Duals read off the artificial columns of the cost row: the reduced cost
  // of artificial i is -y_i for the row-scaled system.
  res.dual = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    double s = (b[i] < 0.0) ? -1.0 : 1.0;
    res.dual[i] = -s * T(m, n + i);
  }
  res.infeasibility = 0.0;
  return res;
}

LowerEnvelope1D::LowerEnvelope1D(const std::vector<double>& b,
                                 const std::vector<double>& v) {
  if (b.size() != v.size() || b.empty())
    throw std::invalid_argument("LowerEnvelope1D: bad input");
  std::vector<int> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return b[i] < b[j] || (b[i] == b[j] && v[i] < v[j]);
  });
  // Andrew monotone chain, lower hull, keeping the cheapest point per x.
  std::vector<int> pts;
  for (int idx : order) {
    if (!pts.empty() && b[pts.back()] == b[idx]) continue;  // keep the lower one
    pts.push_back(idx);
  }
  auto cross = [&](int a, int m, int c) {
    return (b[m] - b[a]) * (v[c] - v[a]) - (b[c] - b[a]) * (v[m] - v[a]);
  };
  for (int idx : pts) {
    while (hull_.size() >= 2 &&
           cross(hull_[hull_.size() - 2], hull_.back(), idx) <= 0.0)
      hull_.pop_back();
    hull_.push_back(idx);
  }
  for (int i : hull_) {
    xs_.push_back(b[i]);
    vs_.push_back(v[i]);
  }
}

double LowerEnvelope1D::value(double x) const {
  const double eps = 1e-12 * (1.0 + std::abs(xs_.back()) + std::abs(xs_.front()));
  if (x < xs_.front() - eps || x > xs_.back() + eps) return kInf;
  if (xs_.size() == 1) return vs_.front();
  x = std::min(std::max(x, xs_.front()), xs_.back());
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  int i = std::min<int>(static_cast<int>(it - xs_.begin()), static_cast<int>(xs_.size()) - 1);
  if (i == 0) i = 1;
  double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return (1.0 - w) * vs_[i - 1] + w * vs_[i];
}

double LowerEnvelope1D::slope(double x) const {
  if (xs_.size() == 1) return 0.0;
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  int i = std::min<int>(std::max<int>(1, static_cast<int>(it - xs_.begin())),
                        static_cast<int>(xs_.size()) - 1);
  return (vs_[i] - vs_[i - 1]) / (xs_[i] - xs_[i - 1]);
}

}  // namespace laxoc
