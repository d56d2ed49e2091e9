#include "laxoc/convex_sets.hpp"

#include <cmath>

namespace laxoc {

// ---------------------------------------------------------------- BoxSet

BoxSet::BoxSet(VectorXd lo, VectorXd hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("BoxSet: size mismatch");
  for (int i = 0; i < lo_.size(); ++i)
    if (lo_[i] > hi_[i]) throw std::invalid_argument("BoxSet: empty box");
}

double BoxSet::margin(const VectorXd& y) const {
  double m = -kInf;
  for (int i = 0; i < lo_.size(); ++i) {
    m = std::max(m, lo_[i] - y[i]);
    m = std::max(m, y[i] - hi_[i]);
  }
  return m;
}

std::pair<double, VectorXd> BoxSet::support(const VectorXd& c) const {
  VectorXd arg(lo_.size());
  double val = 0.0;
  for (int i = 0; i < lo_.size(); ++i) {
    arg[i] = (c[i] >= 0.0) ? hi_[i] : lo_[i];
    val += c[i] * arg[i];
  }
  return {val, arg};
}

VectorXd BoxSet::project(const VectorXd& y) const {
  return y.cwiseMax(lo_).cwiseMin(hi_);
}

// ---------------------------------------------------------------- BallSet

BallSet::BallSet(VectorXd center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (radius_ < 0.0) throw std::invalid_argument("BallSet: negative radius");
}

double BallSet::margin(const VectorXd& y) const {
  return (y - center_).norm() - radius_;
}

std::pair<double, VectorXd> BallSet::support(const VectorXd& c) const {
  double n = c.norm();
  if (n == 0.0) return {c.dot(center_), center_};
  VectorXd arg = center_ + (radius_ / n) * c;
  return {c.dot(arg), arg};
}

VectorXd BallSet::project(const VectorXd& y) const {
  VectorXd d = y - center_;
  double n = d.norm();
  if (n <= radius_) return y;
  return center_ + (radius_ / n) * d;
}

// ------------------------------------------------------------- StadiumSet

StadiumSet::StadiumSet(double cx, double radius, double half_height)
    : cx_(cx), r_(radius), h_(half_height) {
  if (h_ > r_) throw std::invalid_argument("StadiumSet: slab wider than ball");
}

double StadiumSet::margin(const VectorXd& y) const {
  double dx = y[0] - cx_, dy = y[1];
  return std::max(std::hypot(dx, dy) - r_, std::abs(dy) - h_);
}

std::pair<double, VectorXd> StadiumSet::support(const VectorXd& c) const {
  double n = std::hypot(c[0], c[1]);
  VectorXd arg(2);
  if (n == 0.0) {
    arg << cx_, 0.0;
    return {c[0] * cx_, arg};
  }
  double by = r_ * c[1] / n;
  if (std::abs(by) <= h_) {
    arg << cx_ + r_ * c[0] / n, by;
  } else {
    double wx = std::sqrt(std::max(0.0, r_ * r_ - h_ * h_));
    double sx = (c[0] >= 0.0) ? 1.0 : -1.0;
    double sy = (c[1] >= 0.0) ? 1.0 : -1.0;
    arg << cx_ + sx * wx, sy * h_;
  }
  return {c[0] * arg[0] + c[1] * arg[1], arg};
}

VectorXd StadiumSet::project(const VectorXd& y) const {
  if (margin(y) <= 0.0) return y;
  const double wx = std::sqrt(std::max(0.0, r_ * r_ - h_ * h_));
  double dx = y[0] - cx_, dy = y[1];

  // Candidate 1: clamp to the slab, then to the ball.
  VectorXd best(2);
  double best_d2 = kInf;
  auto consider = [&](double px, double py) {
    VectorXd p(2);
    p << px, py;
    double m = std::max(std::hypot(px - cx_, py) - r_, std::abs(py) - h_);
    if (m > 1e-12) return;
    double d2 = (px - y[0]) * (px - y[0]) + (py - y[1]) * (py - y[1]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = p;
    }
  };

  // Projection onto the circle, angle clamped into the admissible arcs.
  double n = std::hypot(dx, dy);
  if (n > 0.0) {
    double px = cx_ + r_ * dx / n, py = r_ * dy / n;
    if (std::abs(py) <= h_) consider(px, py);
  }
  // Projection onto the slab edges with the x-range of the chord.
  for (double sy : {-1.0, 1.0}) {
    double px = std::min(cx_ + wx, std::max(cx_ - wx, y[0]));
    consider(px, sy * h_);
  }
  // Corners.
  for (double sxv : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) consider(cx_ + sxv * wx, sy * h_);
  // Interior clamp (point inside ball but above slab).
  consider(y[0], std::min(h_, std::max(-h_, y[1])));

  if (!(best_d2 < kInf)) {  // degenerate fallback: set center line
    best << cx_, 0.0;
  }
  return best;
}

// ---------------------------------------------------------- VertexHullSet

VertexHullSet::VertexHullSet(std::vector<VectorXd> verts) : verts_(std::move(verts)) {
  if (verts_.empty()) throw std::invalid_argument("VertexHullSet: no vertices");
  dim_ = static_cast<int>(verts_.front().size());
}

std::pair<double, VectorXd> VertexHullSet::support(const VectorXd& c) const {
  double best = -kInf;
  int arg = 0;
  for (size_t i = 0; i < verts_.size(); ++i) {
    double v = c.dot(verts_[i]);
    if (v > best) {
      best = v;
      arg = static_cast<int>(i);
    }
  }
  return {best, verts_[arg]};
}

VectorXd VertexHullSet::project(const VectorXd& y) const {
  const int m = static_cast<int>(verts_.size());
  if (m == 1) return verts_[0];
  MatrixXd V(dim_, m);
  for (int j = 0; j < m; ++j) V.col(j) = verts_[j];
  // min ||V w - y||^2 over the simplex, by accelerated projected gradient.
  VectorXd w = VectorXd::Constant(m, 1.0 / m);
  VectorXd w_prev = w;
  const double lip = (V.transpose() * V).norm() + 1e-12;
  auto simplex_proj = [](VectorXd v) {
    // Euclidean projection onto the probability simplex.
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (int i = 0; i < n; ++i) {
      css += u[i];
      double t = (css - 1.0) / (i + 1);
      if (u[i] - t > 0.0) theta = t;
    }
    for (int i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
    return v;
  };
  for (int it = 1; it <= 600; ++it) {
    VectorXd yk = w + ((it - 1.0) / (it + 2.0)) * (w - w_prev);
    VectorXd grad = V.transpose() * (V * yk - y);
    w_prev = w;
    w = simplex_proj(yk - grad / lip);
    if ((w - w_prev).lpNorm<Eigen::Infinity>() < 1e-14) break;
  }
  return V * w;
}

double VertexHullSet::margin(const VectorXd& y) const {
  // Distance-like margin: 0 inside, Euclidean distance outside.
  return (project(y) - y).norm();
}

// ----------------------------------------------------------- HalfspaceSet

HalfspaceSet::HalfspaceSet(MatrixXd G, VectorXd h) : G_(std::move(G)), h_(std::move(h)) {
  for (int i = 0; i < G_.rows(); ++i) {
    double n = G_.row(i).norm();
    if (n > 0.0) {
      G_.row(i) /= n;
      h_[i] /= n;
    }
  }
}

double HalfspaceSet::margin(const VectorXd& y) const {
  return (G_ * y - h_).maxCoeff();
}

std::pair<double, VectorXd> HalfspaceSet::support(const VectorXd& c) const {
  if (support_fn_) return support_fn_(c);
  throw std::runtime_error("HalfspaceSet: no support oracle attached");
}

VectorXd HalfspaceSet::project(const VectorXd& y) const {
  if (margin(y) <= 0.0) return y;
  const int m = static_cast<int>(G_.rows());
  VectorXd x = y;
  MatrixXd corr = MatrixXd::Zero(m, y.size());
  for (int sweep = 0; sweep < 400; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < m; ++i) {
      VectorXd z = x + corr.row(i).transpose();
      double viol = G_.row(i).dot(z) - h_[i];
      VectorXd xn = (viol > 0.0) ? VectorXd(z - viol * G_.row(i).transpose()) : z;
      corr.row(i) = (z - xn).transpose();
      moved = std::max(moved, (xn - x).lpNorm<Eigen::Infinity>());
      x = xn;
    }
    if (moved < 1e-14 && margin(x) <= 1e-12) break;
  }
  return x;
}

// ------------------------------------------------------------- ProductSet

ProductSet::ProductSet(std::vector<ConvexSetPtr> blocks) : blocks_(std::move(blocks)) {
  dim_ = 0;
  for (const auto& b : blocks_) {
    offsets_.push_back(dim_);
    dim_ += b->dim();
  }
}

double ProductSet::margin(const VectorXd& y) const {
  double m = -kInf;
  for (size_t i = 0; i < blocks_.size(); ++i)
    m = std::max(m, blocks_[i]->margin(y.segment(offsets_[i], blocks_[i]->dim())));
  return m;
}

std::pair<double, VectorXd> ProductSet::support(const VectorXd& c) const {
  VectorXd arg(dim_);
  double val = 0.0;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    auto [v, a] = blocks_[i]->support(c.segment(offsets_[i], blocks_[i]->dim()));
    val += v;
    arg.segment(offsets_[i], blocks_[i]->dim()) = a;
  }
  return {val, arg};
}

VectorXd ProductSet::project(const VectorXd& y) const {
  VectorXd out(dim_);
  for (size_t i = 0; i < blocks_.size(); ++i)
    out.segment(offsets_[i], blocks_[i]->dim()) =
        blocks_[i]->project(y.segment(offsets_[i], blocks_[i]->dim()));
  return out;
}

}  // namespace laxoc
