#pragma once

#include "laxoc/types.hpp"

#include <memory>
#include <optional>

namespace laxoc {

/// Compact convex set with the operations the solver and the hull
/// membership checks need. Margins are <= 0 inside whenever the set has an
/// inequality description; vertex-hull sets report a distance-like margin
/// that is 0 on the inside.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;
  virtual int dim() const = 0;
  /// Signed membership margin (<= 0 means inside, up to rounding).
  virtual double margin(const VectorXd& y) const = 0;
  /// max_{y in set} c.y together with a maximizer.
  virtual std::pair<double, VectorXd> support(const VectorXd& c) const = 0;
  /// Euclidean projection onto the set.
  virtual VectorXd project(const VectorXd& y) const = 0;
  virtual const std::vector<VectorXd>* vertices() const { return nullptr; }
};

using ConvexSetPtr = std::shared_ptr<const ConvexSet>;

class BoxSet final : public ConvexSet {
 public:
  BoxSet(VectorXd lo, VectorXd hi);
  int dim() const override { return static_cast<int>(lo_.size()); }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;
  const VectorXd& lo() const { return lo_; }
  const VectorXd& hi() const { return hi_; }

 private:
  VectorXd lo_, hi_;
};

class BallSet final : public ConvexSet {
 public:
  BallSet(VectorXd center, double radius);
  int dim() const override { return static_cast<int>(center_.size()); }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;

 private:
  VectorXd center_;
  double radius_;
};

/// 2D intersection of a ball with a symmetric slab on the second coordinate:
/// { w : ||w - (cx, 0)|| <= radius, |w_y| <= half_height }.
class StadiumSet final : public ConvexSet {
 public:
  StadiumSet(double cx, double radius, double half_height);
  int dim() const override { return 2; }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;

 private:
  double cx_, r_, h_;
};

/// Convex hull of an explicit vertex list. Membership goes through a small
/// linear feasibility problem, projection through an accelerated projected
/// gradient over the simplex weights.
class VertexHullSet final : public ConvexSet {
 public:
  explicit VertexHullSet(std::vector<VectorXd> verts);
  int dim() const override { return dim_; }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;
  const std::vector<VectorXd>* vertices() const override { return &verts_; }

 private:
  std::vector<VectorXd> verts_;
  int dim_;
};

/// Polyhedron { y : G y <= h }. Projection by Dykstra's alternating
/// projections over the half-spaces. An optional support override supplies a
/// closed form when the generic route (vertex enumeration) is unavailable.
class HalfspaceSet final : public ConvexSet {
 public:
  HalfspaceSet(MatrixXd G, VectorXd h);
  int dim() const override { return static_cast<int>(G_.cols()); }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;
  void set_support_fn(std::function<std::pair<double, VectorXd>(const VectorXd&)> fn) {
    support_fn_ = std::move(fn);
  }

 private:
  MatrixXd G_;  // rows normalized on construction
  VectorXd h_;
  std::function<std::pair<double, VectorXd>(const VectorXd&)> support_fn_;
};

/// Product of lower-dimensional blocks, each an independent convex set.
class ProductSet final : public ConvexSet {
 public:
  explicit ProductSet(std::vector<ConvexSetPtr> blocks);
  int dim() const override { return dim_; }
  double margin(const VectorXd& y) const override;
  std::pair<double, VectorXd> support(const VectorXd& c) const override;
  VectorXd project(const VectorXd& y) const override;
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const ConvexSet& block(int i) const { return *blocks_[i]; }

 private:
  std::vector<ConvexSetPtr> blocks_;
  std::vector<int> offsets_;
  int dim_;
};

}  // namespace laxoc
