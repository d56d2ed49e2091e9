#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "laxoc/control_image.hpp"
#include "laxoc/lp.hpp"

#include <random>

using namespace laxoc;

namespace {
VectorXd v2(double a, double b) { return (VectorXd(2) << a, b).finished(); }
}  // namespace

TEST_CASE("simplex: basic feasible LP with duals") {
  // min x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0  -> x = (1, 0)
  MatrixXd A(1, 2);
  A << 1.0, 1.0;
  VectorXd b(1), c(2);
  b << 1.0;
  c << 1.0, 2.0;
  LpResult r = solve_lp(A, b, c);
  REQUIRE(r.feasible);
  CHECK(r.objective == doctest::Approx(1.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
  CHECK(r.dual[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex: infeasible system reports positive infeasibility") {
  MatrixXd A(2, 1);
  A << 1.0, 1.0;
  VectorXd b(2), c(1);
  b << 1.0, 2.0;  // x = 1 and x = 2 cannot both hold
  c << 1.0;
  LpResult r = solve_lp(A, b, c);
  CHECK_FALSE(r.feasible);
  CHECK(r.infeasibility > 0.1);
}

TEST_CASE("simplex: random convex-combination recovery") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3, m = 9;
    MatrixXd pts(n, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) pts(i, j) = 2.0 * u(rng) - 1.0;
    VectorXd w(m);
    for (int j = 0; j < m; ++j) w[j] = u(rng);
    w /= w.sum();
    VectorXd target = pts * w;
    MatrixXd A(n + 1, m);
    A.topRows(n) = pts;
    A.row(n).setOnes();
    VectorXd b(n + 1);
    b.head(n) = target;
    b[n] = 1.0;
    LpResult r = solve_lp(A, b, VectorXd::Zero(m));
    REQUIRE(r.feasible);
    CHECK((pts * r.x - target).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(std::abs(r.x.sum() - 1.0) < 1e-9);
    int support = 0;
    for (int j = 0; j < m; ++j)
      if (r.x[j] > 1e-12) ++support;
    CHECK(support <= n + 1);  // basic solution
  }
}

TEST_CASE("lower envelope: chord under a bump, domain edges") {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 100; ++i) {
    double b = -1.0 + 0.02 * i;
    xs.push_back(b);
    vs.push_back((1.0 - b * b) * (1.0 - b * b) - 0.5 * b);
  }
  LowerEnvelope1D env(xs, vs);
  CHECK(env.value(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(env.value(0.5) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(env.value(-0.8) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(env.value(1.4) == kInf);
  CHECK(env.slope(0.3) == doctest::Approx(-0.5));
}

TEST_CASE("box and ball supports and projections") {
  BoxSet box(v2(-1.0, -2.0), v2(3.0, 2.0));
  auto [bv, ba] = box.support(v2(1.0, -1.0));
  CHECK(bv == doctest::Approx(5.0));
  CHECK(ba[0] == 3.0);
  CHECK(ba[1] == -2.0);
  CHECK(box.margin(v2(0.0, 0.0)) < 0.0);
  CHECK(box.margin(v2(4.0, 0.0)) == doctest::Approx(1.0));
  CHECK((box.project(v2(4.0, 5.0)) - v2(3.0, 2.0)).norm() == doctest::Approx(0.0));

  BallSet ball(v2(1.0, 0.0), 2.0);
  auto [sv, sa] = ball.support(v2(0.0, 1.0));
  CHECK(sv == doctest::Approx(2.0));
  CHECK(sa[1] == doctest::Approx(2.0));
  CHECK(ball.margin(v2(1.0, 2.0)) == doctest::Approx(0.0));
}

TEST_CASE("stadium set: support and projection against sampling") {
  StadiumSet st(-0.7, 1.0, 0.5);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd c = v2(u(rng), u(rng));
    // dense sample of the feasible set
    double best = -kInf;
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; j <= 200; ++j) {
        VectorXd y = v2(-0.7 - 1.0 + 2.0 * i / 200.0, -0.5 + 1.0 * j / 200.0);
        if (st.margin(y) <= 1e-12) best = std::max(best, c.dot(y));
      }
    }
    auto [val, arg] = st.support(c);
    CHECK(val >= best - 1e-9);
    CHECK(val <= best + 0.03 * c.norm());  // sampling resolution slack
    CHECK(st.margin(arg) <= 1e-9);
  }
  for (int trial = 0; trial < 300; ++trial) {
    VectorXd y = v2(u(rng), u(rng));
    VectorXd p = st.project(y);
    CHECK(st.margin(p) <= 1e-9);
    // no strictly better feasible point on a coarse sweep
    double d = (p - y).norm();
    for (int i = 0; i <= 60; ++i)
      for (int j = 0; j <= 60; ++j) {
        VectorXd q = v2(-1.7 + 2.0 * i / 60.0, -0.5 + 1.0 * j / 60.0);
        if (st.margin(q) <= 0.0) CHECK((q - y).norm() >= d - 1e-6);
      }
  }
}

TEST_CASE("vertex hull: membership margin and projection") {
  std::vector<VectorXd> verts = {v2(0.0, 0.0), v2(1.0, 0.0), v2(0.0, 1.0)};
  VertexHullSet hull(verts);
  CHECK(hull.margin(v2(0.25, 0.25)) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hull.margin(v2(1.0, 1.0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  VectorXd p = hull.project(v2(1.0, 1.0));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("scaled box hull matches the vertex-hull description") {
  // co({0} u ([-3,-1] x [-1,1])^R) for R = 2: pairwise inequalities vs the
  // hull of {0} and the 16 product-box vertices
  const int R = 2;
  ConvexSetPtr hs = make_scaled_box_hull(R, -3.0, -1.0, 1.0);
  std::vector<VectorXd> verts;
  verts.push_back(VectorXd::Zero(4));
  for (int c = 0; c < 16; ++c) {
    VectorXd v(4);
    for (int r = 0; r < 2; ++r) {
      v[2 * r] = ((c >> (2 * r)) & 1) ? -3.0 : -1.0;
      v[2 * r + 1] = ((c >> (2 * r + 1)) & 1) ? -1.0 : 1.0;
    }
    verts.push_back(v);
  }
  VertexHullSet ref(verts);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked_inside = 0, checked_outside = 0;
  for (int trial = 0; trial < 400; ++trial) {
    VectorXd y(4);
    if (trial % 2 == 0) {
      // scaled representation theta * c is inside by construction
      double theta = u(rng);
      for (int r = 0; r < 2; ++r) {
        y[2 * r] = theta * (-3.0 + 2.0 * u(rng));
        y[2 * r + 1] = theta * (-1.0 + 2.0 * u(rng));
      }
      CHECK(hs->margin(y) <= 1e-9);
      ++checked_inside;
    } else {
      for (int i = 0; i < 4; ++i) y[i] = -4.0 + 8.0 * u(rng);
      bool in_ref = ref.margin(y) <= 1e-7;
      bool in_hs = hs->margin(y) <= 1e-7;
      if (in_ref != in_hs && ref.margin(y) > 1e-4 && hs->margin(y) > 1e-4) continue;
      if (std::abs(ref.margin(y)) < 1e-4 || std::abs(hs->margin(y)) < 1e-4) continue;
      CHECK(in_ref == in_hs);
      ++checked_outside;
    }
  }
  CHECK(checked_inside > 100);
  CHECK(checked_outside > 50);

  // the coupled-inequality counterexample: b1 = (-3, 0), b2 = (-0.5, 0)
  VectorXd bad(4);
  bad << -3.0, 0.0, -0.5, 0.0;
  CHECK(hs->margin(bad) > 0.0);
  VectorXd good(4);
  good << -2.0, 0.0, -2.0, 0.0;
  CHECK(hs->margin(good) <= 0.0);

  // projection lands inside
  VectorXd proj = hs->project(bad);
  CHECK(hs->margin(proj) <= 1e-9);
}

TEST_CASE("scaled box hull support equals max{0, box support}") {
  ConvexSetPtr hs = make_scaled_box_hull(2, -3.0, -1.0, 1.0);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BoxSet agent(v2(-3.0, -1.0), v2(-1.0, 1.0));
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd p(4);
    for (int i = 0; i < 4; ++i) p[i] = u(rng);
    double expect = agent.support(p.head(2)).first + agent.support(p.tail(2)).first;
    expect = std::max(0.0, expect);
    auto [val, arg] = hs->support(p);
    CHECK(val == doctest::Approx(expect).epsilon(1e-12));
    CHECK(hs->margin(arg) <= 1e-9);
  }
}
