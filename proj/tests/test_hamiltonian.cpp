#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "laxoc/hamiltonian.hpp"
#include "laxoc/scenarios.hpp"

#include <random>

using namespace laxoc;

namespace {

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(vals.size());
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Brute-force H over a dense control grid (independent of the closed forms).
double hbar_brute(const ProblemInstance& inst, double s, const VectorXd& x,
                  const VectorXd& p, double q, int res) {
  double best = -kInf;
  for (const auto& a : inst.controls.sample_grid(res)) {
    double v = -p.dot(inst.dynamics.eval(s, x, a)) + q * inst.stage.value(s, x, a);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("eval_hbar: linear objective over an interval") {
  ProblemInstance inst = toy_1d_minmax(0.0);
  VectorXd x = vec({0.0});
  SUBCASE("closed-form hook") {
    auto r = eval_hbar(inst, 0.0, x, 0.0, vec({2.0}), -1.0);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.maximizer[0] == doctest::Approx(-1.0));
  }
  SUBCASE("generic affine-box route agrees") {
    inst.hamiltonian_hook = nullptr;
    auto r = eval_hbar(inst, 0.0, x, 0.0, vec({2.0}), -1.0);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.maximizer[0] == doctest::Approx(-1.0));
  }
}

TEST_CASE("eval_hbar: example-b closed form -2 sum p1 + |p|_1") {
  ProblemInstance inst = gen_example_b(1, 1);
  VectorXd x = inst.initial_state;
  auto r1 = eval_hbar(inst, 0.0, x, 0.0, vec({1.0, 1.0}), -1.0);
  CHECK(r1.value == doctest::Approx(0.0));
  auto r2 = eval_hbar(inst, 0.0, x, 0.0, vec({-1.0, 0.0}), -1.0);
  CHECK(r2.value == doctest::Approx(3.0));
  // maximizer consistency: the returned control attains the value
  double attained = -vec({-1.0, 0.0}).dot(inst.dynamics.eval(0.0, x, r2.maximizer));
  CHECK(attained == doctest::Approx(r2.value));
}

TEST_CASE("eval_h: q = -1 slice") {
  ProblemInstance inst = toy_1d_minmax(0.0);
  CHECK(eval_h(inst, 0.0, vec({0.0}), vec({-3.0})) == doctest::Approx(3.0));
  ProblemInstance lq = toy_lq(0.0);
  CHECK(eval_h(lq, 0.0, vec({0.0}), vec({0.0})) == doctest::Approx(0.0));
}

TEST_CASE("eval_h: example-a closed form at the disturbance peak") {
  ProblemInstance inst = gen_example_a(1, 1);
  VectorXd x = VectorXd::Zero(4);
  // d(0) = 1; p = (0,1,0,0): H = -d + max-term = -1 + 1 = 0
  CHECK(eval_h(inst, 0.0, x, vec({0.0, 1.0, 0.0, 0.0})) == doctest::Approx(0.0));
  // disturbance endpoints d(0) = 1, d(1) = 0 show up through H
  CHECK(eval_h(inst, 1.0, x, vec({0.0, 1.0, 0.0, 0.0})) == doctest::Approx(1.0));
}

TEST_CASE("eval_hbar: example-a hook matches dense sampling") {
  ProblemInstance inst = gen_example_a(1, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    VectorXd x = vec({u(rng), u(rng), u(rng), u(rng)});
    VectorXd p = vec({u(rng), u(rng), u(rng), u(rng)});
    double s = 0.25 * (trial % 8);
    auto r = eval_hbar(inst, s, x, 0.0, p, -1.0);
    double brute = hbar_brute(inst, s, x, p, -1.0, 201);
    CHECK(r.value >= brute - 1e-9);
    CHECK(r.value <= brute + 2e-3);  // grid resolution slack
    double attained = -p.dot(inst.dynamics.eval(s, x, r.maximizer));
    CHECK(attained == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("eval_h_star: zero stage cost is the domain indicator") {
  ProblemInstance inst = toy_1d_minmax(0.0);
  VectorXd x = vec({0.0});
  CHECK(eval_h_star(inst, 0.0, x, vec({0.5})) == doctest::Approx(0.0));
  CHECK(eval_h_star(inst, 0.0, x, vec({2.0})) == kInf);
}

TEST_CASE("eval_h_star: quadratic stage cost against a dense dual grid") {
  ProblemInstance lq = toy_lq(0.0);
  VectorXd x = vec({0.0});
  // brute-force sup_p p b - H(p) with H sampled on a dense grid
  auto hstar_brute = [&](double b) {
    double best = -kInf;
    for (int i = 0; i <= 8000; ++i) {
      double p = -4.0 + 8.0 * i / 8000.0;
      double H = eval_h(lq, 0.0, x, vec({p}));
      best = std::max(best, p * b - H);
    }
    return best;
  };
  CHECK(hstar_brute(0.5) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(eval_h_star(lq, 0.0, x, vec({0.5})) == doctest::Approx(0.25).epsilon(1e-6));
  // sampled-envelope route (hook removed) agrees
  ProblemInstance nohook = toy_lq(0.0);
  nohook.conjugate_hook = nullptr;
  nohook.conjugate_grad_hook = nullptr;
  CHECK(eval_h_star(nohook, 0.0, x, vec({0.5})) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("eval_h_star: nonconvex stage cost takes the envelope value") {
  ProblemInstance cex = toy_nonconvex_stage(0.0);
  VectorXd x = vec({0.0});
  // L^b(b) = (1-b^2)^2 - b/2 has convex envelope -b/2 on [-1, 1]
  CHECK(eval_h_star(cex, 0.0, x, vec({0.4})) == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(eval_h_star(cex, 0.0, x, vec({-1.0})) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(eval_h_star(cex, 0.0, x, vec({1.5})) == kInf);
}

TEST_CASE("eval_h2ti and its conjugate") {
  ProblemInstance drift = toy_1d_drift_minmin(0.0);
  VectorXd x = vec({0.0});
  // H = -2p + |p|; H2TI = max{0, H}
  CHECK(eval_h2ti(drift, x, vec({1.0})) == doctest::Approx(0.0));
  CHECK(eval_h2ti(drift, x, vec({-1.0})) == doctest::Approx(3.0));
  SUBCASE("conjugate vanishes on co({0} u B) and only there") {
    CHECK(eval_h2ti_star(drift, x, vec({0.0})) == doctest::Approx(0.0));
    CHECK(eval_h2ti_star(drift, x, vec({-1.5})) == doctest::Approx(0.0));
    CHECK(eval_h2ti_star(drift, x, vec({-3.0})) == doctest::Approx(0.0));
    CHECK(eval_h2ti_star(drift, x, vec({0.5})) == kInf);
    CHECK(eval_h2ti_star(drift, x, vec({-3.5})) == kInf);
  }
  SUBCASE("example-b points: in B, in the hull, outside") {
    ProblemInstance exb = gen_example_b(1, 1);
    VectorXd xb = exb.initial_state;
    CHECK(eval_h2ti_star(exb, xb, vec({-2.0, 0.0})) == doctest::Approx(0.0));
    CHECK(eval_h2ti_star(exb, xb, vec({-0.5, 0.0})) == doctest::Approx(0.0));
    CHECK(eval_h2ti_star(exb, xb, vec({-0.5, 0.9})) == kInf);
  }
}

TEST_CASE("domain_contains: example-b hull membership with margins") {
  ProblemInstance exb1 = gen_example_b(1, 1);
  ControlImage img = exb1.image(0.0, exb1.initial_state, false);
  auto [in1, m1] = domain_contains(img, vec({-2.0, 0.0}));
  CHECK(in1);
  CHECK(m1 < 0.0);  // interior of B
  auto [in2, m2] = domain_contains(img, vec({-4.0, 0.0}));
  CHECK_FALSE(in2);
  CHECK(m2 > 0.0);

  ProblemInstance exb2 = gen_example_b(2, 1);
  ControlImage hull = exb2.image(0.0, exb2.initial_state, true);
  // coupled inequality b1^1 - 3 b1^2 >= 0 fails: -3 - 3(-0.5) = -1.5 < 0
  auto [in3, m3] = domain_contains(hull, vec({-3.0, 0.0, -0.5, 0.0}));
  CHECK_FALSE(in3);
  CHECK(m3 > 0.0);
  auto [in4, m4] = domain_contains(hull, vec({-1.0, 0.0, -1.0, 0.0}));
  CHECK(in4);
  (void)m4;
}

TEST_CASE("eval_hbar_relaxed: biconjugate identity at q <= 0") {
  SUBCASE("q = -1 reproduces H (toy)") {
    ProblemInstance inst = toy_1d_minmax(0.0);
    VectorXd x = vec({0.0});
    for (double p : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
      double lhs = eval_hbar_relaxed(inst, 0.0, x, 0.0, vec({p}), -1.0);
      CHECK(lhs == doctest::Approx(eval_h(inst, 0.0, x, vec({p}))).epsilon(1e-9));
    }
  }
  SUBCASE("q = 0 is the support function of co(B)") {
    ProblemInstance inst = gen_example_b(1, 1);
    VectorXd x = inst.initial_state;
    for (double p1 : {-1.0, 0.0, 1.0}) {
      for (double p2 : {-1.0, 0.3, 1.0}) {
        double lhs = eval_hbar_relaxed(inst, 0.0, x, 0.0, vec({p1, p2}), 0.0);
        double rhs = eval_hbar(inst, 0.0, x, 0.0, vec({p1, p2}), 0.0).value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("hamiltonian equality breaks for q > 0 on a nonconstant conjugate") {
  ProblemInstance cex = toy_nonconvex_stage(0.0);
  VectorXd x = vec({0.0});
  double worst_gap = 0.0, worst_p = 0.0, worst_q = 0.0;
  for (int i = 0; i <= 20; ++i) {
    double p = -2.0 + 4.0 * i / 20.0;
    for (double q : {0.5, 1.0, 2.0}) {
      double lhs = eval_hbar(cex, 0.0, x, 0.0, vec({p}), q).value;
      double rhs = eval_hbar_relaxed(cex, 0.0, x, 0.0, vec({p}), q);
      CHECK(lhs >= rhs - 1e-9);  // the relaxed side can only undershoot for q > 0
      if (lhs - rhs > worst_gap) {
        worst_gap = lhs - rhs;
        worst_p = p;
        worst_q = q;
      }
    }
  }
  CHECK(worst_gap > 1e-3);
  MESSAGE("counterexample: p=", worst_p, " q=", worst_q, " gap=", worst_gap);
}

TEST_CASE("property: H is convex in p (midpoint check, 200 pairs)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<ProblemInstance> insts;
  insts.push_back(toy_1d_minmax(0.0));
  insts.push_back(toy_lq(0.0));
  insts.push_back(gen_example_a(1, 3));
  insts.push_back(gen_example_b(1, 3));
  for (const auto& inst : insts) {
    VectorXd x = inst.initial_state;
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd p1(inst.state_dim), p2(inst.state_dim);
      for (int i = 0; i < inst.state_dim; ++i) {
        p1[i] = u(rng);
        p2[i] = u(rng);
      }
      double mid = eval_h(inst, 0.3, x, 0.5 * (p1 + p2));
      double avg = 0.5 * (eval_h(inst, 0.3, x, p1) + eval_h(inst, 0.3, x, p2));
      CHECK(mid <= avg + 1e-9);
    }
  }
}

TEST_CASE("property: Fenchel-Young inequality on sampled pairs") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> up(-3.0, 3.0);
  std::uniform_real_distribution<double> ub(-1.0, 1.0);
  ProblemInstance lq = toy_lq(0.0);
  VectorXd x = vec({0.0});
  for (int trial = 0; trial < 300; ++trial) {
    double p = up(rng), b = ub(rng);
    double H = eval_h(lq, 0.0, x, vec({p}));
    double Hs = eval_h_star(lq, 0.0, x, vec({b}));
    CHECK(p * b <= H + Hs + 1e-6);
  }
}

TEST_CASE("property: relaxed Hamiltonian equality for q <= 0 (1000 samples)") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> uq(-2.0, 0.0);
  SUBCASE("example-a pair") {
    ProblemInstance inst = gen_example_a(1, 11);
    for (int trial = 0; trial < 1000; ++trial) {
      VectorXd x = vec({u(rng), u(rng), u(rng), u(rng)});
      VectorXd p = vec({u(rng), u(rng), u(rng), u(rng)});
      double q = uq(rng), s = 0.13 * (trial % 15);
      double lhs = eval_hbar(inst, s, x, 0.0, p, q).value;
      double rhs = eval_hbar_relaxed(inst, s, x, 0.0, p, q);
      CHECK(std::abs(lhs - rhs) <= 1e-6);
    }
  }
  SUBCASE("example-b pair and the time-invariant analogue") {
    ProblemInstance inst = gen_example_b(1, 11);
    VectorXd xb = inst.initial_state;
    for (int trial = 0; trial < 1000; ++trial) {
      VectorXd p = vec({u(rng), u(rng)});
      double q = uq(rng);
      double lhs = eval_hbar(inst, 0.0, xb, 0.0, p, q).value;
      double rhs = eval_hbar_relaxed(inst, 0.0, xb, 0.0, p, q);
      CHECK(std::abs(lhs - rhs) <= 1e-6);
      double lhs_ti = std::max(0.0, lhs);
      double rhs_ti = eval_hbar_relaxed_ti(inst, xb, 0.0, p, q);
      CHECK(std::abs(lhs_ti - rhs_ti) <= 1e-6);
    }
  }
}

TEST_CASE("property: image atoms lie in the hull (witness soundness)") {
  ProblemInstance insts[] = {toy_1d_minmax(0.0), toy_lq(0.0), gen_example_a(1, 23)};
  for (const auto& inst : insts) {
    ControlImage img = inst.image(0.4, inst.initial_state, false);
    auto atoms = image_atoms(inst, 0.4, inst.initial_state, false);
    for (const auto& at : atoms) {
      double m;
      CHECK(img.contains(at.b, 1e-9, &m));
      CHECK(m <= 1e-9);
    }
  }
}
