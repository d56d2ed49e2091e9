#pragma once

#include "laxoc/problem.hpp"

#include <cstdint>

namespace laxoc {

/// Multi-robot formation hold under a horizontal disturbance (min-max class):
/// 4 states per robot, acceleration magnitude/angle controls, disturbance
/// d(s) = 0.5 (1 + cos pi s), constraints x1 <= 5.2 and x2 >= 0 per robot.
/// Initial positions sit on the goal formation; velocities are drawn uniform
/// in [-0.5, 0.5] from the seed.
ProblemInstance gen_example_a(int robots, std::uint64_t seed);

/// Time-invariant min-min formation problem: 2 states per robot with a +2
/// horizontal drift, box controls, constraints x1 <= 5 and x2 >= 0. Initial
/// states are the goal formation perturbed uniformly in a +-0.1 box.
ProblemInstance gen_example_b(int robots, std::uint64_t seed);

/// Example-B initial-state perturbation radius (a run-metadata convention,
/// recorded in manifests).
constexpr double kExampleBPerturbation = 0.1;

/// 1D min-max toy: f = a on [-1, 1], L = 0, g = |x|, c = x - 2, T = 1.
ProblemInstance toy_1d_minmax(double x0);

/// 1D time-invariant min-min toy with drift: f = a + 2, g = |x - 1|,
/// optional position cap c = x - cap (default 5, inactive), T = 1.
ProblemInstance toy_1d_drift_minmin(double x0, double cap = 5.0);

/// Linear-quadratic min-max toy: f = a, L = a^2, g = x^2, c = -1; the
/// conjugate H*(b) = b^2 on [-1, 1] is attached in closed form.
ProblemInstance toy_lq(double x0);

/// Nonconvex-stage toy whose conjugate envelope is nonconstant:
/// L(a) = (1 - a^2)^2 + a/2, so H*(b) = -b/2 on [-1, 1]. Exercises the
/// sampled-envelope route and the q > 0 Hamiltonian gap.
ProblemInstance toy_nonconvex_stage(double x0);

}  // namespace laxoc
