#pragma once

#include "laxoc/problem.hpp"

namespace laxoc {

/// H_bar(s, x, z, p, q) = max_{a in A} -p.f(s,x,a) + q L(s,x,a), with a
/// maximizer. Closed forms for structured control sets; a documented sample
/// grid otherwise (z is carried but unused by the formula).
HbarResult eval_hbar(const ProblemInstance& inst, double s, const VectorXd& x, double z,
                     const VectorXd& p, double q);

/// H(s, x, p) = H_bar(s, x, ., p, -1).
double eval_h(const ProblemInstance& inst, double s, const VectorXd& x, const VectorXd& p);

/// Legendre-Fenchel conjugate H*(s, x, b); +inf outside co(B(s, x)).
double eval_h_star(const ProblemInstance& inst, double s, const VectorXd& x,
                   const VectorXd& b);

/// Time-invariant min-min Hamiltonian max{0, H(x, p)} and its conjugate,
/// finite exactly on co({0} u B(x)).
double eval_h2ti(const ProblemInstance& inst, const VectorXd& x, const VectorXd& p);
double eval_h2ti_star(const ProblemInstance& inst, const VectorXd& x, const VectorXd& b);

/// H_bar_W(s, x, z, p, q) = max_b p.b + q H*(s, x, b) over co(B(s, x)).
double eval_hbar_relaxed(const ProblemInstance& inst, double s, const VectorXd& x,
                         double z, const VectorXd& p, double q);

/// Time-invariant analogue over co({0} u B(x)) with the conjugate of
/// max{0, H}.
double eval_hbar_relaxed_ti(const ProblemInstance& inst, const VectorXd& x, double z,
                            const VectorXd& p, double q);

/// Convex-hull membership with signed margin (negative inside for sets with
/// an inequality description).
std::pair<bool, double> domain_contains(const ControlImage& image, const VectorXd& b,
                                        double tol = 1e-9);

/// The image atoms of an instance at (s, x), from the declared factory or a
/// sample grid over A (witness map a -> b = -f).
std::vector<ImageAtom> image_atoms(const ProblemInstance& inst, double s,
                                   const VectorXd& x, bool include_zero);

}  // namespace laxoc
