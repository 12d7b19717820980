#pragma once

#include <string>
#include <vector>

#include "gas/autodiff.hpp"
#include "gas/mlp.hpp"

namespace gas {

enum class OperatorKind { Poisson, DriftDiffusion };

std::string to_string(OperatorKind k);
OperatorKind operator_from_string(const std::string& s);

// Manufactured-solution benchmark on the box [-1,1]^d. The exact solution is
// a sum of Gaussian bumps exp(-c * |x - mu_i|^2); the source follows by
// applying the operator to it analytically.
//
//   Poisson:        L u = -lap(u)
//   DriftDiffusion: L u = -div(u * grad(|x|^2)) + lap(u)
//                       = lap(u) - 2 x . grad(u) - 2 d u
struct PdeProblem {
  std::string name;
  int dim = 2;
  OperatorKind op = OperatorKind::Poisson;
  double sharpness = 1000.0;     // c
  std::vector<Point> centers;
  double half_width = 1.0;       // box [-hw, hw]^d

  static PdeProblem one_peak();    // -lap u = s, peak at (0.5, 0.5)
  static PdeProblem two_peak();    // drift-diffusion, peaks at (+-0.5, +-0.5)
  static PdeProblem nine_peak();   // drift-diffusion, 3x3 lattice of peaks
  static PdeProblem dim10();       // -lap u = s in 10-D, c = 10, peak at 0
  static PdeProblem by_name(const std::string& key);

  bool inside(const Point& x) const;
};

double exact_solution(const PdeProblem& problem, const Point& x);
Eigen::VectorXd exact_gradient(const PdeProblem& problem, const Point& x);

// closed form of L u* (derived analytically, tested against a high-order
// finite-difference application of the operator to u*)
double manufactured_source(const PdeProblem& problem, const Point& x);

// r(x; theta) = L u(x; theta) - s(x), derivatives of u via exact jets
double residual(const PdeProblem& problem, const MlpParams& params, const Point& x);

// u(x; theta) - u*(x); throws if x is not on the boundary (per-coordinate
// tolerance 1e-12)
double boundary_residual(const PdeProblem& problem, const MlpParams& params, const Point& x);

bool on_boundary(const PdeProblem& problem, const Point& x, double tol = 1e-12);

// operator combination used by both the scalar and the batched residual
// paths: r = L u - s from (u, grad u, lap u) at x
double residual_from_parts(const PdeProblem& problem, const Point& x, double u,
                           const Eigen::VectorXd& grad_u, double lap_u);

}  // namespace gas
