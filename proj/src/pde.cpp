#include "gas/pde.hpp"

#include <cmath>

namespace gas {

std::string to_string(OperatorKind k) {
  return k == OperatorKind::Poisson ? "poisson" : "drift_diffusion";
}

OperatorKind operator_from_string(const std::string& s) {
  if (s == "poisson") return OperatorKind::Poisson;
  if (s == "drift_diffusion") return OperatorKind::DriftDiffusion;
  throw std::invalid_argument("unknown operator '" + s + "'");
}

PdeProblem PdeProblem::one_peak() {
  PdeProblem p;
  p.name = "one_peak";
  p.dim = 2;
  p.op = OperatorKind::Poisson;
  p.sharpness = 1000.0;
  p.centers = {Eigen::Vector2d(0.5, 0.5)};
  return p;
}

PdeProblem PdeProblem::two_peak() {
  PdeProblem p;
  p.name = "two_peak";
  p.dim = 2;
  p.op = OperatorKind::DriftDiffusion;
  p.sharpness = 1000.0;
  p.centers = {Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(-0.5, -0.5)};
  return p;
}

PdeProblem PdeProblem::nine_peak() {
  PdeProblem p;
  p.name = "nine_peak";
  p.dim = 2;
  p.op = OperatorKind::DriftDiffusion;
  p.sharpness = 1000.0;
  // (a_i, b_i) = (-0.5, -0.5) + (mod(i,3)/2, 0) + (0, floor(i/3)/2), the
  // lattice {-0.5, 0, 0.5}^2
  for (int i = 0; i < 9; ++i)
    p.centers.push_back(Eigen::Vector2d(-0.5 + (i % 3) / 2.0, -0.5 + (i / 3) / 2.0));
  return p;
}

PdeProblem PdeProblem::dim10() {
  PdeProblem p;
  p.name = "dim10";
  p.dim = 10;
  p.op = OperatorKind::Poisson;
  p.sharpness = 10.0;
  p.centers = {Eigen::VectorXd::Zero(10)};
  return p;
}

PdeProblem PdeProblem::by_name(const std::string& key) {
  if (key == "one_peak") return one_peak();
  if (key == "two_peak") return two_peak();
  if (key == "nine_peak") return nine_peak();
  if (key == "dim10") return dim10();
  throw std::invalid_argument("unknown problem '" + key + "'");
}

bool PdeProblem::inside(const Point& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (std::abs(x(k)) > half_width) return false;
  return true;
}

double exact_solution(const PdeProblem& problem, const Point& x) {
  double u = 0.0;
  for (const auto& mu : problem.centers)
    u += std::exp(-problem.sharpness * (x - mu).squaredNorm());
  return u;
}

Eigen::VectorXd exact_gradient(const PdeProblem& problem, const Point& x) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (const auto& mu : problem.centers) {
    const double phi = std::exp(-problem.sharpness * (x - mu).squaredNorm());
    g += (-2.0 * problem.sharpness * phi) * (x - mu);
  }
  return g;
}

double manufactured_source(const PdeProblem& problem, const Point& x) {
  const double c = problem.sharpness;
  const double d = static_cast<double>(problem.dim);
  double s = 0.0;
  // per bump phi = exp(-c r2):
  //   lap(phi)        = (4 c^2 r2 - 2 c d) phi
  //   -2 x . grad(phi) =  4 c x.(x - mu)   phi
  for (const auto& mu : problem.centers) {
    const double r2 = (x - mu).squaredNorm();
    const double phi = std::exp(-c * r2);
    const double lap = (4.0 * c * c * r2 - 2.0 * c * d) * phi;
    if (problem.op == OperatorKind::Poisson) {
      s += -lap;
    } else {
      const double xdot = x.dot(x - mu);
      s += (4.0 * c * xdot - 2.0 * d) * phi + lap;
    }
  }
  return s;
}

double residual_from_parts(const PdeProblem& problem, const Point& x, double u,
                           const Eigen::VectorXd& grad_u, double lap_u) {
  const double s = manufactured_source(problem, x);
  if (problem.op == OperatorKind::Poisson) return -lap_u - s;
  return lap_u - 2.0 * x.dot(grad_u) - 2.0 * static_cast<double>(problem.dim) * u - s;
}

double residual(const PdeProblem& problem, const MlpParams& params, const Point& x) {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  if (problem.op == OperatorKind::Poisson) {
    // the operator only needs the Hessian trace
    return -laplacian(params, xs) - manufactured_source(problem, x);
  }
  double u = 0.0;
  double lap = 0.0;
  Eigen::VectorXd grad(x.size());
  for (int k = 0; k < problem.dim; ++k) {
    const Jet2 j = forward_jet(params, xs, k);
    if (k == 0) u = j.v;
    grad(k) = j.d1;
    lap += j.d2;
  }
  return residual_from_parts(problem, x, u, grad, lap);
}

bool on_boundary(const PdeProblem& problem, const Point& x, double tol) {
  bool on_face = false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = std::abs(x(k));
    if (a > problem.half_width + tol) return false;
    if (std::abs(a - problem.half_width) <= tol) on_face = true;
  }
  return on_face;
}

double boundary_residual(const PdeProblem& problem, const MlpParams& params, const Point& x) {
  if (!on_boundary(problem, x))
    throw std::invalid_argument("boundary_residual: point is not on the domain boundary");
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  return forward(params, xs) - exact_solution(problem, x);
}

}  // namespace gas
