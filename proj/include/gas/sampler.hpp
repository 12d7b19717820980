#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gas/mlp.hpp"
#include "gas/pde.hpp"

namespace gas {

struct ResidualSample {
  Point x;
  double r = 0.0;
  double mag = 0.0;  // |r|
};

struct GaussianComponent {
  Point mean;
  Eigen::VectorXd variance;  // diagonal, clamped positive
  double weight = 0.0;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;
};

// residuals over the validation cloud, order preserved; autodiff errors are
// rethrown with the offending point index
std::vector<ResidualSample> evaluate_validation_residuals(const MlpParams& params,
                                                          const PdeProblem& problem,
                                                          const std::vector<Point>& validation);

// points of the N_G largest |r|, descending; ties broken by ascending index
std::vector<Point> select_means_top(const std::vector<ResidualSample>& samples, int n_g);

struct LocalMeans {
  std::vector<Point> means;
  bool degenerate_fallback = false;  // all residuals equal: fell back to top-N
  int n_local = 0;                   // how many genuine local maximizers were found
};

// points whose |r| strictly exceeds every one of their k nearest neighbors
// (Euclidean), by |r| descending, truncated to n_g; padded with top picks
// when fewer qualify
LocalMeans select_means_local(const std::vector<ResidualSample>& samples, int n_g,
                              int k_neighbors);

// central finite difference of the residual per axis (one-sided at the
// domain boundary); the exact gradient would need third network derivatives
Eigen::VectorXd residual_input_gradient(const MlpParams& params, const PdeProblem& problem,
                                        const Point& x, double h);

// variance_k = clamp(lambda / |grad_r_k|, var_min, var_max); zero gradient
// components land on var_max
Eigen::VectorXd build_covariance(const Eigen::VectorXd& grad_r, double lambda, double var_min,
                                 double var_max);

// uniform component weights 1/N_G
GaussianMixture build_mixture(const std::vector<Point>& means,
                              const std::vector<Eigen::VectorXd>& variances);

// exactly components * n_per_component points, all inside the box; each draw
// resamples up to 100 times when it lands outside, then clamps coordinates.
// Points are grouped by component in order (component id = index / n_per).
std::vector<Point> sample_mixture(const GaussianMixture& mixture, int n_per_component,
                                  double half_width, std::uint64_t seed);

// sigma = [2 V''(x0)]^{-1/2} with V''(x0) ~= -r'(x0 + eps) / (eps r(x0));
// r' taken by a central difference with step eps/16. Throws when V'' <= 0
// (x0 is not a local maximum of |r|: the mean estimate is bad).
double laplace_sigma_1d(const std::function<double(double)>& r, double x0, double eps);

struct RiskMaxGrid {
  double mu_lo = -1.0, mu_hi = 1.0;
  int n_mu = 101;
  double sigma_lo = 1e-3, sigma_hi = 1.0;
  int n_sigma = 101;
  double x_lo = -2.0, x_hi = 2.0;
  int n_x = 2001;  // quadrature nodes
};

struct RiskMaxResult {
  double mu = 0.0;
  double sigma = 0.0;
  double value = 0.0;
};

// brute-force quadrature of integral r^2(x) N(x | mu, sigma) dx over a
// (mu, sigma >= sigma_floor) grid; test oracle, not used in training
RiskMaxResult risk_maximization_oracle(const std::function<double(double)>& r, double sigma_floor,
                                       const RiskMaxGrid& grid);

}  // namespace gas
