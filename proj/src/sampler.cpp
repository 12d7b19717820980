#include "gas/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gas/batch_eval.hpp"
#include "gas/rng.hpp"

namespace gas {

std::vector<ResidualSample> evaluate_validation_residuals(const MlpParams& params,
                                                          const PdeProblem& problem,
                                                          const std::vector<Point>& validation) {
  if (validation.empty())
    throw std::invalid_argument("evaluate_validation_residuals: empty validation set");
  const Eigen::VectorXd r = batch_residuals(problem, params, pack_points(validation));
  std::vector<ResidualSample> out(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i)
    out[i] = {validation[i], r(static_cast<Eigen::Index>(i)),
              std::abs(r(static_cast<Eigen::Index>(i)))};
  return out;
}

namespace {

// indices sorted by |r| descending, ties by ascending index
std::vector<int> order_by_magnitude(const std::vector<ResidualSample>& samples) {
  std::vector<int> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return samples[static_cast<std::size_t>(a)].mag > samples[static_cast<std::size_t>(b)].mag;
  });
  return idx;
}

}  // namespace

std::vector<Point> select_means_top(const std::vector<ResidualSample>& samples, int n_g) {
  if (static_cast<int>(samples.size()) < n_g)
    throw std::invalid_argument("select_means_top: need at least " + std::to_string(n_g) +
                                " samples, got " + std::to_string(samples.size()));
  const std::vector<int> idx = order_by_magnitude(samples);
  std::vector<Point> means;
  means.reserve(static_cast<std::size_t>(n_g));
  for (int i = 0; i < n_g; ++i) means.push_back(samples[static_cast<std::size_t>(idx[i])].x);
  return means;
}

LocalMeans select_means_local(const std::vector<ResidualSample>& samples, int n_g,
                              int k_neighbors) {
  const int n = static_cast<int>(samples.size());
  if (n <= k_neighbors)
    throw std::invalid_argument("select_means_local: need more samples than neighbors");
  if (n < n_g)
    throw std::invalid_argument("select_means_local: need at least n_g samples");

  LocalMeans out;
  const std::vector<int> idx = order_by_magnitude(samples);

  // degenerate field: every candidate ties with its neighbors
  if (samples[static_cast<std::size_t>(idx.front())].mag ==
      samples[static_cast<std::size_t>(idx.back())].mag) {
    out.means = select_means_top(samples, n_g);
    out.degenerate_fallback = true;
    return out;
  }

  // walk candidates in |r| order; a point qualifies when it strictly beats
  // all of its k nearest neighbors
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<int> taken;
  for (int c : idx) {
    if (static_cast<int>(taken.size()) == n_g) break;
    const ResidualSample& cand = samples[static_cast<std::size_t>(c)];
    for (int j = 0; j < n; ++j)
      dist[static_cast<std::size_t>(j)] =
          (j == c) ? std::numeric_limits<double>::infinity()
                   : (samples[static_cast<std::size_t>(j)].x - cand.x).squaredNorm();
    // the k nearest neighbors of the candidate
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + k_neighbors, order.end(),
                     [&](int a, int b) {
                       const double da = dist[static_cast<std::size_t>(a)];
                       const double db = dist[static_cast<std::size_t>(b)];
                       return da != db ? da < db : a < b;
                     });
    bool is_max = true;
    for (int t = 0; t < k_neighbors; ++t)
      if (samples[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])].mag >= cand.mag) {
        is_max = false;
        break;
      }
    if (is_max) taken.push_back(c);
  }
  out.n_local = static_cast<int>(taken.size());

  // pad with top-ranked points not already chosen
  if (static_cast<int>(taken.size()) < n_g) {
    for (int c : idx) {
      if (static_cast<int>(taken.size()) == n_g) break;
      if (std::find(taken.begin(), taken.end(), c) == taken.end()) taken.push_back(c);
    }
  }
  out.means.reserve(taken.size());
  for (int c : taken) out.means.push_back(samples[static_cast<std::size_t>(c)].x);
  return out;
}

Eigen::VectorXd residual_input_gradient(const MlpParams& params, const PdeProblem& problem,
                                        const Point& x, double h) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd g(d);
  for (int k = 0; k < d; ++k) {
    Point xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    const bool plus_ok = std::abs(xp(k)) <= problem.half_width;
    const bool minus_ok = std::abs(xm(k)) <= problem.half_width;
    if (plus_ok && minus_ok) {
      g(k) = (residual(problem, params, xp) - residual(problem, params, xm)) / (2.0 * h);
    } else if (plus_ok) {
      g(k) = (residual(problem, params, xp) - residual(problem, params, x)) / h;
    } else {
      g(k) = (residual(problem, params, x) - residual(problem, params, xm)) / h;
    }
  }
  return g;
}

Eigen::VectorXd build_covariance(const Eigen::VectorXd& grad_r, double lambda, double var_min,
                                 double var_max) {
  if (lambda <= 0.0) throw std::invalid_argument("build_covariance: lambda must be positive");
  Eigen::VectorXd var(grad_r.size());
  for (Eigen::Index k = 0; k < grad_r.size(); ++k) {
    const double g = std::abs(grad_r(k));
    const double v = g == 0.0 ? var_max : lambda / g;
    var(k) = std::clamp(v, var_min, var_max);
  }
  return var;
}

GaussianMixture build_mixture(const std::vector<Point>& means,
                              const std::vector<Eigen::VectorXd>& variances) {
  if (means.empty()) throw std::invalid_argument("build_mixture: no components");
  if (means.size() != variances.size())
    throw std::invalid_argument("build_mixture: means/variances length mismatch");
  GaussianMixture mix;
  const double w = 1.0 / static_cast<double>(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    mix.components.push_back({means[i], variances[i], w});
  return mix;
}

std::vector<Point> sample_mixture(const GaussianMixture& mixture, int n_per_component,
                                  double half_width, std::uint64_t seed) {
  if (n_per_component < 1)
    throw std::invalid_argument("sample_mixture: n_per_component must be >= 1");
  Rng rng(seed);
  std::vector<Point> pts;
  pts.reserve(mixture.components.size() * static_cast<std::size_t>(n_per_component));
  for (const auto& comp : mixture.components) {
    const Eigen::VectorXd sigma = comp.variance.array().sqrt();
    for (int i = 0; i < n_per_component; ++i) {
      Point x(comp.mean.size());
      for (int attempt = 0; attempt < 100; ++attempt) {
        for (Eigen::Index k = 0; k < x.size(); ++k)
          x(k) = comp.mean(k) + sigma(k) * rng.normal();
        if (x.cwiseAbs().maxCoeff() <= half_width) break;
      }
      // a draw still outside after 100 attempts is clamped to the box so the
      // per-component count stays exact
      x = x.cwiseMax(-half_width).cwiseMin(half_width);
      pts.push_back(std::move(x));
    }
  }
  return pts;
}

double laplace_sigma_1d(const std::function<double(double)>& r, double x0, double eps) {
  const double r0 = r(x0);
  if (r0 == 0.0) throw std::invalid_argument("laplace_sigma_1d: r(x0) must be nonzero");
  const double delta = eps / 16.0;
  const double rp = (r(x0 + eps + delta) - r(x0 + eps - delta)) / (2.0 * delta);
  const double v2 = -rp / (eps * r0);
  if (!(v2 > 0.0))
    throw std::runtime_error("laplace_sigma_1d: V'' <= 0, x0 is not a local maximum");
  return 1.0 / std::sqrt(2.0 * v2);
}

RiskMaxResult risk_maximization_oracle(const std::function<double(double)>& r, double sigma_floor,
                                       const RiskMaxGrid& grid) {
  // quadrature nodes and r^2 evaluated once
  std::vector<double> xs(static_cast<std::size_t>(grid.n_x));
  std::vector<double> r2(static_cast<std::size_t>(grid.n_x));
  const double dx = (grid.x_hi - grid.x_lo) / (grid.n_x - 1);
  for (int i = 0; i < grid.n_x; ++i) {
    xs[static_cast<std::size_t>(i)] = grid.x_lo + dx * i;
    const double v = r(xs[static_cast<std::size_t>(i)]);
    r2[static_cast<std::size_t>(i)] = v * v;
  }

  RiskMaxResult best;
  best.value = -std::numeric_limits<double>::infinity();
  const double inv_sqrt2pi = 0.3989422804014326779399461;
  for (int si = 0; si < grid.n_sigma; ++si) {
    const double sigma =
        grid.sigma_lo + (grid.sigma_hi - grid.sigma_lo) * si / std::max(grid.n_sigma - 1, 1);
    if (sigma < sigma_floor || sigma <= 0.0) continue;
    for (int mi = 0; mi < grid.n_mu; ++mi) {
      const double mu =
          grid.mu_lo + (grid.mu_hi - grid.mu_lo) * mi / std::max(grid.n_mu - 1, 1);
      // trapezoid rule over the x grid
      double acc = 0.0;
      for (int i = 0; i < grid.n_x; ++i) {
        const double z = (xs[static_cast<std::size_t>(i)] - mu) / sigma;
        const double dens = inv_sqrt2pi / sigma * std::exp(-0.5 * z * z);
        const double w = (i == 0 || i == grid.n_x - 1) ? 0.5 : 1.0;
        acc += w * r2[static_cast<std::size_t>(i)] * dens;
      }
      acc *= dx;
      if (acc > best.value) best = {mu, sigma, acc};
    }
  }
  if (!std::isfinite(best.value))
    throw std::invalid_argument("risk_maximization_oracle: empty (mu, sigma) grid");
  return best;
}

}  // namespace gas
