#include "gas/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "gas/batch_eval.hpp"

namespace gas {

double mse_on_grid(const MlpParams& params, const PdeProblem& problem, int grid_n) {
  if (problem.dim != 2)
    throw std::invalid_argument("mse_on_grid: defined for 2-D problems only (got d = " +
                                std::to_string(problem.dim) + ")");
  if (grid_n < 2) throw std::invalid_argument("mse_on_grid: grid_n must be >= 2");

  const double hw = problem.half_width;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(grid_n) * grid_n, 2);
  Eigen::Index row = 0;
  for (int i = 0; i < grid_n; ++i) {
    const double x1 = -hw + 2.0 * hw * i / (grid_n - 1);
    for (int j = 0; j < grid_n; ++j) {
      X(row, 0) = x1;
      X(row, 1) = -hw + 2.0 * hw * j / (grid_n - 1);
      ++row;
    }
  }
  const Eigen::VectorXd u = batch_forward(params, X);
  double acc = 0.0;  // fixed, index-ordered reduction
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double diff = u(i) - exact_solution(problem, X.row(i).transpose());
    acc += diff * diff;
  }
  return acc / static_cast<double>(u.size());
}

double relative_l2(const MlpParams& params, const PdeProblem& problem, int n_t,
                   double half_width) {
  if (n_t < 1) throw std::invalid_argument("relative_l2: n_t must be >= 1");
  const int d = problem.dim;
  std::uint64_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::uint64_t>(n_t);

  Eigen::MatrixXd X(static_cast<Eigen::Index>(total), d);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rem = idx;
    for (int k = 0; k < d; ++k) {
      const int node = static_cast<int>(rem % static_cast<std::uint64_t>(n_t));
      rem /= static_cast<std::uint64_t>(n_t);
      X(static_cast<Eigen::Index>(idx), k) =
          n_t == 1 ? 0.0 : -half_width + 2.0 * half_width * node / (n_t - 1);
    }
  }
  const Eigen::VectorXd u = batch_forward(params, X);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double ex = exact_solution(problem, X.row(i).transpose());
    num += (u(i) - ex) * (u(i) - ex);
    den += ex * ex;
  }
  if (den == 0.0) throw std::runtime_error("relative_l2: exact solution vanishes on the lattice");
  return std::sqrt(num / den);
}

std::pair<std::uint64_t, std::uint64_t> fns_ans(
    const std::vector<std::uint64_t>& per_round_sizes) {
  if (per_round_sizes.empty()) throw std::invalid_argument("fns_ans: no rounds");
  std::uint64_t ans = 0;
  for (std::size_t i = 0; i < per_round_sizes.size(); ++i) {
    if (i > 0 && per_round_sizes[i] < per_round_sizes[i - 1])
      throw std::invalid_argument("fns_ans: per-round sizes must be nondecreasing");
    ans += per_round_sizes[i];
  }
  return {per_round_sizes.back(), ans};
}

}  // namespace gas
