#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gas/mlp.hpp"
#include "gas/network.hpp"
#include "gas/rng.hpp"

namespace gas::test {

inline std::span<const double> as_span(const Point& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

// single affine layer u = w . x + b (the output layer carries no activation)
inline MlpParams affine_net(const Eigen::VectorXd& w, double b) {
  MlpParams p;
  p.p.W.push_back(w.transpose());
  p.p.b.push_back(Eigen::VectorXd::Constant(1, b));
  return p;
}

inline MlpParams random_net(const std::vector<int>& sizes, std::uint64_t seed) {
  return init_mlp(sizes, seed);
}

inline Point random_point(int dim, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Point x(dim);
  for (int k = 0; k < dim; ++k) x(k) = rng.uniform(lo, hi);
  return x;
}

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(floor, std::abs(want));
}

template <typename A, typename B>
bool same_bits(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace gas::test
