#pragma once

#include <span>

#include "gas/jet.hpp"
#include "gas/mlp.hpp"
#include "gas/tape.hpp"

namespace gas {

// Scalar evaluation paths. These are the reference implementations: simple
// per-layer loops over whatever scalar type T is plugged in (double for
// values, Jet2 for input derivatives, Var / Jet2T<Var> for tape oracles).
// The batched training path in batch_eval.hpp must agree with these.

namespace detail {

template <typename T>
T activate(Activation act, const T& z) {
  switch (act) {
    case Activation::Tanh: return tanh(z);
    case Activation::Identity: return z;
    case Activation::Square: return z * z;
  }
  return tanh(z);
}

// evaluates the network on generic scalars; weights applied as plain doubles
template <typename T>
T eval_layers(const MlpParams& params, std::vector<T> act) {
  const int L = params.n_layers();
  std::vector<T> next;
  for (int l = 0; l < L; ++l) {
    const auto& W = params.p.W[l];
    const auto& b = params.p.b[l];
    next.assign(static_cast<std::size_t>(W.rows()), T{});
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      T z = W(i, 0) * act[0];
      for (Eigen::Index j = 1; j < W.cols(); ++j) z = z + W(i, j) * act[static_cast<std::size_t>(j)];
      z = z + b(i);
      next[static_cast<std::size_t>(i)] = (l + 1 < L) ? activate(params.activation, z) : z;
    }
    act.swap(next);
  }
  return act[0];
}

}  // namespace detail

// u(x; theta); pure and deterministic
double forward(const MlpParams& params, std::span<const double> x);

// (u, du/dx_k, d2u/dx_k2) via second-order forward propagation with the
// input slot k seeded (x_k, 1, 0) and all others (x_j, 0, 0)
Jet2 forward_jet(const MlpParams& params, std::span<const double> x, int axis);

// component k equals forward_jet(params, x, k).d1
Eigen::VectorXd input_gradient(const MlpParams& params, std::span<const double> x);

// sum of forward_jet(params, x, k).d2 over axes; exact, d jet passes
double laplacian(const MlpParams& params, std::span<const double> x);

// Tape-recorded variants for oracles: u as a Var expression of the inputs
// (gradient(u) gives exact d u/d x), and the jet recorded on the tape
// (gradient(jet.d2) gives exact third derivatives d/dx of d2u/dx_k2).
Var forward_on_tape(const MlpParams& params, Tape& tape, const std::vector<Var>& x);
Jet2T<Var> forward_jet_on_tape(const MlpParams& params, Tape& tape, const std::vector<Var>& x,
                               int axis);

}  // namespace gas
