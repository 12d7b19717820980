#include "gas/network.hpp"

#include <cmath>
#include <stdexcept>

#include "gas/rng.hpp"

namespace gas {

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd") return OptimizerKind::Sgd;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}

MlpParams init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   Activation activation) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("init_mlp: need at least input and output sizes");
  for (std::size_t i = 0; i < layer_sizes.size(); ++i)
    if (layer_sizes[i] <= 0)
      throw std::invalid_argument("init_mlp: layer size " + std::to_string(i) +
                                  " must be positive");

  Rng rng(seed);
  MlpParams params;
  params.activation = activation;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd W(fan_out, fan_in);
    // row-major fill so the draw order matches the documented layout
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) W(i, j) = rng.uniform(-bound, bound);
    params.p.W.push_back(std::move(W));
    params.p.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return params;
}

AdamState init_optimizer(const MlpParams& params, const OptimizerConfig& cfg) {
  AdamState st;
  st.m = zeros_like(params);
  st.v = zeros_like(params);
  st.step = 0;
  st.cfg = cfg;
  return st;
}

void optimizer_step(MlpParams& params, const ParamBlocks& grad, AdamState& state) {
  if (grad.W.size() != params.p.W.size())
    throw std::invalid_argument("optimizer_step: gradient layer count mismatch");
  if (!grad.all_finite())
    throw std::runtime_error("optimizer_step: non-finite gradient, step refused");

  const OptimizerConfig& c = state.cfg;
  if (c.kind == OptimizerKind::Sgd) {
    state.step += 1;
    for (std::size_t l = 0; l < params.p.W.size(); ++l) {
      params.p.W[l] -= c.lr * grad.W[l];
      params.p.b[l] -= c.lr * grad.b[l];
    }
    return;
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  auto update = [&](auto& m, auto& v, const auto& g, auto& p) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = (c.beta2 * v.array() + (1.0 - c.beta2) * g.array().square()).matrix();
    p.array() -= c.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
  };
  for (std::size_t l = 0; l < params.p.W.size(); ++l) {
    update(state.m.W[l], state.v.W[l], grad.W[l], params.p.W[l]);
    update(state.m.b[l], state.v.b[l], grad.b[l], params.p.b[l]);
  }
}

}  // namespace gas
