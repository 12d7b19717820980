#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gas/mlp.hpp"

namespace gas {

enum class OptimizerKind { Adam, Sgd };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ParamBlocks m;  // first moments
  ParamBlocks v;  // second moments
  std::int64_t step = 0;
  OptimizerConfig cfg;
};

// Xavier-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases;
// deterministic in the seed. layer_sizes = [d, w1, ..., 1].
MlpParams init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   Activation activation = Activation::Tanh);

AdamState init_optimizer(const MlpParams& params, const OptimizerConfig& cfg);

// one update in place; refuses non-finite gradients
void optimizer_step(MlpParams& params, const ParamBlocks& grad, AdamState& state);

}  // namespace gas
