#pragma once

#include <string>

#include "gas/mlp.hpp"
#include "gas/pde.hpp"

namespace gas {

// Versioned JSON dump: problem description, layer sizes and parameters
// (row-major weights, in layer order). Doubles round-trip exactly.
void save_checkpoint(const std::string& path, const MlpParams& params, const PdeProblem& problem,
                     int round);

struct Checkpoint {
  MlpParams params;
  PdeProblem problem;
  int round = 0;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace gas
