#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gas/config.hpp"
#include "gas/metrics.hpp"
#include "gas/mlp.hpp"
#include "gas/network.hpp"
#include "gas/pde.hpp"
#include "gas/rng.hpp"

namespace gas {

// Collocation sets with round-of-origin tags. Points are only ever appended:
// older rounds keep training on everything drawn so far, which is what
// realizes the incremental density rho_{k+1} = a rho_old + (1-a) rho_add.
struct Dataset {
  std::vector<Point> interior;
  std::vector<int> interior_round;
  std::vector<Point> boundary;
  std::vector<int> boundary_round;
};

std::vector<Point> uniform_interior(int n, int dim, double half_width, Rng& rng);
std::vector<Point> uniform_boundary(int n, int dim, double half_width, Rng& rng);

// uniform draw without replacement; m may equal the part size (then it is a
// permutation). Throws when m exceeds the part size: grow the dataset first.
std::vector<Point> minibatch(const std::vector<Point>& part, int m, Rng& rng);

// n_epochs optimizer steps (steps_per_epoch batches each); returns the
// per-epoch J_N trace. Non-finite losses abort with the epoch index.
std::vector<double> train_round(MlpParams& params, AdamState& opt, const Dataset& dataset,
                                const PdeProblem& problem, const GasConfig& cfg, Rng& rng);

// appends new interior points (must lie inside the box) with the given round
// tag, then tops up the boundary set until |S_b| >= ceil(ratio * |S_i|)
void augment_dataset(Dataset& dataset, const std::vector<Point>& new_interior, int round_tag,
                     double boundary_ratio, const PdeProblem& problem, Rng& rng);

struct GasRunResult {
  MlpParams params;
  std::vector<RoundMetrics> rounds;
  Dataset dataset;
  std::string stop_reason;  // "rounds_exhausted" or "eps_stop"
};

// The outer loop: train -> validate residuals -> pick means -> build the
// mixture -> draw -> grow the dataset, for n_rounds or until the validation
// mean r^2 drops below eps_stop. When out_dir is nonempty, writes per-round
// checkpoints plus metrics.csv / sampler_log.csv / added_points.csv there.
GasRunResult gas_loop(const GasConfig& cfg, const std::string& out_dir = "");

}  // namespace gas
