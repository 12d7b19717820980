#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gas/mlp.hpp"
#include "gas/pde.hpp"

namespace gas {

struct RoundMetrics {
  int round = 0;
  std::uint64_t interior = 0;   // |S_Omega| used for this round's training
  std::uint64_t boundary = 0;
  std::uint64_t fns = 0;        // distinct samples to date
  std::uint64_t ans = 0;        // accumulated samples over rounds to date
  double loss = 0.0;            // terminal J_N of the round
  double mean_val_r2 = 0.0;     // mean squared residual on the validation set
  double mse = 0.0;             // 2-D lattice MSE (nan when d != 2)
  double rel_l2 = 0.0;          // near-origin relative L2 (nan when d == 2)
};

// mean of (u_theta - u*)^2 over a uniform grid_n x grid_n lattice on the
// box; 2-D problems only
double mse_on_grid(const MlpParams& params, const PdeProblem& problem, int grid_n);

// ||u_theta - u*||_2 / ||u*||_2 over a tensor lattice with n_t nodes per
// axis on [-half_width, half_width]^d
double relative_l2(const MlpParams& params, const PdeProblem& problem, int n_t,
                   double half_width);

// FNS = final |S_Omega|, ANS = running sum of per-round |S_Omega|; sizes
// must be nondecreasing
std::pair<std::uint64_t, std::uint64_t> fns_ans(const std::vector<std::uint64_t>& per_round_sizes);

}  // namespace gas
