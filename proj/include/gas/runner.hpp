#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gas/config.hpp"

namespace gas {

struct RunOptions {
  std::string preset;       // exactly one of preset / config_path
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  std::vector<std::pair<std::string, std::string>> overrides;  // key, value
};

GasConfig resolve_config(const RunOptions& opts);

// full run: gas_loop plus manifest.json; nonzero on any error, and config
// errors are reported before any artifact is created
int cmd_run(const RunOptions& opts);

// lattice CSV (x1, x2, u_pred, u_exact, abs_err, residual) from a 2-D
// checkpoint, row-major over a grid_n x grid_n lattice
int cmd_field(const std::string& checkpoint_path, int grid_n, const std::string& out_csv);

// runs each preset and emits one (strategy, budget, mse) row per budget
int cmd_table(const std::vector<std::string>& presets, const std::vector<std::uint64_t>& budgets,
              const std::string& out_csv, const RunOptions& base);

// quick numerical self-checks (gradient, Laplacian, Laplace sigma, risk-max
// oracle); prints one line each, nonzero if any fails
int cmd_check();

}  // namespace gas
