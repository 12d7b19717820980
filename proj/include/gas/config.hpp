#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gas/mlp.hpp"
#include "gas/network.hpp"

namespace gas {

enum class SamplingMode { GasTop, GasLocal, UniformBaseline };

std::string to_string(SamplingMode m);
SamplingMode sampling_mode_from_string(const std::string& s);

// One flat bag of knobs for a whole run. File format is `key = value` lines
// (# comments); every key mirrors a field here, see config.cpp for the list.
struct GasConfig {
  std::string problem = "one_peak";
  int dim = 0;              // 0 = problem default
  double sharpness = 0.0;   // 0 = problem default

  int hidden_layers = 6;
  int width = 32;
  std::string activation = "tanh";

  int n_r = 500;            // initial interior points
  int n_b = 200;            // initial boundary points
  int n_p = 3000;           // epochs per round
  int n_a = 10;             // adaptive rounds
  int n_g = 20;             // mixture components
  int n_per_component = 25;
  int m = 500;              // interior batch
  int m_b = 200;            // boundary batch
  int steps_per_epoch = 1;

  double gamma = 1.0;       // boundary penalty
  double lambda = 1.0;      // covariance scale
  std::string mode = "gas_t";
  double sigma2_min = 1e-6;
  double sigma2_max = 0.25;
  double h = 1e-4;          // finite-difference step for grad r
  int k_neighbors = 10;
  int n_t = 20000;          // validation cloud size
  bool resample_validation = false;

  std::string optimizer = "adam";
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  std::uint64_t seed = 1;
  double eps_stop = 1e-9;

  int mse_grid = 201;
  int rel_l2_nodes = 3;
  double rel_l2_half_width = 0.1;

  std::vector<int> layer_sizes(int problem_dim) const;
  SamplingMode sampling_mode() const { return sampling_mode_from_string(mode); }
  OptimizerConfig optimizer_config() const;

  // throws listing every invalid field
  void validate() const;
};

// Parse `key = value` text. Collects every unknown key and unparsable value
// into one error message.
GasConfig parse_config(const std::string& text);
GasConfig load_config_file(const std::string& path);

// canonical snapshot: every key, fixed order, round-trips through parse
std::string serialize_config(const GasConfig& cfg);

// set one key (same names as the file format); throws on unknown key or bad
// value
void apply_override(GasConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> preset_names();
GasConfig preset(const std::string& name);

}  // namespace gas
