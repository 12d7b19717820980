#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "gas/runner.hpp"

namespace {

// --set key=value, repeatable
std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-mixture adaptive sampling for PINN training"};
  app.require_subcommand(1);

  gas::RunOptions opts;
  std::vector<std::string> raw_overrides;
  std::uint64_t seed_value = 0;

  auto* run = app.add_subcommand("run", "train a PINN with adaptive sampling");
  run->add_option("--preset", opts.preset, "builtin preset name");
  run->add_option("--config", opts.config_path, "config file (key = value lines)");
  run->add_option("--out", opts.out_dir, "output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed_value, "override the config seed");
  run->add_option("--threads", opts.threads, "worker cap for batch evaluation");
  run->add_option("--set", raw_overrides, "override a config key (key=value)");

  std::string ck_path, field_out;
  int grid_n = 201;
  auto* field = app.add_subcommand("field", "export u/error/residual on a 2-D lattice");
  field->add_option("--checkpoint", ck_path, "checkpoint JSON")->required();
  field->add_option("--grid", grid_n, "lattice nodes per axis");
  field->add_option("--out", field_out, "output CSV")->required();

  std::vector<std::string> table_presets;
  std::vector<std::uint64_t> budgets;
  std::string table_out;
  auto* table = app.add_subcommand("table", "MSE at |S_Omega| budgets across presets");
  table->add_option("--presets", table_presets, "preset names")->expected(-1);
  table->add_option("--budgets", budgets, "interior-size checkpoints")->expected(-1);
  table->add_option("--out", table_out, "output CSV")->required();
  table->add_option("--threads", opts.threads, "worker cap for batch evaluation");
  table->add_option("--set", raw_overrides, "override a config key (key=value)");
  auto* table_seed_opt = table->add_option("--seed", seed_value, "override the preset seed");

  auto* check = app.add_subcommand("check", "run the numerical self-checks");

  CLI11_PARSE(app, argc, argv);

  try {
    opts.overrides = parse_overrides(raw_overrides);
    if (seed_opt->count() > 0 || table_seed_opt->count() > 0) opts.seed_override = seed_value;

    if (run->parsed()) return gas::cmd_run(opts);
    if (field->parsed()) return gas::cmd_field(ck_path, grid_n, field_out);
    if (table->parsed()) return gas::cmd_table(table_presets, budgets, table_out, opts);
    if (check->parsed()) return gas::cmd_check();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
