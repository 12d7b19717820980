#include "gas/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "gas/autodiff.hpp"
#include "gas/batch_eval.hpp"
#include "gas/checkpoint.hpp"
#include "gas/csv.hpp"
#include "gas/metrics.hpp"
#include "gas/network.hpp"
#include "gas/sampler.hpp"
#include "gas/trainer.hpp"

namespace gas {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

GasConfig resolve_config(const RunOptions& opts) {
  if (opts.preset.empty() == opts.config_path.empty())
    throw std::invalid_argument("give exactly one of --preset or --config");
  GasConfig cfg = opts.preset.empty() ? load_config_file(opts.config_path) : preset(opts.preset);
  for (const auto& [key, value] : opts.overrides) apply_override(cfg, key, value);
  if (opts.seed_override) cfg.seed = *opts.seed_override;
  cfg.validate();
  return cfg;
}

int cmd_run(const RunOptions& opts) {
  GasConfig cfg;
  try {
    cfg = resolve_config(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (opts.out_dir.empty()) {
    std::cerr << "error: --out is required\n";
    return 1;
  }
  set_max_threads(opts.threads);

  const std::string started = utc_timestamp();
  GasRunResult result;
  try {
    result = gas_loop(cfg, opts.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::string finished = utc_timestamp();

  namespace fs = std::filesystem;
  nlohmann::json manifest;
  manifest["config"] = serialize_config(cfg);
  manifest["seed"] = cfg.seed;
  manifest["threads"] = opts.threads;
  manifest["started"] = started;
  manifest["finished"] = finished;
  manifest["stop_reason"] = result.stop_reason;
  manifest["out_dir"] = opts.out_dir;
  manifest["artifacts"]["metrics"] = "metrics.csv";
  manifest["artifacts"]["sampler_log"] = "sampler_log.csv";
  manifest["artifacts"]["added_points"] = "added_points.csv";
  auto& ckpts = manifest["artifacts"]["checkpoints"];
  ckpts = nlohmann::json::array();
  for (const auto& rm : result.rounds)
    ckpts.push_back("checkpoints/round_" + std::to_string(rm.round) + ".json");
  std::ofstream mf(fs::path(opts.out_dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";

  const RoundMetrics& last = result.rounds.back();
  std::cout << "run finished (" << result.stop_reason << "): rounds=" << result.rounds.size()
            << " interior=" << last.interior << " loss=" << format_g9(last.loss);
  if (std::isfinite(last.mse)) std::cout << " mse=" << format_g9(last.mse);
  if (std::isfinite(last.rel_l2)) std::cout << " rel_l2=" << format_g9(last.rel_l2);
  std::cout << "\n";
  return 0;
}

int cmd_field(const std::string& checkpoint_path, int grid_n, const std::string& out_csv) {
  try {
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    if (ck.problem.dim != 2)
      throw std::invalid_argument("field: checkpoint is " + std::to_string(ck.problem.dim) +
                                  "-D; the lattice export is 2-D only");
    if (grid_n < 2) throw std::invalid_argument("field: grid_n must be >= 2");

    const double hw = ck.problem.half_width;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(grid_n) * grid_n, 2);
    Eigen::Index row = 0;
    for (int i = 0; i < grid_n; ++i)
      for (int j = 0; j < grid_n; ++j) {
        X(row, 0) = -hw + 2.0 * hw * i / (grid_n - 1);
        X(row, 1) = -hw + 2.0 * hw * j / (grid_n - 1);
        ++row;
      }
    const Eigen::VectorXd u = batch_forward(ck.params, X);
    const Eigen::VectorXd r = batch_residuals(ck.problem, ck.params, X);

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write '" + out_csv + "'");
    out << "x1,x2,u_pred,u_exact,abs_err,residual\n";
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double exact = exact_solution(ck.problem, X.row(i).transpose());
      out << format_g9(X(i, 0)) << ',' << format_g9(X(i, 1)) << ',' << format_g9(u(i)) << ','
          << format_g9(exact) << ',' << format_g9(std::abs(u(i) - exact)) << ','
          << format_g9(r(i)) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_table(const std::vector<std::string>& presets, const std::vector<std::uint64_t>& budgets,
              const std::string& out_csv, const RunOptions& base) {
  std::ofstream out(out_csv);
  if (!out) {
    std::cerr << "error: cannot write '" << out_csv << "'\n";
    return 1;
  }
  out << "strategy,budget,mse\n";
  set_max_threads(base.threads);
  for (const auto& name : presets) {
    GasConfig cfg;
    try {
      RunOptions opts = base;
      opts.preset = name;
      opts.config_path.clear();
      cfg = resolve_config(opts);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    GasRunResult result;
    try {
      result = gas_loop(cfg, "");
    } catch (const std::exception& e) {
      std::cerr << "error: preset " << name << ": " << e.what() << "\n";
      return 1;
    }
    for (const std::uint64_t budget : budgets) {
      const RoundMetrics* found = nullptr;
      for (const auto& rm : result.rounds)
        if (rm.interior == budget) found = &rm;
      if (found == nullptr) {
        std::cerr << "error: preset " << name << " never trains with |S_Omega| = " << budget
                  << "\n";
        return 1;
      }
      out << name << ',' << budget << ',' << format_g9(found->mse) << "\n";
    }
  }
  return 0;
}

namespace {

bool report(const char* what, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << ": " << detail << "\n";
  return ok;
}

}  // namespace

int cmd_check() {
  bool all = true;

  // gradient of J_N against a central finite difference along a random
  // direction
  {
    const PdeProblem problem = PdeProblem::one_peak();
    const MlpParams params = init_mlp({2, 16, 16, 16, 1}, 42);
    Rng rng(7);
    Eigen::MatrixXd Xi(32, 2), Xb(16, 2);
    for (Eigen::Index i = 0; i < Xi.rows(); ++i)
      for (int k = 0; k < 2; ++k) Xi(i, k) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index i = 0; i < Xb.rows(); ++i) {
      Xb(i, 0) = rng.uniform(-1.0, 1.0);
      Xb(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    const LossGrad lg = loss_param_gradient(params, problem, Xi, Xb, 1.0);
    ParamBlocks dir = zeros_like(params);
    for (auto& W : dir.W)
      for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = rng.uniform(-1.0, 1.0);
    for (auto& b : dir.b)
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-1.0, 1.0);
    const double h = 1e-5;
    MlpParams plus = params, minus = params;
    plus.p.axpy(h, dir);
    minus.p.axpy(-h, dir);
    const double fd = (loss_value(plus, problem, Xi, Xb, 1.0) -
                       loss_value(minus, problem, Xi, Xb, 1.0)) /
                      (2.0 * h);
    const double an = lg.grad.dot(dir);
    const double rel = std::abs(fd - an) / std::max(1e-12, std::abs(fd));
    all &= report("loss gradient vs finite differences", rel < 1e-6,
                  "relative error " + format_g9(rel));
  }

  // Laplacian against second central differences
  {
    const MlpParams params = init_mlp({2, 16, 16, 1}, 3);
    const Point x = Eigen::Vector2d(0.3, -0.2);
    const std::span<const double> xs(x.data(), 2);
    const double lap = laplacian(params, xs);
    const double h = 1e-4;
    double fd = 0.0;
    for (int k = 0; k < 2; ++k) {
      Point xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      fd += (forward(params, std::span<const double>(xp.data(), 2)) - 2.0 * forward(params, xs) +
             forward(params, std::span<const double>(xm.data(), 2))) /
            (h * h);
    }
    const double rel = std::abs(fd - lap) / std::max(1e-12, std::abs(lap));
    all &= report("laplacian vs finite differences", rel < 1e-5,
                  "relative error " + format_g9(rel));
  }

  // Laplace sigma on a known Gaussian bump
  {
    const double a = 0.5;
    const auto r = [a](double x) { return std::exp(-(x - 0.2) * (x - 0.2) / (2.0 * a * a)); };
    const double sigma = laplace_sigma_1d(r, 0.2, 1e-3);
    const double expect = a / std::sqrt(2.0);
    const double err = std::abs(sigma - expect);
    all &= report("laplace sigma on gaussian residual", err < 1e-3 * a,
                  "sigma " + format_g9(sigma) + " expected " + format_g9(expect));
  }

  // risk maximization oracle: argmax at (x0, a) under the sigma >= a floor
  {
    const double a = 0.2, x0 = 0.3;
    const auto r = [&](double x) { return std::exp(-(x - x0) * (x - x0) / (2.0 * a * a)); };
    RiskMaxGrid grid;
    grid.sigma_lo = a;
    grid.sigma_hi = 1.0;
    const RiskMaxResult res = risk_maximization_oracle(r, a, grid);
    const double cell_mu = (grid.mu_hi - grid.mu_lo) / (grid.n_mu - 1);
    const double cell_sigma = (grid.sigma_hi - grid.sigma_lo) / (grid.n_sigma - 1);
    const bool ok = std::abs(res.mu - x0) <= cell_mu + 1e-12 &&
                    std::abs(res.sigma - a) <= cell_sigma + 1e-12;
    all &= report("risk maximization oracle", ok,
                  "argmax (" + format_g9(res.mu) + ", " + format_g9(res.sigma) + ") expected (" +
                      format_g9(x0) + ", " + format_g9(a) + ")");
  }

  return all ? 0 : 1;
}

}  // namespace gas
