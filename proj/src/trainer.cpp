#include "gas/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gas/batch_eval.hpp"
#include "gas/checkpoint.hpp"
#include "gas/csv.hpp"
#include "gas/sampler.hpp"

namespace gas {

std::vector<Point> uniform_interior(int n, int dim, double half_width, Rng& rng) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x(k) = rng.uniform(-half_width, half_width);
    pts.push_back(std::move(x));
  }
  return pts;
}

std::vector<Point> uniform_boundary(int n, int dim, double half_width, Rng& rng) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x(k) = rng.uniform(-half_width, half_width);
    // all 2d faces have equal measure
    const std::uint64_t face = rng.below(2 * static_cast<std::uint64_t>(dim));
    const int axis = static_cast<int>(face / 2);
    x(axis) = (face % 2 == 0) ? half_width : -half_width;
    pts.push_back(std::move(x));
  }
  return pts;
}

std::vector<Point> minibatch(const std::vector<Point>& part, int m, Rng& rng) {
  const int n = static_cast<int>(part.size());
  if (m > n)
    throw std::invalid_argument("minibatch: requested " + std::to_string(m) + " of " +
                                std::to_string(n) + " points; grow the dataset first");
  // partial Fisher-Yates: the first m entries are a uniform draw without
  // replacement
  std::vector<int> idx(part.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(part[static_cast<std::size_t>(idx[i])]);
  return out;
}

std::vector<double> train_round(MlpParams& params, AdamState& opt, const Dataset& dataset,
                                const PdeProblem& problem, const GasConfig& cfg, Rng& rng) {
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.n_p));
  for (int epoch = 0; epoch < cfg.n_p; ++epoch) {
    double last = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < cfg.steps_per_epoch; ++j) {
      const Eigen::MatrixXd Xi = pack_points(minibatch(dataset.interior, cfg.m, rng));
      const Eigen::MatrixXd Xb = pack_points(minibatch(dataset.boundary, cfg.m_b, rng));
      try {
        LossGrad lg = loss_param_gradient(params, problem, Xi, Xb, cfg.gamma);
        optimizer_step(params, lg.grad, opt);
        last = lg.loss;
      } catch (const std::exception& e) {
        throw std::runtime_error("train_round: epoch " + std::to_string(epoch) + ": " + e.what());
      }
    }
    trace.push_back(last);
  }
  return trace;
}

void augment_dataset(Dataset& dataset, const std::vector<Point>& new_interior, int round_tag,
                     double boundary_ratio, const PdeProblem& problem, Rng& rng) {
  for (std::size_t i = 0; i < new_interior.size(); ++i)
    if (!problem.inside(new_interior[i]))
      throw std::invalid_argument("augment_dataset: point " + std::to_string(i) +
                                  " lies outside the domain");
  for (const auto& x : new_interior) {
    dataset.interior.push_back(x);
    dataset.interior_round.push_back(round_tag);
  }
  const auto target = static_cast<std::size_t>(
      std::ceil(boundary_ratio * static_cast<double>(dataset.interior.size())));
  if (target > dataset.boundary.size()) {
    const int add = static_cast<int>(target - dataset.boundary.size());
    for (auto& x : uniform_boundary(add, problem.dim, problem.half_width, rng)) {
      dataset.boundary.push_back(std::move(x));
      dataset.boundary_round.push_back(round_tag);
    }
  }
}

namespace {

PdeProblem make_problem(const GasConfig& cfg) {
  PdeProblem problem = PdeProblem::by_name(cfg.problem);
  if (cfg.sharpness > 0.0) problem.sharpness = cfg.sharpness;
  if (cfg.dim > 0 && cfg.dim != problem.dim) {
    if (cfg.problem != "dim10")
      throw std::invalid_argument("dim override is only meaningful for the dim10 problem");
    problem.dim = cfg.dim;
    problem.centers = {Eigen::VectorXd::Zero(cfg.dim)};
  }
  return problem;
}

std::string point_csv(const Point& x) {
  std::string s;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    s += ',';
    s += format_g9(x(k));
  }
  return s;
}

struct ArtifactFiles {
  std::ofstream metrics, sampler_log, added_points;
  bool enabled = false;

  explicit ArtifactFiles(const std::string& out_dir, int dim) {
    if (out_dir.empty()) return;
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "checkpoints");
    metrics.open(fs::path(out_dir) / "metrics.csv");
    sampler_log.open(fs::path(out_dir) / "sampler_log.csv");
    added_points.open(fs::path(out_dir) / "added_points.csv");
    if (!metrics || !sampler_log || !added_points)
      throw std::runtime_error("cannot create artifacts under '" + out_dir + "'");
    metrics << "round,interior,boundary,fns,ans,loss,mse,rel_l2\n";
    std::string mean_cols, var_cols, coord_cols;
    for (int k = 1; k <= dim; ++k) {
      mean_cols += ",mean_x" + std::to_string(k);
      var_cols += ",var_x" + std::to_string(k);
      coord_cols += ",x" + std::to_string(k);
    }
    sampler_log << "round,component_id" << mean_cols << var_cols << ",n_drawn\n";
    added_points << "round" << coord_cols << ",component_id\n";
    enabled = true;
  }
};

}  // namespace

GasRunResult gas_loop(const GasConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const PdeProblem problem = make_problem(cfg);
  const SamplingMode mode = cfg.sampling_mode();
  const double hw = problem.half_width;

  ArtifactFiles files(out_dir, problem.dim);

  GasRunResult result;
  result.params = init_mlp(cfg.layer_sizes(problem.dim), derive_seed(cfg.seed, "init"),
                           activation_from_string(cfg.activation));
  AdamState opt = init_optimizer(result.params, cfg.optimizer_config());

  Dataset& ds = result.dataset;
  {
    Rng rng_i(derive_seed(cfg.seed, "interior0"));
    Rng rng_b(derive_seed(cfg.seed, "boundary0"));
    ds.interior = uniform_interior(cfg.n_r, problem.dim, hw, rng_i);
    ds.interior_round.assign(ds.interior.size(), 0);
    ds.boundary = uniform_boundary(cfg.n_b, problem.dim, hw, rng_b);
    ds.boundary_round.assign(ds.boundary.size(), 0);
  }
  const double boundary_ratio = static_cast<double>(cfg.n_b) / static_cast<double>(cfg.n_r);

  std::vector<Point> validation;
  {
    Rng rng_v(derive_seed(cfg.seed, "validation"));
    validation = uniform_interior(cfg.n_t, problem.dim, hw, rng_v);
  }

  std::vector<std::uint64_t> sizes_so_far;
  result.stop_reason = "rounds_exhausted";

  for (int round = 0; round < cfg.n_a; ++round) {
    if (cfg.resample_validation && round > 0) {
      Rng rng_v(derive_seed(cfg.seed, "validation", static_cast<std::uint64_t>(round)));
      validation = uniform_interior(cfg.n_t, problem.dim, hw, rng_v);
    }

    Rng rng_batch(derive_seed(cfg.seed, "minibatch", static_cast<std::uint64_t>(round)));
    std::vector<double> trace;
    try {
      trace = train_round(result.params, opt, ds, problem, cfg, rng_batch);
    } catch (const std::exception& e) {
      throw std::runtime_error("gas_loop: round " + std::to_string(round) + ": " + e.what());
    }

    const auto residuals = evaluate_validation_residuals(result.params, problem, validation);
    double mean_r2 = 0.0;
    for (const auto& s : residuals) mean_r2 += s.r * s.r;
    mean_r2 /= static_cast<double>(residuals.size());

    RoundMetrics rm;
    rm.round = round;
    rm.interior = ds.interior.size();
    rm.boundary = ds.boundary.size();
    sizes_so_far.push_back(ds.interior.size());
    const auto [fns, ans] = fns_ans(sizes_so_far);
    rm.fns = fns;
    rm.ans = ans;
    rm.loss = trace.empty() ? std::numeric_limits<double>::quiet_NaN() : trace.back();
    rm.mean_val_r2 = mean_r2;
    rm.mse = problem.dim == 2 ? mse_on_grid(result.params, problem, cfg.mse_grid)
                              : std::numeric_limits<double>::quiet_NaN();
    rm.rel_l2 = problem.dim != 2
                    ? relative_l2(result.params, problem, cfg.rel_l2_nodes, cfg.rel_l2_half_width)
                    : std::numeric_limits<double>::quiet_NaN();
    result.rounds.push_back(rm);

    if (files.enabled) {
      files.metrics << rm.round << ',' << rm.interior << ',' << rm.boundary << ',' << rm.fns << ','
                    << rm.ans << ',' << format_g9(rm.loss) << ',' << format_g9(rm.mse) << ','
                    << format_g9(rm.rel_l2) << "\n";
      files.metrics.flush();
      save_checkpoint((std::filesystem::path(out_dir) / "checkpoints" /
                       ("round_" + std::to_string(round) + ".json"))
                          .string(),
                      result.params, problem, round);
    }

    if (mean_r2 <= cfg.eps_stop) {
      result.stop_reason = "eps_stop";
      break;
    }

    // adaptive sampling for round + 1 (every round grows the set; metrics
    // and FNS/ANS count training-time sizes)
    std::vector<Point> new_points;
    std::vector<int> component_of;
    const std::uint64_t mix_seed =
        derive_seed(cfg.seed, "mixture", static_cast<std::uint64_t>(round));
    if (mode == SamplingMode::UniformBaseline) {
      Rng rng_u(mix_seed);
      new_points = uniform_interior(cfg.n_g * cfg.n_per_component, problem.dim, hw, rng_u);
      component_of.assign(new_points.size(), -1);
    } else {
      std::vector<Point> means;
      if (mode == SamplingMode::GasTop) {
        means = select_means_top(residuals, cfg.n_g);
      } else {
        LocalMeans lm = select_means_local(residuals, cfg.n_g, cfg.k_neighbors);
        means = std::move(lm.means);
      }
      std::vector<Eigen::VectorXd> variances;
      variances.reserve(means.size());
      for (const auto& mu : means) {
        const Eigen::VectorXd grad_r = residual_input_gradient(result.params, problem, mu, cfg.h);
        variances.push_back(build_covariance(grad_r, cfg.lambda, cfg.sigma2_min, cfg.sigma2_max));
      }
      const GaussianMixture mixture = build_mixture(means, variances);
      if (files.enabled) {
        for (std::size_t ci = 0; ci < mixture.components.size(); ++ci) {
          const auto& comp = mixture.components[ci];
          files.sampler_log << (round + 1) << ',' << ci << point_csv(comp.mean)
                            << point_csv(comp.variance) << ',' << cfg.n_per_component << "\n";
        }
        files.sampler_log.flush();
      }
      new_points = sample_mixture(mixture, cfg.n_per_component, hw, mix_seed);
      component_of.resize(new_points.size());
      for (std::size_t i = 0; i < new_points.size(); ++i)
        component_of[i] = static_cast<int>(i) / cfg.n_per_component;
    }

    Rng rng_bnd(derive_seed(cfg.seed, "boundary_round", static_cast<std::uint64_t>(round)));
    augment_dataset(ds, new_points, round + 1, boundary_ratio, problem, rng_bnd);

    if (files.enabled) {
      for (std::size_t i = 0; i < new_points.size(); ++i)
        files.added_points << (round + 1) << point_csv(new_points[i]) << ',' << component_of[i]
                           << "\n";
      files.added_points.flush();
    }
  }
  return result;
}

}  // namespace gas
