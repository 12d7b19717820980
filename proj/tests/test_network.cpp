#include <doctest.h>

#include <cmath>

#include "gas/network.hpp"
#include <limits>

#include "test_helpers.hpp"

using namespace gas;
using gas::test::same_bits;

TEST_SUITE_BEGIN("network");

TEST_CASE("init: deterministic in the seed") {
  const MlpParams a = init_mlp({2, 16, 16, 1}, 7);
  const MlpParams b = init_mlp({2, 16, 16, 1}, 7);
  for (std::size_t l = 0; l < a.p.W.size(); ++l) {
    CHECK(same_bits(a.p.W[l], b.p.W[l]));
    CHECK(same_bits(a.p.b[l], b.p.b[l]));
  }
  const MlpParams c = init_mlp({2, 16, 16, 1}, 8);
  CHECK(!same_bits(a.p.W[0], c.p.W[0]));
}

TEST_CASE("init: the paper's 2-D architecture has seven weight matrices") {
  const MlpParams p = init_mlp({2, 32, 32, 32, 32, 32, 32, 1}, 1);
  CHECK(p.p.W.size() == 7);
  CHECK(p.input_dim() == 2);
  CHECK(p.output_dim() == 1);
  CHECK(p.layer_sizes() == std::vector<int>{2, 32, 32, 32, 32, 32, 32, 1});
}

TEST_CASE("init: xavier bound holds per layer, biases start at zero") {
  const MlpParams p = init_mlp({3, 20, 5, 1}, 21);
  const std::vector<int> sizes = {3, 20, 5, 1};
  for (std::size_t l = 0; l < p.p.W.size(); ++l) {
    const double bound = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
    CHECK(p.p.W[l].cwiseAbs().maxCoeff() <= bound);
    CHECK(p.p.b[l].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("init: rejects bad layer lists") {
  CHECK_THROWS_AS((void)init_mlp({}, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)init_mlp({2}, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)init_mlp({2, 0, 1}, 1), std::invalid_argument);
}

TEST_CASE("adam: zero gradient leaves parameters numerically unchanged") {
  MlpParams p = init_mlp({2, 8, 1}, 3);
  const MlpParams before = p;
  AdamState st = init_optimizer(p, {});
  const ParamBlocks g = zeros_like(p);
  for (int t = 0; t < 3; ++t) optimizer_step(p, g, st);
  for (std::size_t l = 0; l < p.p.W.size(); ++l) {
    CHECK(same_bits(p.p.W[l], before.p.W[l]));
    CHECK(same_bits(p.p.b[l], before.p.b[l]));
  }
  CHECK(st.step == 3);
}

TEST_CASE("adam: constant gradient drives the parameter monotonically down") {
  MlpParams p = init_mlp({1, 1}, 5);
  AdamState st = init_optimizer(p, {});
  ParamBlocks g = zeros_like(p);
  g.W[0](0, 0) = 2.5;
  double prev = p.p.W[0](0, 0);
  for (int t = 0; t < 50; ++t) {
    optimizer_step(p, g, st);
    CHECK(p.p.W[0](0, 0) < prev);
    prev = p.p.W[0](0, 0);
  }
}

TEST_CASE("adam: quadratic bowl converges to the minimum") {
  // f(theta) = theta^2, closed-form gradient 2 theta
  MlpParams p = init_mlp({1, 1}, 9);
  p.p.W[0](0, 0) = 1.0;
  OptimizerConfig cfg;
  cfg.lr = 1e-2;
  AdamState st = init_optimizer(p, cfg);
  ParamBlocks g = zeros_like(p);
  for (int t = 0; t < 5000; ++t) {
    g.W[0](0, 0) = 2.0 * p.p.W[0](0, 0);
    optimizer_step(p, g, st);
  }
  CHECK(std::abs(p.p.W[0](0, 0)) < 1e-4);
}

TEST_CASE("optimizer: same inputs give the same outputs") {
  const MlpParams p0 = init_mlp({2, 8, 1}, 11);
  ParamBlocks g = zeros_like(p0);
  for (auto& W : g.W) W.setConstant(0.125);

  MlpParams pa = p0, pb = p0;
  AdamState sa = init_optimizer(pa, {});
  AdamState sb = init_optimizer(pb, {});
  for (int t = 0; t < 10; ++t) {
    optimizer_step(pa, g, sa);
    optimizer_step(pb, g, sb);
  }
  for (std::size_t l = 0; l < pa.p.W.size(); ++l) {
    CHECK(same_bits(pa.p.W[l], pb.p.W[l]));
    CHECK(pa.p.W[l].rows() == p0.p.W[l].rows());  // shapes preserved
    CHECK(pa.p.W[l].cols() == p0.p.W[l].cols());
  }
  CHECK(sa.step == sb.step);
}

TEST_CASE("optimizer: refuses non-finite gradients") {
  MlpParams p = init_mlp({2, 4, 1}, 13);
  const MlpParams before = p;
  AdamState st = init_optimizer(p, {});
  ParamBlocks g = zeros_like(p);
  g.W[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(optimizer_step(p, g, st), std::runtime_error);
  CHECK(same_bits(p.p.W[0], before.p.W[0]));  // step refused, nothing moved
  CHECK(st.step == 0);
}

TEST_CASE("sgd: plain update rule") {
  MlpParams p = init_mlp({1, 1}, 15);
  const double w0 = p.p.W[0](0, 0);
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::Sgd;
  cfg.lr = 0.1;
  AdamState st = init_optimizer(p, cfg);
  ParamBlocks g = zeros_like(p);
  g.W[0](0, 0) = 3.0;
  optimizer_step(p, g, st);
  CHECK(p.p.W[0](0, 0) == doctest::Approx(w0 - 0.3).epsilon(1e-15));
}

TEST_SUITE_END();
