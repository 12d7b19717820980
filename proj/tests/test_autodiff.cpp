#include <doctest.h>

#include <cmath>

#include "gas/autodiff.hpp"
#include "gas/batch_eval.hpp"
#include "gas/network.hpp"
#include "gas/pde.hpp"
#include "gas/rng.hpp"
#include "test_helpers.hpp"

using namespace gas;
using gas::test::affine_net;
using gas::test::as_span;
using gas::test::random_point;
using gas::test::rel_err;

namespace {

// independent oracle: plain Eigen matrix arithmetic, no shared code with the
// library evaluation paths
double forward_oracle(const MlpParams& p, const Point& x) {
  Eigen::VectorXd a = x;
  for (int l = 0; l < p.n_layers(); ++l) {
    Eigen::VectorXd z = p.p.W[static_cast<std::size_t>(l)] * a + p.p.b[static_cast<std::size_t>(l)];
    a = (l + 1 < p.n_layers()) ? z.array().tanh().matrix() : z;
  }
  return a(0);
}

// u(x) = tanh(x1): hidden layer picks x1, output passes it through
MlpParams tanh_x1_net() {
  MlpParams p;
  Eigen::MatrixXd W1(1, 2);
  W1 << 1.0, 0.0;
  p.p.W.push_back(W1);
  p.p.b.push_back(Eigen::VectorXd::Zero(1));
  p.p.W.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  p.p.b.push_back(Eigen::VectorXd::Zero(1));
  return p;
}

// u(x) = x1^2 + x2^2 via the square activation
MlpParams sum_of_squares_net() {
  MlpParams p;
  p.activation = Activation::Square;
  p.p.W.push_back(Eigen::MatrixXd::Identity(2, 2));
  p.p.b.push_back(Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd W2(1, 2);
  W2 << 1.0, 1.0;
  p.p.W.push_back(W2);
  p.p.b.push_back(Eigen::VectorXd::Zero(1));
  return p;
}

// u(x) = x1^2
MlpParams x1_squared_net() {
  MlpParams p;
  p.activation = Activation::Square;
  Eigen::MatrixXd W1(1, 2);
  W1 << 1.0, 0.0;
  p.p.W.push_back(W1);
  p.p.b.push_back(Eigen::VectorXd::Zero(1));
  p.p.W.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  p.p.b.push_back(Eigen::VectorXd::Zero(1));
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("autodiff");

TEST_CASE("forward: affine identity-weight layer realizes x1 + x2") {
  const MlpParams p = affine_net(Eigen::Vector2d(1.0, 1.0), 0.0);
  const Point x = Eigen::Vector2d(1.0, 2.0);
  CHECK(forward(p, as_span(x)) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("forward: zero-weight network returns the final bias") {
  MlpParams p = init_mlp({2, 8, 8, 1}, 1);
  for (auto& W : p.p.W) W.setZero();
  p.p.b.back()(0) = -0.75;
  const Point x = Eigen::Vector2d(0.3, -0.9);
  CHECK(forward(p, as_span(x)) == -0.75);
}

TEST_CASE("forward: random 6x32 net matches the matrix-arithmetic oracle") {
  const MlpParams p = init_mlp({2, 32, 32, 32, 32, 32, 32, 1}, 99);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Point x = random_point(2, rng);
    const double want = forward_oracle(p, x);
    CHECK(std::abs(forward(p, as_span(x)) - want) < 1e-12);
  }
}

TEST_CASE("forward: dimension mismatch names the offending layer") {
  const MlpParams p = init_mlp({3, 4, 1}, 1);
  const Point x = Eigen::Vector2d(0.0, 0.0);
  CHECK_THROWS_WITH_AS(forward(p, as_span(x)),
                       doctest::Contains("layer 0"), std::invalid_argument);
}

TEST_CASE("forward_jet: u = tanh(x1) at the origin gives (0, 1, 0)") {
  const MlpParams p = tanh_x1_net();
  const Point x = Eigen::Vector2d(0.0, 0.7);
  const Jet2 j = forward_jet(p, as_span(x), 0);
  CHECK(j.v == doctest::Approx(0.0));
  CHECK(j.d1 == doctest::Approx(1.0));
  CHECK(j.d2 == doctest::Approx(0.0));  // tanh'' vanishes at 0 by odd symmetry
}

TEST_CASE("forward_jet: affine function has zero curvature on every axis") {
  const MlpParams p = affine_net(Eigen::Vector3d(0.5, -2.0, 3.0), 1.25);
  Rng rng(11);
  const Point x = random_point(3, rng);
  for (int k = 0; k < 3; ++k) {
    const Jet2 j = forward_jet(p, as_span(x), k);
    CHECK(j.d2 == 0.0);
    CHECK(j.d1 == doctest::Approx(p.p.W[0](0, k)));
  }
}

TEST_CASE("forward_jet: axis out of range") {
  const MlpParams p = init_mlp({2, 4, 1}, 1);
  const Point x = Eigen::Vector2d(0.0, 0.0);
  CHECK_THROWS_AS((void)forward_jet(p, as_span(x), 2), std::invalid_argument);
  CHECK_THROWS_AS((void)forward_jet(p, as_span(x), -1), std::invalid_argument);
}

TEST_CASE("forward_jet: derivatives match central finite differences") {
  const MlpParams p = init_mlp({3, 24, 24, 24, 1}, 17);
  Rng rng(23);
  const double h = 1e-4;
  for (int t = 0; t < 10; ++t) {
    const Point x = random_point(3, rng);
    for (int k = 0; k < 3; ++k) {
      Point xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double up = forward(p, as_span(xp));
      const double um = forward(p, as_span(xm));
      const double u0 = forward(p, as_span(x));
      const Jet2 j = forward_jet(p, as_span(x), k);
      CHECK(rel_err(j.d1, (up - um) / (2 * h), 1e-6) < 1e-5);
      // the plain second difference itself carries ~eps/h^2 = 1e-8 of noise,
      // hence the absolute floor
      CHECK(rel_err(j.d2, (up - 2 * u0 + um) / (h * h), 1e-2) < 1e-5);
    }
  }
}

TEST_CASE("input_gradient: u = x1^2 gives (2 x1, 0)") {
  const MlpParams p = x1_squared_net();
  const Point x = Eigen::Vector2d(3.0, -1.0);
  const Eigen::VectorXd g = input_gradient(p, as_span(x));
  CHECK(g(0) == doctest::Approx(6.0));
  CHECK(g(1) == 0.0);
}

TEST_CASE("input_gradient: constant network has zero gradient") {
  MlpParams p = init_mlp({2, 6, 1}, 2);
  for (auto& W : p.p.W) W.setZero();
  p.p.b.back()(0) = 4.0;
  const Point x = Eigen::Vector2d(0.2, 0.4);
  CHECK(input_gradient(p, as_span(x)).norm() == 0.0);
}

TEST_CASE("input_gradient: matches finite differences") {
  const MlpParams p = init_mlp({2, 32, 32, 1}, 31);
  Rng rng(37);
  const double h = 1e-5;
  for (int t = 0; t < 10; ++t) {
    const Point x = random_point(2, rng);
    const Eigen::VectorXd g = input_gradient(p, as_span(x));
    for (int k = 0; k < 2; ++k) {
      Point xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (forward(p, as_span(xp)) - forward(p, as_span(xm))) / (2 * h);
      CHECK(rel_err(g(k), fd, 1e-8) < 1e-6);
    }
  }
}

TEST_CASE("laplacian: affine network gives exactly zero") {
  const MlpParams p = affine_net(Eigen::Vector2d(2.0, -1.0), 0.5);
  const Point x = Eigen::Vector2d(0.1, -0.6);
  CHECK(laplacian(p, as_span(x)) == 0.0);
}

TEST_CASE("laplacian: u = x1^2 + x2^2 gives 4 everywhere") {
  const MlpParams p = sum_of_squares_net();
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const Point x = random_point(2, rng);
    CHECK(laplacian(p, as_span(x)) == doctest::Approx(4.0).epsilon(1e-13));
  }
}

TEST_CASE("laplacian: 10-D random net matches second central differences") {
  const MlpParams p = init_mlp({10, 32, 32, 32, 1}, 41);
  Rng rng(43);
  const double h = 1e-4;
  for (int t = 0; t < 5; ++t) {
    const Point x = random_point(10, rng);
    double fd = 0.0;
    const double u0 = forward(p, as_span(x));
    for (int k = 0; k < 10; ++k) {
      Point xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      fd += (forward(p, as_span(xp)) - 2 * u0 + forward(p, as_span(xm))) / (h * h);
    }
    CHECK(rel_err(laplacian(p, as_span(x)), fd, 1e-6) < 1e-5);
  }
}

TEST_CASE("jet chain rule: composed tanh layers equal the closed-form jet") {
  // f(x) = tanh(a x + b), g = tanh(c f + d); compare against analytic
  // derivatives of the composition
  const double a = 0.8, b = -0.3, c = 1.7, d = 0.2, x0 = 0.45;
  Jet2 x{x0, 1.0, 0.0};
  const Jet2 f = tanh(a * x + b);
  const Jet2 g = tanh(c * f + d);

  const double t1 = std::tanh(a * x0 + b);
  const double f1 = a * (1 - t1 * t1);                     // f'
  const double f2 = a * a * (-2 * t1 * (1 - t1 * t1));     // f''
  const double t2 = std::tanh(c * t1 + d);
  const double g1 = (1 - t2 * t2) * c * f1;
  const double g2 = -2 * t2 * (1 - t2 * t2) * (c * f1) * (c * f1) + (1 - t2 * t2) * c * f2;
  CHECK(g.v == doctest::Approx(t2).epsilon(1e-14));
  CHECK(g.d1 == doctest::Approx(g1).epsilon(1e-14));
  CHECK(g.d2 == doctest::Approx(g2).epsilon(1e-13));
}

TEST_CASE("jet exp matches analytic derivatives") {
  Jet2 x{0.3, 1.0, 0.0};
  const Jet2 e = exp(square(x));  // exp(x^2)
  const double v = std::exp(0.09);
  CHECK(e.v == doctest::Approx(v).epsilon(1e-14));
  CHECK(e.d1 == doctest::Approx(2 * 0.3 * v).epsilon(1e-14));
  CHECK(e.d2 == doctest::Approx((4 * 0.09 + 2) * v).epsilon(1e-14));
}

TEST_CASE("determinism: identical inputs give bit-identical outputs") {
  const MlpParams p = init_mlp({2, 32, 32, 1}, 7);
  const Point x = Eigen::Vector2d(0.123456789, -0.987654321);
  CHECK(forward(p, as_span(x)) == forward(p, as_span(x)));
  const Jet2 j1 = forward_jet(p, as_span(x), 1);
  const Jet2 j2 = forward_jet(p, as_span(x), 1);
  CHECK(j1.v == j2.v);
  CHECK(j1.d1 == j2.d1);
  CHECK(j1.d2 == j2.d2);
}

TEST_CASE("batched path agrees with the scalar path") {
  const MlpParams p = init_mlp({2, 32, 32, 32, 1}, 53);
  const PdeProblem problem = PdeProblem::one_peak();
  Rng rng(59);
  Eigen::MatrixXd X(40, 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) X.row(i) = random_point(2, rng).transpose();
  const Eigen::VectorXd u = batch_forward(p, X);
  const Eigen::VectorXd r = batch_residuals(problem, p, X);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Point x = X.row(i).transpose();
    CHECK(std::abs(u(i) - forward(p, as_span(x))) < 1e-12);
    CHECK(std::abs(r(i) - residual(problem, p, x)) < 1e-9);
  }
}

namespace {

// shared by the FD checks below
double directional_fd(const MlpParams& params, const PdeProblem& problem,
                      const Eigen::MatrixXd& Xi, const Eigen::MatrixXd& Xb, double gamma,
                      const ParamBlocks& dir, double h) {
  MlpParams plus = params, minus = params;
  plus.p.axpy(h, dir);
  minus.p.axpy(-h, dir);
  return (loss_value(plus, problem, Xi, Xb, gamma) - loss_value(minus, problem, Xi, Xb, gamma)) /
         (2 * h);
}

ParamBlocks random_direction(const MlpParams& params, Rng& rng) {
  ParamBlocks dir = zeros_like(params);
  for (auto& W : dir.W)
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = rng.uniform(-1.0, 1.0);
  for (auto& b : dir.b)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-1.0, 1.0);
  const double inv = 1.0 / std::sqrt(dir.dot(dir));
  for (auto& W : dir.W) W *= inv;
  for (auto& b : dir.b) b *= inv;
  return dir;
}

Eigen::MatrixXd boundary_points(int n, int dim, Rng& rng) {
  Eigen::MatrixXd X(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) X(i, k) = rng.uniform(-1.0, 1.0);
    const int axis = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
    X(i, axis) = rng.below(2) == 0 ? 1.0 : -1.0;
  }
  return X;
}

}  // namespace

TEST_CASE("loss gradient: vanishing interior residual leaves the boundary term") {
  // affine net has zero Laplacian; far from the peak the source underflows
  // to exactly zero, so the whole interior term vanishes and the gradient
  // must be homogeneous in gamma
  const PdeProblem problem = PdeProblem::one_peak();
  const MlpParams p = affine_net(Eigen::Vector2d(0.4, -0.2), 0.1);
  Rng rng(61);
  Eigen::MatrixXd Xi(16, 2);
  for (Eigen::Index i = 0; i < Xi.rows(); ++i) {
    Xi(i, 0) = rng.uniform(-1.0, -0.6);
    Xi(i, 1) = rng.uniform(-1.0, -0.6);
  }
  const Eigen::MatrixXd Xb = boundary_points(12, 2, rng);

  const LossGrad g1 = loss_param_gradient(p, problem, Xi, Xb, 1.0);
  const LossGrad g2 = loss_param_gradient(p, problem, Xi, Xb, 2.0);
  CHECK(g1.grad.dot(g1.grad) > 0.0);  // the boundary term itself is live
  for (std::size_t l = 0; l < g1.grad.W.size(); ++l) {
    CHECK((g2.grad.W[l] - 2.0 * g1.grad.W[l]).norm() == 0.0);
    CHECK((g2.grad.b[l] - 2.0 * g1.grad.b[l]).norm() == 0.0);
  }
}

TEST_CASE("loss gradient: gamma = 0 ignores the boundary batch") {
  const PdeProblem problem = PdeProblem::one_peak();
  const MlpParams p = init_mlp({2, 16, 16, 1}, 67);
  Rng rng(71);
  Eigen::MatrixXd Xi(20, 2);
  for (Eigen::Index i = 0; i < Xi.rows(); ++i) Xi.row(i) = random_point(2, rng).transpose();
  const Eigen::MatrixXd Xb1 = boundary_points(10, 2, rng);
  const Eigen::MatrixXd Xb2 = boundary_points(10, 2, rng);

  const LossGrad a = loss_param_gradient(p, problem, Xi, Xb1, 0.0);
  const LossGrad b = loss_param_gradient(p, problem, Xi, Xb2, 0.0);
  for (std::size_t l = 0; l < a.grad.W.size(); ++l) {
    CHECK((a.grad.W[l] - b.grad.W[l]).norm() == 0.0);
    CHECK((a.grad.b[l] - b.grad.b[l]).norm() == 0.0);
  }
}

TEST_CASE("loss gradient: empty batch is rejected") {
  const PdeProblem problem = PdeProblem::one_peak();
  const MlpParams p = init_mlp({2, 8, 1}, 73);
  const Eigen::MatrixXd empty(0, 2), some = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS((void)loss_param_gradient(p, problem, empty, some, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)loss_param_gradient(p, problem, some, empty, 1.0),
                  std::invalid_argument);
}

TEST_CASE("loss gradient: directional derivative matches finite differences") {
  Rng rng(79);
  const struct {
    PdeProblem problem;
    std::vector<int> sizes;
  } cases[] = {
      {PdeProblem::one_peak(), {2, 24, 24, 24, 1}},
      {PdeProblem::two_peak(), {2, 16, 16, 1}},
      {PdeProblem::dim10(), {10, 20, 20, 1}},
  };
  for (const auto& tc : cases) {
    const MlpParams params = init_mlp(tc.sizes, rng.next_u64());
    const int d = tc.problem.dim;
    Eigen::MatrixXd Xi(12, d);
    for (Eigen::Index i = 0; i < Xi.rows(); ++i)
      Xi.row(i) = random_point(d, rng).transpose();
    const Eigen::MatrixXd Xb = boundary_points(8, d, rng);

    const LossGrad lg = loss_param_gradient(params, tc.problem, Xi, Xb, 1.0);
    CHECK(lg.loss == doctest::Approx(loss_value(params, tc.problem, Xi, Xb, 1.0)));
    for (int t = 0; t < 5; ++t) {
      const ParamBlocks dir = random_direction(params, rng);
      const double fd = directional_fd(params, tc.problem, Xi, Xb, 1.0, dir, 1e-5);
      CHECK(rel_err(lg.grad.dot(dir), fd, 1e-10) < 1e-6);
    }
  }
}

TEST_CASE("tape: recorded jets reproduce input gradients and the loss gradient") {
  const MlpParams params = init_mlp({2, 6, 6, 1}, 83);
  const Point x0 = Eigen::Vector2d(0.25, -0.4);

  // d u / d x via one reverse sweep over the recorded forward
  {
    Tape tape;
    std::vector<Var> x = {Var::input(tape, x0(0)), Var::input(tape, x0(1))};
    const Var u = forward_on_tape(params, tape, x);
    const std::vector<double> g = tape.gradient(u.id());
    const Eigen::VectorXd want = input_gradient(params, as_span(x0));
    CHECK(std::abs(g[0] - want(0)) < 1e-13);
    CHECK(std::abs(g[1] - want(1)) < 1e-13);
  }

  // d(lap u)/d x via jets recorded on the tape (third derivatives), checked
  // against finite differences of the exact laplacian
  {
    Tape tape;
    std::vector<Var> x = {Var::input(tape, x0(0)), Var::input(tape, x0(1))};
    Var lap = forward_jet_on_tape(params, tape, x, 0).d2;
    lap = lap + forward_jet_on_tape(params, tape, x, 1).d2;
    const std::vector<double> g = tape.gradient(lap.id());
    const double h = 1e-5;
    for (int k = 0; k < 2; ++k) {
      Point xp = x0, xm = x0;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (laplacian(params, as_span(xp)) - laplacian(params, as_span(xm))) / (2 * h);
      CHECK(rel_err(g[static_cast<std::size_t>(k)], fd, 1e-8) < 1e-5);
    }
  }
}

TEST_CASE("tape: topological order and single-sweep invariants") {
  Tape tape;
  const Var a = Var::input(tape, 2.0);
  const Var b = Var::input(tape, 3.0);
  const Var c = tanh(a * b + a);
  // operands precede results
  CHECK(c.id() == static_cast<int>(tape.size()) - 1);
  const std::vector<double> g = tape.gradient(c.id());
  const double t = std::tanh(8.0);
  CHECK(g[0] == doctest::Approx((1 - t * t) * 4.0));  // d/da tanh(ab + a)
  CHECK(g[1] == doctest::Approx((1 - t * t) * 2.0));
}

TEST_SUITE_END();
