#include "gas/autodiff.hpp"

namespace gas {

namespace {

void check_point_dim(const MlpParams& params, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.input_dim())
    throw std::invalid_argument("forward: point dimension " + std::to_string(x.size()) +
                                " does not match layer 0 input size " +
                                std::to_string(params.input_dim()));
}

}  // namespace

double forward(const MlpParams& params, std::span<const double> x) {
  check_point_dim(params, x);
  std::vector<double> in(x.begin(), x.end());
  return detail::eval_layers(params, std::move(in));
}

Jet2 forward_jet(const MlpParams& params, std::span<const double> x, int axis) {
  check_point_dim(params, x);
  if (axis < 0 || axis >= static_cast<int>(x.size()))
    throw std::invalid_argument("forward_jet: axis " + std::to_string(axis) +
                                " out of range for dimension " + std::to_string(x.size()));
  std::vector<Jet2> in(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    in[j] = {x[j], j == static_cast<std::size_t>(axis) ? 1.0 : 0.0, 0.0};
  return detail::eval_layers(params, std::move(in));
}

Eigen::VectorXd input_gradient(const MlpParams& params, std::span<const double> x) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k)
    g(static_cast<Eigen::Index>(k)) = forward_jet(params, x, static_cast<int>(k)).d1;
  return g;
}

double laplacian(const MlpParams& params, std::span<const double> x) {
  double lap = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    lap += forward_jet(params, x, static_cast<int>(k)).d2;
  return lap;
}

Var forward_on_tape(const MlpParams& params, Tape& tape, const std::vector<Var>& x) {
  if (static_cast<int>(x.size()) != params.input_dim())
    throw std::invalid_argument("forward_on_tape: point dimension mismatch");
  (void)tape;
  return detail::eval_layers(params, x);
}

Jet2T<Var> forward_jet_on_tape(const MlpParams& params, Tape& tape, const std::vector<Var>& x,
                               int axis) {
  std::vector<Jet2T<Var>> in(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    in[j].v = x[j];
    in[j].d1 = Var::constant(tape, j == static_cast<std::size_t>(axis) ? 1.0 : 0.0);
    in[j].d2 = Var::constant(tape, 0.0);
  }
  return detail::eval_layers(params, std::move(in));
}

}  // namespace gas
