#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gas {

using Point = Eigen::VectorXd;

enum class Activation { Tanh, Identity, Square };

// The residual needs C2 activations; tanh is the training default. Identity
// and Square exist so tests can build networks that realize affine maps and
// polynomials exactly through the same propagation code.
std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Parameter-shaped container: gradients, Adam moments, parameter deltas.
struct ParamBlocks {
  std::vector<Eigen::MatrixXd> W;  // layer l: (out_l x in_l)
  std::vector<Eigen::VectorXd> b;

  void set_zero();
  std::size_t count() const;
  double dot(const ParamBlocks& other) const;
  void axpy(double alpha, const ParamBlocks& other);  // this += alpha * other
  bool all_finite() const;
};

// Fully connected network u(x; theta). Hidden layers share one activation;
// the output layer is affine.
struct MlpParams {
  ParamBlocks p;
  Activation activation = Activation::Tanh;

  int n_layers() const { return static_cast<int>(p.W.size()); }
  int input_dim() const;
  int output_dim() const;
  std::vector<int> layer_sizes() const;  // [d, w1, ..., 1]
  std::size_t parameter_count() const { return p.count(); }

  // throws naming the offending layer on shape inconsistency or non-finite
  void validate() const;
};

ParamBlocks zeros_like(const MlpParams& params);

}  // namespace gas
