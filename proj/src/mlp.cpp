#include "gas/mlp.hpp"

namespace gas {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    case Activation::Square: return "square";
  }
  return "tanh";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  if (s == "square") return Activation::Square;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

void ParamBlocks::set_zero() {
  for (auto& m : W) m.setZero();
  for (auto& v : b) v.setZero();
}

std::size_t ParamBlocks::count() const {
  std::size_t n = 0;
  for (const auto& m : W) n += static_cast<std::size_t>(m.size());
  for (const auto& v : b) n += static_cast<std::size_t>(v.size());
  return n;
}

double ParamBlocks::dot(const ParamBlocks& other) const {
  double s = 0.0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    s += (W[l].array() * other.W[l].array()).sum();
    s += (b[l].array() * other.b[l].array()).sum();
  }
  return s;
}

void ParamBlocks::axpy(double alpha, const ParamBlocks& other) {
  for (std::size_t l = 0; l < W.size(); ++l) {
    W[l] += alpha * other.W[l];
    b[l] += alpha * other.b[l];
  }
}

bool ParamBlocks::all_finite() const {
  for (const auto& m : W)
    if (!m.allFinite()) return false;
  for (const auto& v : b)
    if (!v.allFinite()) return false;
  return true;
}

int MlpParams::input_dim() const {
  if (p.W.empty()) throw std::invalid_argument("mlp: no layers");
  return static_cast<int>(p.W.front().cols());
}

int MlpParams::output_dim() const {
  if (p.W.empty()) throw std::invalid_argument("mlp: no layers");
  return static_cast<int>(p.W.back().rows());
}

std::vector<int> MlpParams::layer_sizes() const {
  std::vector<int> sizes;
  sizes.push_back(input_dim());
  for (const auto& m : p.W) sizes.push_back(static_cast<int>(m.rows()));
  return sizes;
}

void MlpParams::validate() const {
  if (p.W.empty()) throw std::invalid_argument("mlp: no layers");
  if (p.W.size() != p.b.size())
    throw std::invalid_argument("mlp: weight/bias layer count mismatch");
  for (std::size_t l = 0; l < p.W.size(); ++l) {
    if (p.b[l].size() != p.W[l].rows())
      throw std::invalid_argument("mlp: layer " + std::to_string(l) +
                                  " bias size " + std::to_string(p.b[l].size()) +
                                  " does not match weight rows " +
                                  std::to_string(p.W[l].rows()));
    if (l > 0 && p.W[l].cols() != p.W[l - 1].rows())
      throw std::invalid_argument(
          "mlp: layer " + std::to_string(l) + " expects input size " +
          std::to_string(p.W[l].cols()) + " but layer " + std::to_string(l - 1) +
          " outputs " + std::to_string(p.W[l - 1].rows()));
    if (!p.W[l].allFinite() || !p.b[l].allFinite())
      throw std::invalid_argument("mlp: layer " + std::to_string(l) +
                                  " contains non-finite entries");
  }
}

ParamBlocks zeros_like(const MlpParams& params) {
  ParamBlocks g;
  g.W.reserve(params.p.W.size());
  g.b.reserve(params.p.b.size());
  for (const auto& m : params.p.W) g.W.push_back(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
  for (const auto& v : params.p.b) g.b.push_back(Eigen::VectorXd::Zero(v.size()));
  return g;
}

}  // namespace gas
