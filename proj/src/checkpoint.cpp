#include "gas/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace gas {

namespace {
constexpr int kFormatVersion = 1;
}

void save_checkpoint(const std::string& path, const MlpParams& params, const PdeProblem& problem,
                     int round) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["round"] = round;
  j["problem"]["name"] = problem.name;
  j["problem"]["dim"] = problem.dim;
  j["problem"]["operator"] = to_string(problem.op);
  j["problem"]["sharpness"] = problem.sharpness;
  j["problem"]["half_width"] = problem.half_width;
  auto& centers = j["problem"]["centers"];
  centers = nlohmann::json::array();
  for (const auto& c : problem.centers)
    centers.push_back(std::vector<double>(c.data(), c.data() + c.size()));

  j["activation"] = to_string(params.activation);
  j["layer_sizes"] = params.layer_sizes();
  auto& weights = j["weights"];
  auto& biases = j["biases"];
  weights = nlohmann::json::array();
  biases = nlohmann::json::array();
  for (std::size_t l = 0; l < params.p.W.size(); ++l) {
    const auto& W = params.p.W[l];
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(W.size()));
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index jj = 0; jj < W.cols(); ++jj) flat.push_back(W(i, jj));
    weights.push_back(flat);
    biases.push_back(
        std::vector<double>(params.p.b[l].data(), params.p.b[l].data() + params.p.b[l].size()));
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (j.value("format_version", -1) != kFormatVersion)
    throw std::runtime_error("checkpoint '" + path + "': unsupported format version");

  Checkpoint ck;
  ck.round = j.at("round").get<int>();
  const auto& jp = j.at("problem");
  ck.problem.name = jp.at("name").get<std::string>();
  ck.problem.dim = jp.at("dim").get<int>();
  ck.problem.op = operator_from_string(jp.at("operator").get<std::string>());
  ck.problem.sharpness = jp.at("sharpness").get<double>();
  ck.problem.half_width = jp.at("half_width").get<double>();
  for (const auto& c : jp.at("centers")) {
    const auto vals = c.get<std::vector<double>>();
    ck.problem.centers.push_back(
        Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }

  ck.params.activation = activation_from_string(j.at("activation").get<std::string>());
  const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() + 1 != sizes.size() || biases.size() != weights.size())
    throw std::runtime_error("checkpoint '" + path + "': inconsistent layer data");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto flat = weights[l].get<std::vector<double>>();
    const int rows = sizes[l + 1];
    const int cols = sizes[l];
    if (flat.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
      throw std::runtime_error("checkpoint '" + path + "': weight size mismatch at layer " +
                               std::to_string(l));
    Eigen::MatrixXd W(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int jj = 0; jj < cols; ++jj)
        W(i, jj) = flat[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                        static_cast<std::size_t>(jj)];
    ck.params.p.W.push_back(std::move(W));
    const auto bv = biases[l].get<std::vector<double>>();
    ck.params.p.b.push_back(
        Eigen::Map<const Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size())));
  }
  ck.params.validate();
  return ck;
}

}  // namespace gas
