#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gas/autodiff.hpp"
#include "gas/batch_eval.hpp"
#include "gas/checkpoint.hpp"
#include "gas/metrics.hpp"
#include "gas/network.hpp"
#include "gas/pde.hpp"
#include "gas/runner.hpp"
#include "gas/sampler.hpp"
#include "gas/trainer.hpp"

namespace py = pybind11;
using namespace gas;

namespace {

Point to_point(const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 1) throw std::invalid_argument("expected a 1-D point array");
  Point x(buf.shape[0]);
  const auto* data = static_cast<const double*>(buf.ptr);
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i) x(i) = data[i];
  return x;
}

Eigen::MatrixXd to_matrix(const py::array_t<double>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 2) throw std::invalid_argument("expected an (n, d) array of points");
  Eigen::MatrixXd X(buf.shape[0], buf.shape[1]);
  const auto* data = static_cast<const double*>(buf.ptr);
  const py::ssize_t s0 = buf.strides[0] / static_cast<py::ssize_t>(sizeof(double));
  const py::ssize_t s1 = buf.strides[1] / static_cast<py::ssize_t>(sizeof(double));
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i)
    for (py::ssize_t j = 0; j < buf.shape[1]; ++j) X(i, j) = data[i * s0 + j * s1];
  return X;
}

py::array_t<double> to_array(const Eigen::VectorXd& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  auto buf = out.request();
  auto* data = static_cast<double*>(buf.ptr);
  for (Eigen::Index i = 0; i < v.size(); ++i) data[i] = v(i);
  return out;
}

py::dict metrics_to_dict(const RoundMetrics& rm) {
  py::dict d;
  d["round"] = rm.round;
  d["interior"] = rm.interior;
  d["boundary"] = rm.boundary;
  d["fns"] = rm.fns;
  d["ans"] = rm.ans;
  d["loss"] = rm.loss;
  d["mean_val_r2"] = rm.mean_val_r2;
  d["mse"] = rm.mse;
  d["rel_l2"] = rm.rel_l2;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gaspinn, m) {
  m.doc() = "Gaussian-mixture adaptive sampling for PINN training (C++ core)";

  py::class_<PdeProblem>(m, "Problem")
      .def_static("by_name", &PdeProblem::by_name, py::arg("name"))
      .def_property_readonly("name", [](const PdeProblem& p) { return p.name; })
      .def_property_readonly("dim", [](const PdeProblem& p) { return p.dim; })
      .def_property_readonly("operator_kind",
                             [](const PdeProblem& p) { return to_string(p.op); })
      .def("exact_solution",
           [](const PdeProblem& p, const py::array_t<double>& x) {
             return exact_solution(p, to_point(x));
           })
      .def("source",
           [](const PdeProblem& p, const py::array_t<double>& x) {
             return manufactured_source(p, to_point(x));
           })
      .def("__repr__", [](const PdeProblem& p) {
        return "<Problem " + p.name + " d=" + std::to_string(p.dim) + ">";
      });

  py::class_<MlpParams>(m, "Mlp")
      .def_static(
          "init",
          [](const std::vector<int>& sizes, std::uint64_t seed, const std::string& activation) {
            return init_mlp(sizes, seed, activation_from_string(activation));
          },
          py::arg("layer_sizes"), py::arg("seed"), py::arg("activation") = "tanh")
      .def_property_readonly("layer_sizes", &MlpParams::layer_sizes)
      .def_property_readonly("parameter_count", &MlpParams::parameter_count)
      .def("forward",
           [](const MlpParams& p, const py::array_t<double>& X) {
             return to_array(batch_forward(p, to_matrix(X)));
           })
      .def("forward_one",
           [](const MlpParams& p, const py::array_t<double>& x) {
             const Point pt = to_point(x);
             return forward(p, {pt.data(), static_cast<std::size_t>(pt.size())});
           })
      .def("gradient",
           [](const MlpParams& p, const py::array_t<double>& x) {
             const Point pt = to_point(x);
             return to_array(input_gradient(p, {pt.data(), static_cast<std::size_t>(pt.size())}));
           })
      .def("laplacian",
           [](const MlpParams& p, const py::array_t<double>& x) {
             const Point pt = to_point(x);
             return laplacian(p, {pt.data(), static_cast<std::size_t>(pt.size())});
           })
      .def("residuals", [](const MlpParams& p, const PdeProblem& pr, const py::array_t<double>& X) {
        return to_array(batch_residuals(pr, p, to_matrix(X)));
      });

  m.def("load_checkpoint", [](const std::string& path) {
    const Checkpoint ck = load_checkpoint(path);
    return py::make_tuple(ck.params, ck.problem, ck.round);
  });

  m.def("laplace_sigma_1d",
        [](const std::function<double(double)>& r, double x0, double eps) {
          return laplace_sigma_1d(r, x0, eps);
        },
        py::arg("r"), py::arg("x0"), py::arg("eps") = 1e-3);

  m.def("fns_ans", [](const std::vector<std::uint64_t>& sizes) {
    const auto [fns, ans] = fns_ans(sizes);
    return py::make_tuple(fns, ans);
  });

  m.def("mse_on_grid", &mse_on_grid, py::arg("params"), py::arg("problem"), py::arg("grid_n"));
  m.def("relative_l2", &relative_l2, py::arg("params"), py::arg("problem"), py::arg("n_t") = 3,
        py::arg("half_width") = 0.1);

  m.def("preset_names", &preset_names);
  m.def(
      "run",
      [](const std::string& preset_name, const std::string& out_dir,
         const std::map<std::string, std::string>& overrides, int threads) {
        GasConfig cfg = preset(preset_name);
        for (const auto& [k, v] : overrides) apply_override(cfg, k, v);
        cfg.validate();
        set_max_threads(threads);
        const GasRunResult res = gas_loop(cfg, out_dir);
        py::list rounds;
        for (const auto& rm : res.rounds) rounds.append(metrics_to_dict(rm));
        py::dict out;
        out["rounds"] = rounds;
        out["stop_reason"] = res.stop_reason;
        out["params"] = res.params;
        return out;
      },
      py::arg("preset"), py::arg("out_dir") = "",
      py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("threads") = 1,
      "Run the adaptive-sampling training loop for a builtin preset.");
}
