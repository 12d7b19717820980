#include "gas/batch_eval.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace gas {

namespace {

int g_max_threads = 1;

using Eigen::ArrayXXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// block size: keeps the stacked (d*block x width) jet matrices cache-friendly
Index block_size(int dim) {
  const Index b = 4096 / std::max(dim, 1);
  return std::clamp<Index>(b, 128, 512);
}

// sigma', sigma'', sigma''' elementwise. VZ is the pre-activation, V the
// post-activation of the same layer.
void activation_derivs(Activation act, const MatrixXd& VZ, const MatrixXd& V, ArrayXXd& s1,
                       ArrayXXd& s2, ArrayXXd& s3, bool need_s3) {
  switch (act) {
    case Activation::Tanh:
      s1 = 1.0 - V.array().square();
      s2 = -2.0 * V.array() * s1;
      if (need_s3) s3 = -2.0 * s1 * (1.0 - 3.0 * V.array().square());
      break;
    case Activation::Identity:
      s1 = ArrayXXd::Ones(VZ.rows(), VZ.cols());
      s2 = ArrayXXd::Zero(VZ.rows(), VZ.cols());
      if (need_s3) s3 = ArrayXXd::Zero(VZ.rows(), VZ.cols());
      break;
    case Activation::Square:
      s1 = 2.0 * VZ.array();
      s2 = ArrayXXd::Constant(VZ.rows(), VZ.cols(), 2.0);
      if (need_s3) s3 = ArrayXXd::Zero(VZ.rows(), VZ.cols());
      break;
  }
}

void apply_activation(Activation act, const MatrixXd& VZ, MatrixXd& V) {
  switch (act) {
    case Activation::Tanh: V = VZ.array().tanh().matrix(); break;
    case Activation::Identity: V = VZ; break;
    case Activation::Square: V = VZ.array().square().matrix(); break;
  }
}

// Recorded jet propagation for one block: the layer-granular tape walked by
// the reverse sweep. Axis channels are stacked, rows [k*n, (k+1)*n) of the
// P/Q matrices belong to axis k.
struct JetTrace {
  std::vector<MatrixXd> VZ, V;         // n x w_l (pre / post activation)
  std::vector<MatrixXd> PZ, P, QZ, Q;  // (d n) x w_l

  void resize(int layers) {
    VZ.resize(static_cast<std::size_t>(layers));
    V.resize(static_cast<std::size_t>(layers));
    PZ.resize(static_cast<std::size_t>(layers));
    P.resize(static_cast<std::size_t>(layers));
    QZ.resize(static_cast<std::size_t>(layers));
    Q.resize(static_cast<std::size_t>(layers));
  }
};

// Forward over one block, filling the trace in place. axes = 0 evaluates
// values only; axes = d records the full jet channels.
void forward_block(const MlpParams& params, const MatrixXd& X, int axes, JetTrace& trace) {
  const Index n = X.rows();
  const int L = params.n_layers();
  trace.resize(L);

  ArrayXXd s1, s2, s3;
  for (int l = 0; l < L; ++l) {
    const std::size_t li = static_cast<std::size_t>(l);
    const MatrixXd& W = params.p.W[li];
    const VectorXd& b = params.p.b[li];
    const Index w = W.rows();
    const MatrixXd& V_prev = (l == 0) ? X : trace.V[li - 1];

    MatrixXd& VZ = trace.VZ[li];
    VZ.noalias() = V_prev * W.transpose();
    VZ.rowwise() += b.transpose();

    MatrixXd& PZ = trace.PZ[li];
    MatrixXd& QZ = trace.QZ[li];
    if (axes > 0) {
      if (l == 0) {
        // input jets: the axis-k first-derivative block starts as rows e_k,
        // second-derivative blocks start at zero
        PZ.resize(static_cast<Index>(axes) * n, w);
        for (int k = 0; k < axes; ++k)
          PZ.middleRows(static_cast<Index>(k) * n, n).rowwise() = W.col(k).transpose();
        QZ = MatrixXd::Zero(static_cast<Index>(axes) * n, w);
      } else {
        PZ.noalias() = trace.P[li - 1] * W.transpose();
        QZ.noalias() = trace.Q[li - 1] * W.transpose();
      }
    }

    MatrixXd& V = trace.V[li];
    MatrixXd& P = trace.P[li];
    MatrixXd& Q = trace.Q[li];
    if (l + 1 < L) {
      apply_activation(params.activation, VZ, V);
      if (axes > 0) {
        activation_derivs(params.activation, VZ, V, s1, s2, s3, /*need_s3=*/false);
        P.resize(PZ.rows(), w);
        Q.resize(QZ.rows(), w);
        for (int k = 0; k < axes; ++k) {
          const Index r0 = static_cast<Index>(k) * n;
          auto pz = PZ.middleRows(r0, n).array();
          auto qz = QZ.middleRows(r0, n).array();
          P.middleRows(r0, n) = (s1 * pz).matrix();
          Q.middleRows(r0, n) = (s2 * pz.square() + s1 * qz).matrix();
        }
      }
    } else {
      V = VZ;
      if (axes > 0) {
        P = PZ;
        Q = QZ;
      }
    }
  }
}

// One reverse sweep over the recorded propagation. Seeds are the loss
// adjoints of (u, du, d2u) per point; contributions accumulate into grad.
void reverse_block(const MlpParams& params, const MatrixXd& X, int axes, const JetTrace& trace,
                   const VectorXd& seed_u, const MatrixXd& seed_du, const MatrixXd& seed_d2u,
                   ParamBlocks& grad) {
  const Index n = X.rows();
  const int L = params.n_layers();
  const Index w_last = params.p.W[static_cast<std::size_t>(L - 1)].rows();

  // adjoints of the current layer's pre-activation channels
  MatrixXd vz_bar = MatrixXd::Zero(n, w_last);
  vz_bar.col(0) = seed_u;
  MatrixXd pz_bar, qz_bar;
  if (axes > 0) {
    pz_bar = MatrixXd::Zero(static_cast<Index>(axes) * n, w_last);
    qz_bar = MatrixXd::Zero(static_cast<Index>(axes) * n, w_last);
    for (int k = 0; k < axes; ++k) {
      pz_bar.middleRows(static_cast<Index>(k) * n, n).col(0) = seed_du.col(k);
      qz_bar.middleRows(static_cast<Index>(k) * n, n).col(0) = seed_d2u.col(k);
    }
  }

  MatrixXd v_bar, p_bar, q_bar;
  ArrayXXd s1, s2, s3;
  for (int l = L - 1; l >= 0; --l) {
    const std::size_t li = static_cast<std::size_t>(l);
    const MatrixXd& W = params.p.W[li];
    auto& gW = grad.W[li];
    auto& gb = grad.b[li];

    // affine adjoints: z_l = A_{l-1} W^T + b (bias enters the value channel only)
    gb.noalias() += vz_bar.colwise().sum().transpose();
    if (l == 0) {
      gW.noalias() += vz_bar.transpose() * X;
      if (axes > 0)
        for (int k = 0; k < axes; ++k)
          gW.col(k).noalias() +=
              pz_bar.middleRows(static_cast<Index>(k) * n, n).colwise().sum().transpose();
      break;
    }

    const MatrixXd& V_prev = trace.V[li - 1];
    gW.noalias() += vz_bar.transpose() * V_prev;
    if (axes > 0) {
      gW.noalias() += pz_bar.transpose() * trace.P[li - 1];
      gW.noalias() += qz_bar.transpose() * trace.Q[li - 1];
    }

    // to the post-activation channels of layer l-1
    v_bar.noalias() = vz_bar * W;
    if (axes > 0) {
      p_bar.noalias() = pz_bar * W;
      q_bar.noalias() = qz_bar * W;
    }

    // through the activation of layer l-1:
    //   v = sigma(vz), p = s1 pz, q = s2 pz^2 + s1 qz
    activation_derivs(params.activation, trace.VZ[li - 1], V_prev, s1, s2, s3,
                      /*need_s3=*/axes > 0);
    vz_bar = (s1 * v_bar.array()).matrix();
    if (axes > 0) {
      const MatrixXd& PZ = trace.PZ[li - 1];
      const MatrixXd& QZ = trace.QZ[li - 1];
      pz_bar.resize(p_bar.rows(), p_bar.cols());
      qz_bar.resize(q_bar.rows(), q_bar.cols());
      for (int k = 0; k < axes; ++k) {
        const Index r0 = static_cast<Index>(k) * n;
        auto pz = PZ.middleRows(r0, n).array();
        auto qz = QZ.middleRows(r0, n).array();
        auto pb = p_bar.middleRows(r0, n).array();
        auto qb = q_bar.middleRows(r0, n).array();
        qz_bar.middleRows(r0, n) = (s1 * qb).matrix();
        pz_bar.middleRows(r0, n) = (s1 * pb + 2.0 * s2 * pz * qb).matrix();
        vz_bar.array() += s2 * pz * pb + (s3 * pz.square() + s2 * qz) * qb;
      }
    }
  }
}

// fixed partition in index order; the worker count never changes results
// because each block is self-contained and reductions happen in block order
template <typename Fn>
void for_each_block(Index total, Index block, Fn&& fn) {
  if (total == 0) return;
  const Index n_blocks = (total + block - 1) / block;
  const int workers = std::min<int>(g_max_threads, static_cast<int>(n_blocks));
  if (workers <= 1) {
    for (Index bi = 0; bi < n_blocks; ++bi)
      fn(bi, bi * block, std::min(block, total - bi * block));
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (Index bi = next.fetch_add(1); bi < n_blocks; bi = next.fetch_add(1))
        fn(bi, bi * block, std::min(block, total - bi * block));
    });
  for (auto& th : pool) th.join();
}

struct ResidualParts {
  VectorXd r;
  VectorXd u;
  MatrixXd du, d2u;
};

ResidualParts block_residual_parts(const PdeProblem& problem, const MlpParams& params,
                                   const MatrixXd& Xb, JetTrace& trace) {
  const Index n = Xb.rows();
  const int d = problem.dim;
  forward_block(params, Xb, d, trace);

  const MatrixXd& V_out = trace.V.back();
  const MatrixXd& P_out = trace.P.back();
  const MatrixXd& Q_out = trace.Q.back();
  ResidualParts parts;
  parts.u = V_out.col(0);
  parts.du.resize(n, d);
  parts.d2u.resize(n, d);
  for (int k = 0; k < d; ++k) {
    parts.du.col(k) = P_out.middleRows(static_cast<Index>(k) * n, n).col(0);
    parts.d2u.col(k) = Q_out.middleRows(static_cast<Index>(k) * n, n).col(0);
  }
  parts.r.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Point x = Xb.row(i).transpose();
    parts.r(i) = residual_from_parts(problem, x, parts.u(i), parts.du.row(i).transpose(),
                                     parts.d2u.row(i).sum());
  }
  return parts;
}

void check_finite(const VectorXd& v, Index offset, const char* what) {
  for (Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i)))
      throw std::runtime_error(std::string(what) + " is non-finite at batch index " +
                               std::to_string(offset + i));
}

}  // namespace

void set_max_threads(int n) { g_max_threads = n < 1 ? 1 : n; }
int max_threads() { return g_max_threads; }

Eigen::MatrixXd pack_points(const std::vector<Point>& pts) {
  if (pts.empty()) return MatrixXd(0, 0);
  MatrixXd X(static_cast<Index>(pts.size()), pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != pts.front().size())
      throw std::invalid_argument("pack_points: inconsistent point dimensions");
    X.row(static_cast<Index>(i)) = pts[i].transpose();
  }
  return X;
}

Eigen::VectorXd batch_forward(const MlpParams& params, const Eigen::MatrixXd& X) {
  if (X.cols() != params.input_dim())
    throw std::invalid_argument("batch_forward: point dimension " + std::to_string(X.cols()) +
                                " does not match layer 0 input size " +
                                std::to_string(params.input_dim()));
  VectorXd u(X.rows());
  for_each_block(X.rows(), block_size(1), [&](Index, Index start, Index len) {
    JetTrace trace;
    forward_block(params, X.middleRows(start, len), 0, trace);
    u.segment(start, len) = trace.V.back().col(0);
  });
  return u;
}

Eigen::VectorXd batch_residuals(const PdeProblem& problem, const MlpParams& params,
                                const Eigen::MatrixXd& X) {
  VectorXd r(X.rows());
  for_each_block(X.rows(), block_size(problem.dim), [&](Index, Index start, Index len) {
    JetTrace trace;
    r.segment(start, len) =
        block_residual_parts(problem, params, X.middleRows(start, len), trace).r;
  });
  check_finite(r, 0, "residual");
  return r;
}

double loss_value(const MlpParams& params, const PdeProblem& problem,
                  const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary,
                  double gamma) {
  if (interior.rows() == 0 || boundary.rows() == 0)
    throw std::invalid_argument("loss_value: empty batch");
  const VectorXd r = batch_residuals(problem, params, interior);
  VectorXd bres = batch_forward(params, boundary);
  for (Index j = 0; j < boundary.rows(); ++j)
    bres(j) -= exact_solution(problem, boundary.row(j).transpose());
  return r.squaredNorm() / static_cast<double>(interior.rows()) +
         gamma * bres.squaredNorm() / static_cast<double>(boundary.rows());
}

LossGrad loss_param_gradient(const MlpParams& params, const PdeProblem& problem,
                             const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary,
                             double gamma) {
  if (interior.rows() == 0 || boundary.rows() == 0)
    throw std::invalid_argument("loss_param_gradient: empty batch");
  const int d = problem.dim;
  if (interior.cols() != d || boundary.cols() != d)
    throw std::invalid_argument("loss_param_gradient: batch dimension mismatch");
  const double m = static_cast<double>(interior.rows());
  const double mb = static_cast<double>(boundary.rows());

  const Index bsz = block_size(d);
  const Index nbi = (interior.rows() + bsz - 1) / bsz;
  const Index nbb = (boundary.rows() + bsz - 1) / bsz;
  std::vector<ParamBlocks> partial(static_cast<std::size_t>(nbi + nbb));
  std::vector<double> partial_loss(static_cast<std::size_t>(nbi + nbb), 0.0);

  for_each_block(interior.rows(), bsz, [&](Index bi, Index start, Index len) {
    const MatrixXd Xb = interior.middleRows(start, len);
    JetTrace trace;
    ResidualParts parts = block_residual_parts(problem, params, Xb, trace);
    check_finite(parts.r, start, "interior residual");
    partial_loss[static_cast<std::size_t>(bi)] = parts.r.squaredNorm() / m;

    // seeds: dJ/dr_i = 2 r_i / m, pushed through r = L u - s
    const VectorXd rbar = (2.0 / m) * parts.r;
    VectorXd seed_u = VectorXd::Zero(len);
    MatrixXd seed_du = MatrixXd::Zero(len, d);
    MatrixXd seed_d2u(len, d);
    if (problem.op == OperatorKind::Poisson) {
      seed_d2u = (-rbar).replicate(1, d);
    } else {
      seed_u = -2.0 * static_cast<double>(d) * rbar;
      seed_du = (Xb.array().colwise() * (-2.0 * rbar.array())).matrix();
      seed_d2u = rbar.replicate(1, d);
    }
    ParamBlocks& g = partial[static_cast<std::size_t>(bi)];
    g = zeros_like(params);
    reverse_block(params, Xb, d, trace, seed_u, seed_du, seed_d2u, g);
  });

  for_each_block(boundary.rows(), bsz, [&](Index bi, Index start, Index len) {
    const MatrixXd Xb = boundary.middleRows(start, len);
    JetTrace trace;
    forward_block(params, Xb, 0, trace);
    VectorXd bres = trace.V.back().col(0);
    for (Index j = 0; j < len; ++j) bres(j) -= exact_solution(problem, Xb.row(j).transpose());
    check_finite(bres, start, "boundary residual");
    partial_loss[static_cast<std::size_t>(nbi + bi)] = gamma * bres.squaredNorm() / mb;

    const VectorXd seed_u = (2.0 * gamma / mb) * bres;
    ParamBlocks& g = partial[static_cast<std::size_t>(nbi + bi)];
    g = zeros_like(params);
    reverse_block(params, Xb, 0, trace, seed_u, MatrixXd(), MatrixXd(), g);
  });

  LossGrad out;
  out.grad = zeros_like(params);
  for (std::size_t i = 0; i < partial.size(); ++i) {
    out.loss += partial_loss[i];
    out.grad.axpy(1.0, partial[i]);
  }
  if (!std::isfinite(out.loss) || !out.grad.all_finite())
    throw std::runtime_error("loss_param_gradient: non-finite loss or gradient");
  return out;
}

}  // namespace gas
