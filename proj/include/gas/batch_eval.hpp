#pragma once

#include <vector>

#include "gas/mlp.hpp"
#include "gas/pde.hpp"

namespace gas {

// Batched network evaluation. The jet propagation (value, per-axis first and
// second derivative channels) is recorded layer by layer for a block of
// points; parameter gradients come from one reverse sweep over that record.
// Agrees with the scalar reference path in autodiff.hpp to roundoff.
//
// Determinism: points are processed in fixed-size blocks in index order and
// block contributions are reduced in block order, so results do not depend
// on the worker count.

struct LossGrad {
  double loss = 0.0;
  ParamBlocks grad;
};

// batch-evaluation fan-out cap (workers); 1 = fully sequential
void set_max_threads(int n);
int max_threads();

// u(x) for each row of X (n x d)
Eigen::VectorXd batch_forward(const MlpParams& params, const Eigen::MatrixXd& X);

// r(x; theta) for each row; throws on non-finite residual naming the index
Eigen::VectorXd batch_residuals(const PdeProblem& problem, const MlpParams& params,
                                const Eigen::MatrixXd& X);

// J_N over the given batches (means of squared residuals, boundary term
// weighted by gamma)
double loss_value(const MlpParams& params, const PdeProblem& problem,
                  const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary,
                  double gamma);

// exact dJ_N/dtheta plus the loss value; errors on empty batches and on
// non-finite intermediates (reported with the batch point index)
LossGrad loss_param_gradient(const MlpParams& params, const PdeProblem& problem,
                             const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary,
                             double gamma);

// rows of X from a point list (all points must share the problem dimension)
Eigen::MatrixXd pack_points(const std::vector<Point>& pts);

}  // namespace gas
