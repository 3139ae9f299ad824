#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP implementation in
// `parallel` and a plain-loop reference in `serial`; tests check that they
// agree and bench/ compares their throughput.
//
// The parallel reductions split rows into fixed-size chunks and combine the
// per-chunk partials in chunk order, so results do not depend on the number
// of threads.

#include "erasure/linalg.hpp"
#include "erasure/loss.hpp"

#include <vector>

namespace erasure::kernels {

using RowsRef = Eigen::Ref<const RowMatrix>;

inline constexpr Eigen::Index kChunkRows = 256;

struct LossGrad {
  double loss_sum = 0.0;
  VectorXd grad_sum;  // sum_n dloss/ds(y_n, s_n) * x_n
};

struct Assignment {
  std::vector<int> labels;
  VectorXd sq_dist;  // squared distance to the assigned centroid
};

namespace serial {
/// sum_n weights[n] * x_n x_n^T.
MatrixXd weighted_gram(const RowsRef& x, const VectorXd& weights);
/// Scores s_n = x_n . w; accumulates loss and score-gradient sums.
LossGrad loss_grad(GlmKind kind, const RowsRef& x, const VectorXd& w, const VectorXd& y);
/// Nearest centroid per row; ties go to the lowest centroid index.
Assignment assign_nearest(const RowsRef& x, const RowsRef& centroids);
}  // namespace serial

namespace parallel {
MatrixXd weighted_gram(const RowsRef& x, const VectorXd& weights);
LossGrad loss_grad(GlmKind kind, const RowsRef& x, const VectorXd& w, const VectorXd& y);
Assignment assign_nearest(const RowsRef& x, const RowsRef& centroids);
}  // namespace parallel

int max_threads();

}  // namespace erasure::kernels
