#include "erasure/kernels.hpp"

#include <omp.h>

#include <limits>

namespace erasure::kernels {

namespace {

// One chunk of the score/gradient reduction, vectorized through Eigen.
void chunk_loss_grad(GlmKind kind, const RowsRef& x, const VectorXd& w, const VectorXd& y,
                     Eigen::Index begin, Eigen::Index rows, double& loss,
                     Eigen::Ref<VectorXd> grad) {
  const auto block = x.middleRows(begin, rows);
  const VectorXd scores = block * w;
  VectorXd residual(rows);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double yi = y[begin + i];
    acc += loss_from_score(kind, yi, scores[i]);
    residual[i] = dloss_from_score(kind, yi, scores[i]);
  }
  loss = acc;
  grad.noalias() = block.transpose() * residual;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

namespace parallel {

MatrixXd weighted_gram(const RowsRef& x, const VectorXd& weights) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index chunks = (n + kChunkRows - 1) / kChunkRows;
  auto chunk_gram = [&](Eigen::Index begin, Eigen::Index rows) -> MatrixXd {
    const auto block = x.middleRows(begin, rows);
    const RowMatrix scaled = block.array().colwise() * weights.segment(begin, rows).array();
    MatrixXd g = block.transpose() * scaled;
    return g;
  };
  if (chunks <= 1) return n > 0 ? chunk_gram(0, n) : MatrixXd::Zero(d, d);

  std::vector<MatrixXd> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunkRows;
    partial[static_cast<std::size_t>(c)] = chunk_gram(begin, std::min(kChunkRows, n - begin));
  }
  MatrixXd out = MatrixXd::Zero(d, d);
  for (const auto& g : partial) out += g;
  return out;
}

LossGrad loss_grad(GlmKind kind, const RowsRef& x, const VectorXd& w, const VectorXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index chunks = (n + kChunkRows - 1) / kChunkRows;

  LossGrad out;
  out.grad_sum = VectorXd::Zero(d);
  if (chunks <= 1) {
    if (n > 0) chunk_loss_grad(kind, x, w, y, 0, n, out.loss_sum, out.grad_sum);
    return out;
  }

  VectorXd losses(chunks);
  MatrixXd grads(d, chunks);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunkRows;
    const Eigen::Index rows = std::min(kChunkRows, n - begin);
    chunk_loss_grad(kind, x, w, y, begin, rows, losses[c], grads.col(c));
  }
  // Ordered combine: independent of thread count.
  for (Eigen::Index c = 0; c < chunks; ++c) {
    out.loss_sum += losses[c];
    out.grad_sum += grads.col(c);
  }
  return out;
}

Assignment assign_nearest(const RowsRef& x, const RowsRef& centroids) {
  const Eigen::Index n = x.rows();
  Assignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.sq_dist = VectorXd::Zero(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double dist = (x.row(i) - centroids.row(c)).squaredNorm();
      if (dist < best) {
        best = dist;
        arg = static_cast<int>(c);
      }
    }
    out.labels[static_cast<std::size_t>(i)] = arg;
    out.sq_dist[i] = best;
  }
  return out;
}

}  // namespace parallel
}  // namespace erasure::kernels
