#include "erasure/kernels.hpp"

#include <limits>

namespace erasure::kernels::serial {

MatrixXd weighted_gram(const RowsRef& x, const VectorXd& weights) {
  const Eigen::Index d = x.cols();
  MatrixXd out = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) out(a, b) += weights[i] * x(i, a) * x(i, b);
  return out;
}

LossGrad loss_grad(GlmKind kind, const RowsRef& x, const VectorXd& w, const VectorXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  LossGrad out;
  out.grad_sum = VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) s += x(i, j) * w[j];
    out.loss_sum += loss_from_score(kind, y[i], s);
    const double r = dloss_from_score(kind, y[i], s);
    for (Eigen::Index j = 0; j < d; ++j) out.grad_sum[j] += r * x(i, j);
  }
  return out;
}

Assignment assign_nearest(const RowsRef& x, const RowsRef& centroids) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Assignment out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  out.sq_dist = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      double dist = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = x(i, j) - centroids(c, j);
        dist += diff * diff;
      }
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

}  // namespace erasure::kernels::serial
