#include "erasure/probe.hpp"

#include "erasure/error.hpp"
#include "erasure/kernels.hpp"

#include <cmath>

namespace erasure {

namespace {

constexpr double kHessianDamping = 1e-10;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

double objective(const RowMatrix& x, const VectorXd& y, const VectorXd& theta, double l2) {
  const auto lg = kernels::parallel::loss_grad(GlmKind::logistic, x, theta, y);
  return lg.loss_sum / static_cast<double>(x.rows()) + 0.5 * l2 * theta.squaredNorm();
}

}  // namespace

ProbeFit train_logistic_probe(const RowMatrix& x, const VectorXd& y, const ProbeBudget& budget) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n == 0 || y.size() != n) throw Error(ErrorKind::dimension_mismatch, "glm", "probe: rows and labels differ");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] != 0.0 && y[i] != 1.0) throw Error(ErrorKind::invalid_input, "glm", "probe labels must be 0 or 1");

  ProbeFit fit;
  fit.theta = VectorXd::Zero(d);
  const double ones = y.sum();
  fit.tie_label = ones > static_cast<double>(n) - ones ? 1.0 : 0.0;

  const double inv_n = 1.0 / static_cast<double>(n);
  for (int it = 0;; ++it) {
    const auto lg = kernels::parallel::loss_grad(GlmKind::logistic, x, fit.theta, y);
    fit.loss = lg.loss_sum * inv_n + 0.5 * budget.l2 * fit.theta.squaredNorm();
    const VectorXd grad = lg.grad_sum * inv_n + budget.l2 * fit.theta;
    fit.grad_norm = grad.norm();
    fit.iterations = it;
    if (fit.grad_norm < budget.grad_tol) {
      fit.converged = true;
      break;
    }
    if (it >= budget.max_iterations) break;

    const VectorXd scores = x * fit.theta;
    VectorXd weights(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(scores[i]);
      weights[i] = p * (1.0 - p);
    }
    MatrixXd hessian = kernels::parallel::weighted_gram(x, weights) * inv_n;
    hessian.diagonal().array() += budget.l2 + kHessianDamping;
    const VectorXd step = hessian.ldlt().solve(grad);
    const double slope = grad.dot(step);

    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const VectorXd candidate = fit.theta - t * step;
      const double f = objective(x, y, candidate, budget.l2);
      if (std::isfinite(f) && f <= fit.loss - kArmijo * t * slope) {
        fit.theta = candidate;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return fit;
}

ProbeScore score_probe(const ProbeFit& fit, const RowMatrix& x, const VectorXd& y) {
  if (x.cols() != fit.theta.size() || x.rows() != y.size() || x.rows() == 0)
    throw Error(ErrorKind::dimension_mismatch, "glm", "probe scoring: dimension mismatch");
  const VectorXd scores = x * fit.theta;
  Eigen::Index correct = 0;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double pred = scores[i] > 0 ? 1.0 : (scores[i] < 0 ? 0.0 : fit.tie_label);
    if (pred == y[i]) ++correct;
    loss += loss_from_score(GlmKind::logistic, y[i], scores[i]);
  }
  const auto n = static_cast<double>(x.rows());
  return {static_cast<double>(correct) / n, loss / n};
}

}  // namespace erasure
