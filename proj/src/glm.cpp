#include "erasure/glm.hpp"

#include "erasure/error.hpp"
#include "erasure/kernels.hpp"

#include <sstream>

namespace erasure {

namespace {

constexpr const char* kModule = "glm";

void check_inputs(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                  const VectorXd& y) {
  const Eigen::Index d = x.cols();
  if (theta.size() != d || p.rows() != d || p.cols() != d || y.size() != x.rows()) {
    std::ostringstream os;
    os << "dimension mismatch: theta " << theta.size() << ", P " << p.rows() << "x" << p.cols() << ", X "
       << x.rows() << "x" << d << ", y " << y.size();
    throw Error(ErrorKind::dimension_mismatch, kModule, os.str());
  }
  if (x.rows() == 0) throw Error(ErrorKind::invalid_input, kModule, "empty batch");
  if (spec.kind == GlmKind::logistic)
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw Error(ErrorKind::invalid_input, kModule, "logistic loss requires labels in {0, 1}");
}

void check_task(const GlmSpec& spec, const Dataset& data) {
  if (spec.kind == GlmKind::logistic && data.task() != TaskKind::binary_classification)
    throw Error(ErrorKind::invalid_input, kModule, "logistic loss requires a binary-classification dataset");
}

// Loss sum and score-gradient sum for scores X (P^T theta).
kernels::LossGrad evaluate(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                           const VectorXd& y) {
  check_inputs(spec, theta, p, x, y);
  const VectorXd w = p.transpose() * theta;
  return kernels::parallel::loss_grad(spec.kind, x, w, y);
}

}  // namespace

std::string_view to_string(GlmKind kind) {
  switch (kind) {
    case GlmKind::squared_error: return "squared-error-identity";
    case GlmKind::logistic: return "logistic";
    case GlmKind::pls: return "pls";
  }
  return "logistic";
}

GlmKind glm_kind_from_string(std::string_view name) {
  for (GlmKind k : {GlmKind::squared_error, GlmKind::logistic, GlmKind::pls})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::parse_error, kModule, "unknown GLM kind '" + std::string(name) + "'");
}

double predict(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const VectorXd& x) {
  if (theta.size() != x.size() || p.rows() != x.size() || p.cols() != x.size())
    throw Error(ErrorKind::dimension_mismatch, kModule, "predict: dimension mismatch");
  return spec.inverse_link(theta.dot(p * x));
}

double batch_loss(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                  const VectorXd& y) {
  return evaluate(spec, theta, p, x, y).loss_sum / static_cast<double>(x.rows());
}

double batch_loss(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const Dataset& data) {
  check_task(spec, data);
  return batch_loss(spec, theta, p, data.x(), data.y());
}

VectorXd grad_theta(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                    const VectorXd& y) {
  const auto lg = evaluate(spec, theta, p, x, y);
  return p * lg.grad_sum / static_cast<double>(x.rows());
}

VectorXd grad_theta(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const Dataset& data) {
  check_task(spec, data);
  return grad_theta(spec, theta, p, data.x(), data.y());
}

MatrixXd grad_projection(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& p, const RowMatrix& x,
                         const VectorXd& y) {
  const auto lg = evaluate(spec, theta, p, x, y);
  const VectorXd g = lg.grad_sum / static_cast<double>(x.rows());
  // d(theta^T P x)/dP = theta x^T
  const MatrixXd outer = theta * g.transpose();
  return 0.5 * (outer + outer.transpose());
}

MatrixXd grad_eraser(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& eraser, const RowMatrix& x,
                     const VectorXd& y) {
  const MatrixXd p = MatrixXd::Identity(eraser.rows(), eraser.cols()) - eraser;
  return -grad_projection(spec, theta, p, x, y);
}

MatrixXd grad_eraser(const GlmSpec& spec, const VectorXd& theta, const MatrixXd& eraser, const Dataset& data) {
  check_task(spec, data);
  return grad_eraser(spec, theta, eraser, data.x(), data.y());
}

}  // namespace erasure
