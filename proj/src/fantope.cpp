#include "erasure/fantope.hpp"

#include "erasure/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace erasure {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kMinBracket = 1e-14;

double clip01(double v) { return std::min(std::max(v, 0.0), 1.0); }

// On a linear piece of the residual the root is available in closed form;
// accept it only if it keeps the same clipping pattern.
double refine_on_segment(const VectorXd& lambda, double gamma, double k) {
  double active_sum = 0.0;
  Eigen::Index active = 0, saturated = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double v = lambda[i] - gamma;
    if (v >= 1.0) ++saturated;
    else if (v > 0.0) {
      active_sum += lambda[i];
      ++active;
    }
  }
  if (active == 0) return gamma;
  const double candidate = (active_sum + static_cast<double>(saturated) - k) / static_cast<double>(active);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double before = lambda[i] - gamma;
    const double after = lambda[i] - candidate;
    const int cls_before = before >= 1.0 ? 2 : (before > 0.0 ? 1 : 0);
    const int cls_after = after >= 1.0 ? 2 : (after > 0.0 ? 1 : 0);
    if (cls_before != cls_after) return gamma;
  }
  return std::abs(gamma_residual(lambda, candidate, k)) <= std::abs(gamma_residual(lambda, gamma, k)) ? candidate
                                                                                                       : gamma;
}

}  // namespace

void FantopeSpec::validate() const {
  if (k < 1 || k >= dim) {
    std::ostringstream os;
    os << "Fantope rank must satisfy 1 <= k < D (k=" << k << ", D=" << dim << ")";
    throw Error(ErrorKind::invalid_argument, "fantope", os.str());
  }
}

double gamma_residual(const VectorXd& eigenvalues, double gamma, double k) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) s += clip01(eigenvalues[i] - gamma);
  return s - k;
}

FantopeProjection fantope_project_detailed(const SymMatrix& m, const FantopeSpec& spec, double tol) {
  spec.validate();
  if (m.dim() != spec.dim) throw Error(ErrorKind::dimension_mismatch, "fantope", "matrix dimension differs from spec");
  if (!(tol > 0)) throw Error(ErrorKind::invalid_argument, "fantope", "tolerance must be positive");

  const auto eig = sym_eig(m);
  const VectorXd& lambda = eig.eigenvalues;
  const double k = static_cast<double>(spec.k);

  // residual(lo) = D - k > 0, residual(hi) = -k < 0.
  double lo = lambda.minCoeff() - 1.0;
  double hi = lambda.maxCoeff();
  double gamma = 0.5 * (lo + hi);
  int it = 0;
  for (;; ++it) {
    if (it >= kMaxBisection)
      throw Error(ErrorKind::internal, "fantope", "bisection for the Fantope shift did not terminate");
    gamma = 0.5 * (lo + hi);
    const double r = gamma_residual(lambda, gamma, k);
    if (std::abs(r) <= tol || hi - lo <= kMinBracket || gamma <= lo || gamma >= hi) break;
    if (r > 0) lo = gamma;
    else hi = gamma;
  }
  gamma = refine_on_segment(lambda, gamma, k);

  FantopeProjection out{SymMatrix::zero(spec.dim), gamma, VectorXd(lambda.size()), it};
  for (Eigen::Index i = 0; i < lambda.size(); ++i) out.clipped[i] = clip01(lambda[i] - gamma);
  const MatrixXd& v = eig.eigenvectors;
  out.matrix = SymMatrix::symmetrize(v * out.clipped.asDiagonal() * v.transpose());
  return out;
}

SymMatrix fantope_project(const SymMatrix& m, const FantopeSpec& spec, double tol) {
  return fantope_project_detailed(m, spec, tol).matrix;
}

bool is_fantope_member(const SymMatrix& m, Eigen::Index k, double tol) {
  const auto eig = sym_eig(m);
  if (eig.eigenvalues.maxCoeff() > 1.0 + tol || eig.eigenvalues.minCoeff() < -tol) return false;
  return std::abs(m.matrix().trace() - static_cast<double>(k)) <= tol;
}

}  // namespace erasure
