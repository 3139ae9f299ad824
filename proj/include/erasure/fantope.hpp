#pragma once

#include "erasure/linalg.hpp"

namespace erasure {

/// F_k = { A symmetric : 0 <= A <= I, tr(A) = k }, the convex hull of the
/// rank-k orthogonal projections in dimension `dim`.
struct FantopeSpec {
  Eigen::Index dim = 0;
  Eigen::Index k = 0;

  /// Throws Error(invalid_argument) unless 1 <= k < dim.
  void validate() const;
};

/// sum_d clip(lambda_d - gamma, 0, 1) - k. Non-increasing in gamma.
double gamma_residual(const VectorXd& eigenvalues, double gamma, double k);

struct FantopeProjection {
  SymMatrix matrix;
  double gamma = 0.0;
  VectorXd clipped;  // eigenvalues of the result, descending
  int iterations = 0;
};

/// Euclidean projection onto F_k: eigendecompose, find the shift gamma with
/// gamma_residual(...) = 0 by bisection on [lambda_min - 1, lambda_max], and
/// rebuild V diag(clip(lambda - gamma, 0, 1)) V^T.
FantopeProjection fantope_project_detailed(const SymMatrix& m, const FantopeSpec& spec, double tol = 1e-10);
SymMatrix fantope_project(const SymMatrix& m, const FantopeSpec& spec, double tol = 1e-10);

/// Eigenvalues within [-tol, 1 + tol] and trace within tol of k.
bool is_fantope_member(const SymMatrix& m, Eigen::Index k, double tol);

}  // namespace erasure
