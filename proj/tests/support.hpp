#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include "erasure/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace erasure::test {

inline RowMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline VectorXd gaussian_vector(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
  return gaussian(n, 1, rng, sd).col(0);
}

inline SymMatrix random_symmetric(Eigen::Index d, std::mt19937_64& rng, double sd = 1.0) {
  const MatrixXd g = gaussian(d, d, rng, sd);
  return SymMatrix::symmetrize(g);
}

/// k x D with orthonormal rows spanning a uniformly random subspace.
inline MatrixXd random_orthonormal_rows(Eigen::Index k, Eigen::Index d, std::mt19937_64& rng) {
  const MatrixXd g = gaussian(d, k, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, k);
  return q.transpose();
}

/// min over theta of mean (x theta - y)^2, by SVD least squares. Singular
/// values below abs_tol count as zero, so round-off columns are not fitted.
inline double min_mse(const RowMatrix& x, const VectorXd& y, double abs_tol = 1e-9) {
  const MatrixXd xm = x;
  Eigen::JacobiSVD<MatrixXd> svd(xm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd uty = svd.matrixU().transpose() * y;
  VectorXd coef = VectorXd::Zero(uty.size());
  for (Eigen::Index i = 0; i < uty.size(); ++i)
    if (svd.singularValues()[i] > abs_tol) coef[i] = uty[i] / svd.singularValues()[i];
  const VectorXd theta = svd.matrixV() * coef;
  return (xm * theta - y).squaredNorm() / static_cast<double>(y.size());
}

inline double mean_square(const VectorXd& v) { return v.squaredNorm() / static_cast<double>(v.size()); }

inline VectorXd centered(const VectorXd& v) { return (v.array() - v.mean()).matrix(); }

inline RowMatrix centered_columns(const RowMatrix& x) {
  RowMatrix c = x;
  c.rowwise() -= x.colwise().mean();
  return c;
}

}  // namespace erasure::test

namespace erasure::test {

/// A random member of the Fantope F_k: a random orthogonal basis with a
/// spectrum drawn as a random convex combination of 0/1 vectors with k ones.
inline SymMatrix random_fantope_member(Eigen::Index d, Eigen::Index k, std::mt19937_64& rng) {
  const MatrixXd q = random_orthonormal_rows(d, d, rng);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  VectorXd spectrum = VectorXd::Zero(d);
  double total = 0.0;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  for (int v = 0; v < 4; ++v) {
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const double w = gamma(rng);
    for (Eigen::Index i = 0; i < k; ++i) spectrum[idx[static_cast<std::size_t>(i)]] += w;
    total += w;
  }
  spectrum /= total;
  return SymMatrix::symmetrize(q.transpose() * spectrum.asDiagonal() * q);
}

}  // namespace erasure::test
