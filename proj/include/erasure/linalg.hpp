#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace erasure {

/// Row-major storage for data matrices (one example per row).
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A finite, exactly symmetric D x D matrix. Producers are responsible for
/// symmetrizing; construction only validates.
class SymMatrix {
 public:
  /// Validates exact symmetry and finiteness; throws Error(invalid_input).
  explicit SymMatrix(MatrixXd m);

  /// Builds (m + m^T) / 2, which is exactly symmetric in floating point.
  static SymMatrix symmetrize(const MatrixXd& m);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  MatrixXd m_;
};

struct EigenDecomposition {
  VectorXd eigenvalues;   // descending
  MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Symmetric eigendecomposition, eigenvalues sorted descending. Each
/// eigenvector is sign-normalized so its first nonzero component is
/// positive. Diagonal inputs return natural basis vectors (stable order on
/// ties) so degenerate spectra resolve deterministically.
EigenDecomposition sym_eig(const SymMatrix& m);

struct PcaResult {
  RowMatrix projected;        // N x target_dim, centered X times basis^T
  MatrixXd basis;             // target_dim x D, orthonormal rows
  VectorXd mean;              // column means of X
  VectorXd explained_variance;  // covariance eigenvalues (N-1 normalization)
};

PcaResult pca_reduce(const RowMatrix& x, Eigen::Index target_dim);

struct ProjectionCheck {
  bool ok = false;
  Eigen::Index rank = 0;       // eigenvalues > 0.5
  double max_violation = 0.0;  // max |P P - P|
};

ProjectionCheck is_orthogonal_projection(const SymMatrix& p, double tol);

/// I - W^T W for a k x D matrix W with orthonormal rows (within 1e-8).
SymMatrix rank_k_neutralizer(const MatrixXd& basis);

/// max |W W^T - I|.
double gram_deviation(const MatrixXd& basis);

}  // namespace erasure
