#include "erasure/linalg.hpp"

#include "erasure/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace erasure {

namespace {

constexpr double kSignThreshold = 1e-12;

void fix_sign(Eigen::Ref<VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignThreshold) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

bool is_diagonal(const MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

}  // namespace

SymMatrix::SymMatrix(MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw Error(ErrorKind::invalid_input, "linalg", "symmetric matrix must be square and non-empty");
  if (!m_.allFinite())
    throw Error(ErrorKind::invalid_input, "linalg", "matrix has non-finite entries");
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
      if (m_(i, j) != m_(j, i)) {
        std::ostringstream os;
        os << "matrix is not symmetric at (" << i << "," << j << ")";
        throw Error(ErrorKind::invalid_input, "linalg", os.str());
      }
}

SymMatrix SymMatrix::symmetrize(const MatrixXd& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::invalid_input, "linalg", "cannot symmetrize a non-square matrix");
  MatrixXd s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(Eigen::Index dim) { return SymMatrix(MatrixXd::Identity(dim, dim)); }

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(MatrixXd::Zero(dim, dim)); }

EigenDecomposition sym_eig(const SymMatrix& m) {
  const Eigen::Index d = m.dim();
  EigenDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);

  if (is_diagonal(m.matrix())) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return m(a, a) > m(b, b); });
    out.eigenvectors.setZero();
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index src = order[static_cast<std::size_t>(c)];
      out.eigenvalues[c] = m(src, src);
      out.eigenvectors(src, c) = 1.0;
    }
    return out;
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::internal, "linalg", "symmetric eigensolver failed to converge");
  // Eigen returns ascending order.
  for (Eigen::Index c = 0; c < d; ++c) {
    out.eigenvalues[c] = solver.eigenvalues()[d - 1 - c];
    out.eigenvectors.col(c) = solver.eigenvectors().col(d - 1 - c);
    fix_sign(out.eigenvectors.col(c));
  }
  return out;
}

PcaResult pca_reduce(const RowMatrix& x, Eigen::Index target_dim) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (target_dim < 1 || target_dim > std::min(n, d)) {
    std::ostringstream os;
    os << "target_dim " << target_dim << " outside [1, " << std::min(n, d) << "]";
    throw Error(ErrorKind::invalid_argument, "linalg", os.str());
  }
  if (!x.allFinite()) throw Error(ErrorKind::invalid_input, "linalg", "data has non-finite entries");

  PcaResult out;
  out.mean = x.colwise().mean().transpose();
  RowMatrix centered = x.rowwise() - out.mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  MatrixXd cov = (centered.transpose() * centered) / denom;
  auto eig = sym_eig(SymMatrix::symmetrize(cov));

  out.basis = eig.eigenvectors.leftCols(target_dim).transpose();
  out.explained_variance = eig.eigenvalues.head(target_dim);
  out.projected = centered * out.basis.transpose();
  return out;
}

ProjectionCheck is_orthogonal_projection(const SymMatrix& p, double tol) {
  const MatrixXd& m = p.matrix();
  ProjectionCheck out;
  out.max_violation = (m * m - m).cwiseAbs().maxCoeff();
  out.ok = out.max_violation <= tol;
  const auto eig = sym_eig(p);
  out.rank = (eig.eigenvalues.array() > 0.5).count();
  return out;
}

double gram_deviation(const MatrixXd& basis) {
  if (basis.rows() == 0) return 0.0;
  const MatrixXd gram = basis * basis.transpose();
  return (gram - MatrixXd::Identity(basis.rows(), basis.rows())).cwiseAbs().maxCoeff();
}

SymMatrix rank_k_neutralizer(const MatrixXd& basis) {
  const Eigen::Index d = basis.cols();
  if (d == 0) throw Error(ErrorKind::invalid_argument, "linalg", "basis has zero columns");
  if (!basis.allFinite()) throw Error(ErrorKind::invalid_argument, "linalg", "basis has non-finite entries");
  const double dev = gram_deviation(basis);
  if (dev > 1e-8) {
    std::ostringstream os;
    os << "basis rows are not orthonormal (max Gram deviation " << dev << ")";
    throw Error(ErrorKind::invalid_argument, "linalg", os.str());
  }
  MatrixXd p = MatrixXd::Identity(d, d) - basis.transpose() * basis;
  return SymMatrix::symmetrize(p);
}

}  // namespace erasure
