#include "erasure/closedform.hpp"

#include "erasure/error.hpp"

#include <cmath>
#include <sstream>

namespace erasure {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kTieTol = 1e-10;

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "closedform", msg); }

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd pls_labels(const Dataset& data) {
  if (data.task() == TaskKind::binary_classification) return (2.0 * data.y().array() - 1.0).matrix();
  return data.y();
}

}  // namespace

ErasureProjection EquilibriumResult::to_projection(Method method) const {
  if (basis.rows() == 0)
    fail(ErrorKind::degenerate, "equilibrium neutralizes no direction; the identity is not a rank-reducing projection");
  nlohmann::json meta = metadata;
  meta["game_value"] = game_value;
  if (!warnings.empty()) meta["warnings"] = warnings;
  return ErasureProjection::from_basis(basis, method, std::move(meta));
}

double rayleigh_quotient(const SymMatrix& a, const VectorXd& theta, const MatrixXd& p) {
  if (theta.size() != a.dim() || p.rows() != a.dim() || p.cols() != a.dim())
    fail(ErrorKind::dimension_mismatch, "Rayleigh quotient operands disagree in dimension");
  const VectorXd pt = p * theta;
  const double denom = pt.squaredNorm();
  if (denom == 0.0) fail(ErrorKind::invalid_argument, "Rayleigh quotient undefined for P theta = 0");
  return pt.dot(a.matrix() * pt) / denom;
}

EquilibriumResult regression_equilibrium(const Dataset& data, bool center) {
  if (data.task() != TaskKind::regression)
    fail(ErrorKind::invalid_argument, "regression equilibrium requires a regression dataset");
  const Eigen::Index d = data.dim();
  RowMatrix x = data.x();
  VectorXd y = data.y();
  EquilibriumResult out;
  if (center) {
    const VectorXd x_mean = x.colwise().mean().transpose();
    const double y_mean = y.mean();
    x.rowwise() -= x_mean.transpose();
    y.array() -= y_mean;
    out.metadata["centered"] = true;
    out.metadata["x_mean"] = to_vector(x_mean);
    out.metadata["y_mean"] = y_mean;
  } else {
    out.metadata["centered"] = false;
  }

  out.theta_star = VectorXd::Zero(d);
  out.game_value = y.squaredNorm() / static_cast<double>(y.size());
  const VectorXd c = x.transpose() * y;
  const double norm = c.norm();
  if (norm < kDegenerateNorm) {
    out.p = SymMatrix::identity(d);
    out.basis = MatrixXd(0, d);
    out.degenerate = true;
    out.warnings.emplace_back("X^T y is zero: y is already uncorrelated with X, nothing to remove");
    return out;
  }
  out.basis = (c / norm).transpose();
  out.p = rank_k_neutralizer(out.basis);
  return out;
}

EquilibriumResult rayleigh_equilibrium(const RayleighProblem& problem) {
  const Eigen::Index d = problem.a.dim();
  const Eigen::Index k = problem.k;
  if (k < 0 || k >= d) {
    std::ostringstream os;
    os << "rank must satisfy 0 <= k < D (k=" << k << ", D=" << d << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }
  const auto eig = sym_eig(problem.a);
  EquilibriumResult out;
  out.basis = eig.eigenvectors.leftCols(k).transpose();
  out.p = k == 0 ? SymMatrix::identity(d) : rank_k_neutralizer(out.basis);
  out.theta_star = eig.eigenvectors.col(k);
  out.game_value = eig.eigenvalues[k];
  out.metadata["eigenvalues"] = to_vector(eig.eigenvalues);
  if (k >= 1 && std::abs(eig.eigenvalues[k - 1] - eig.eigenvalues[k]) <= kTieTol) {
    std::ostringstream os;
    os << "ambiguous split: eigenvalues " << k << " and " << k + 1
       << " coincide, the neutralized eigenspace straddles the cut";
    out.warnings.push_back(os.str());
  }
  return out;
}

SymMatrix pls_matrix(const Dataset& data) {
  const VectorXd c = data.x().transpose() * pls_labels(data);
  return SymMatrix::symmetrize(c * c.transpose());
}

EquilibriumResult pls_equilibrium(const Dataset& data, Eigen::Index k) {
  const VectorXd c = data.x().transpose() * pls_labels(data);
  EquilibriumResult out = rayleigh_equilibrium({SymMatrix::symmetrize(c * c.transpose()), k});
  out.metadata["label_coding"] = data.task() == TaskKind::binary_classification ? "plus-minus-one" : "raw";
  if (c.norm() < kDegenerateNorm) {
    out.degenerate = true;
    out.warnings.emplace_back("X^T y is zero: the PLS objective is already 0");
  }
  return out;
}

}  // namespace erasure
