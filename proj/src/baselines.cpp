#include "erasure/baselines.hpp"

#include "erasure/error.hpp"

#include <cmath>
#include <sstream>

namespace erasure {

namespace {

constexpr const char* kModule = "baselines";
constexpr double kCollapsedNorm = 1e-8;
constexpr double kRidge = 1e-8;
constexpr double kSingularRatio = 1e-12;

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, kModule, msg); }

// Orthonormal rows spanning the given directions, in order (modified Gram-Schmidt, two passes).
MatrixXd orthonormal_rows(const std::vector<VectorXd>& dirs, Eigen::Index d) {
  MatrixXd w(static_cast<Eigen::Index>(dirs.size()), d);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    VectorXd v = dirs[i];
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) {
        const auto row = w.row(static_cast<Eigen::Index>(j));
        v -= row.dot(v) * row.transpose();
      }
    const double norm = v.norm();
    if (norm < kCollapsedNorm) fail(ErrorKind::degenerate, "INLP directions became linearly dependent");
    w.row(static_cast<Eigen::Index>(i)) = (v / norm).transpose();
  }
  return w;
}

// Snaps a drifting composed projection back to an exact one with the same nullity.
MatrixXd reorthogonalize(const MatrixXd& p, Eigen::Index removed) {
  const auto eig = sym_eig(SymMatrix::symmetrize(p));
  const MatrixXd null_basis = eig.eigenvectors.rightCols(removed).transpose();
  return rank_k_neutralizer(null_basis).matrix();
}

// Orthonormal columns spanning range(P) for an (approximate) projection.
MatrixXd range_basis(const SymMatrix& p) {
  const auto eig = sym_eig(p);
  const Eigen::Index r = (eig.eigenvalues.array() > 0.5).count();
  return eig.eigenvectors.leftCols(r);
}

}  // namespace

ErasureProjection InlpFit::prefix(std::size_t i) const {
  if (i < 1 || i > iterations.size()) fail(ErrorKind::invalid_argument, "INLP prefix out of range");
  std::vector<VectorXd> dirs;
  for (std::size_t j = 0; j < i; ++j) dirs.push_back(iterations[j].theta);
  const Eigen::Index d = iterations.front().theta.size();
  return ErasureProjection::from_basis(orthonormal_rows(dirs, d), Method::inlp, {{"iterations", i}});
}

InlpFit inlp_fit(const Dataset& data, const InlpConfig& config) {
  const Eigen::Index d = data.dim();
  if (config.iterations < 1 || config.iterations >= d) {
    std::ostringstream os;
    os << "iterations must satisfy 1 <= k < D (k=" << config.iterations << ", D=" << d << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }
  const bool classify = config.spec.kind == GlmKind::logistic;
  if (classify && data.task() != TaskKind::binary_classification)
    fail(ErrorKind::invalid_input, "logistic INLP requires binary labels");
  if (config.spec.kind == GlmKind::pls)
    fail(ErrorKind::invalid_argument, "use inlp_rayleigh for the PLS objective");
  if (config.reorthogonalize_every < 1) fail(ErrorKind::invalid_argument, "reorthogonalize_every must be >= 1");

  InlpFit out;
  MatrixXd p = MatrixXd::Identity(d, d);
  std::vector<VectorXd> dirs;
  for (Eigen::Index i = 0; i < config.iterations; ++i) {
    const RowMatrix xp = data.x() * p;
    VectorXd theta;
    double metric = 0.0;
    if (classify) {
      const auto fit = train_logistic_probe(xp, data.y(), config.probe);
      theta = fit.theta;
      metric = score_probe(fit, xp, data.y()).accuracy;
    } else {
      theta = xp.completeOrthogonalDecomposition().solve(data.y());
      metric = (xp * theta - data.y()).squaredNorm() / static_cast<double>(data.size());
    }
    theta = p * theta;  // keep the direction inside range(P_i)
    const double norm = theta.norm();
    if (!std::isfinite(norm))
      fail(ErrorKind::divergence, "INLP predictor diverged at iteration " + std::to_string(i + 1));
    if (norm < kCollapsedNorm) {
      out.warnings.push_back("predictor collapsed to zero at iteration " + std::to_string(i + 1) +
                             "; no signal left, stopping early");
      break;
    }
    out.iterations.push_back({theta, metric, norm});
    dirs.push_back(theta);
    const VectorXd u = theta / norm;
    p = p - (p * u) * u.transpose();
    if (static_cast<int>(dirs.size()) % config.reorthogonalize_every == 0)
      p = reorthogonalize(p, static_cast<Eigen::Index>(dirs.size()));
  }
  out.composed = p;
  if (!dirs.empty()) {
    nlohmann::json meta = {{"iterations", dirs.size()}, {"objective", to_string(config.spec.kind)}};
    if (!out.warnings.empty()) meta["warnings"] = out.warnings;
    out.projection =
        ErasureProjection::from_basis(orthonormal_rows(dirs, d), Method::inlp, std::move(meta), config.seed);
  }
  return out;
}

OlsDirection inlp_regression_first_direction(const Dataset& data) {
  const MatrixXd gram = data.x().transpose() * data.x();
  const VectorXd rhs = data.x().transpose() * data.y();
  OlsDirection out;
  const auto spectrum = sym_eig(SymMatrix::symmetrize(gram)).eigenvalues;
  if (spectrum.minCoeff() > kSingularRatio * spectrum.maxCoeff()) {
    out.direction = gram.ldlt().solve(rhs);
    return out;
  }
  MatrixXd ridge = gram;
  ridge.diagonal().array() += kRidge;
  out.direction = ridge.ldlt().solve(rhs);
  out.regularized = true;
  return out;
}

InlpRayleighFit inlp_rayleigh(const SymMatrix& a, Eigen::Index k) {
  const Eigen::Index d = a.dim();
  if (k < 0 || k >= d) fail(ErrorKind::invalid_argument, "rank must satisfy 0 <= k < D");
  std::vector<VectorXd> dirs;
  SymMatrix p = SymMatrix::identity(d);
  auto restricted_top = [&](const SymMatrix& proj) {
    const MatrixXd q = range_basis(proj);
    const auto eig = sym_eig(SymMatrix::symmetrize(q.transpose() * a.matrix() * q));
    return std::pair<double, VectorXd>{eig.eigenvalues[0], q * eig.eigenvectors.col(0)};
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    dirs.push_back(restricted_top(p).second);
    p = rank_k_neutralizer(orthonormal_rows(dirs, d));
  }
  InlpRayleighFit out;
  out.basis = dirs.empty() ? MatrixXd(0, d) : orthonormal_rows(dirs, d);
  out.p = p;
  out.game_value = restricted_top(p).first;
  return out;
}

ErasureProjection pca_diff_fit(const RowMatrix& a, const RowMatrix& b, Eigen::Index k, bool center) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::dimension_mismatch, "pair lists must have the same shape");
  const Eigen::Index d = a.cols();
  if (k < 1 || k >= d) fail(ErrorKind::invalid_argument, "rank must satisfy 1 <= k < D");
  if (a.rows() < k) fail(ErrorKind::invalid_input, "need at least k pairs");
  RowMatrix diff = a - b;
  if (!diff.allFinite()) fail(ErrorKind::invalid_input, "pair vectors have non-finite entries");
  if (center) diff.rowwise() -= diff.colwise().mean();
  const auto eig = sym_eig(SymMatrix::symmetrize(diff.transpose() * diff / static_cast<double>(diff.rows())));
  const double top = eig.eigenvalues[0];
  const double cutoff = std::max(top * 1e-12, 1e-300);
  const Eigen::Index rank = (eig.eigenvalues.array() > cutoff).count();
  if (top <= 0 || rank < k) {
    std::ostringstream os;
    os << "rank deficiency: only " << rank << " linearly independent differences for k=" << k;
    fail(ErrorKind::degenerate, os.str());
  }
  MatrixXd basis = eig.eigenvectors.leftCols(k).transpose();
  nlohmann::json meta = {{"pairs", a.rows()}, {"centered", center}};
  return ErasureProjection::from_basis(std::move(basis), Method::pca_diff, std::move(meta));
}

}  // namespace erasure
