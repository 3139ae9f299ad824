#include "erasure/rlace.hpp"

#include "erasure/error.hpp"
#include "erasure/fantope.hpp"
#include "erasure/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace erasure {

namespace {

constexpr const char* kModule = "rlace";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, kModule, msg); }

void require_logistic(const GlmSpec& spec) {
  if (spec.kind != GlmKind::logistic)
    fail(ErrorKind::invalid_argument, "R-LACE supports the logistic loss only; use the closed forms for regression");
}

void require_classification(const Dataset& data, const char* what) {
  if (data.task() != TaskKind::binary_classification)
    fail(ErrorKind::invalid_input, std::string(what) + " must have binary labels");
}

// Mean loss and score gradient g = X^T r / N at scores X (I - E) theta.
struct BatchEval {
  double loss = 0.0;
  VectorXd g;
};

BatchEval eval_batch(const RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y,
                     const GlmSpec& spec) {
  const MatrixXd p = MatrixXd::Identity(state.eraser.dim(), state.eraser.dim()) - state.eraser.matrix();
  const VectorXd w = p * state.theta;
  auto lg = kernels::parallel::loss_grad(spec.kind, x, w, y);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  return {lg.loss_sum * inv_n, lg.grad_sum * inv_n};
}

void check_batch(const RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y) {
  if (x.cols() != state.theta.size() || x.cols() != state.eraser.dim() || x.rows() != y.size() || x.rows() == 0)
    fail(ErrorKind::dimension_mismatch, "batch does not match the adversary state");
}

}  // namespace

void RlaceConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::invalid_argument, msg); };
  if (k < 1) bad("rank must be >= 1");
  if (outer_loops < 1 || inner_loops < 1) bad("outer and inner loop counts must be >= 1");
  if (!(theta_lr > 0) || !(eraser_lr > 0)) bad("learning rates must be positive");
  if (batch_size < 1) bad("batch size must be >= 1");
  if (eval_every < 1) bad("eval_every must be >= 1");
  if (!(dev_fraction > 0 && dev_fraction < 1)) bad("dev_fraction must lie in (0, 1)");
  if (weight_decay < 0) bad("weight decay must be non-negative");
}

RelaxedAdversaryState initial_state(Eigen::Index dim, Eigen::Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RelaxedAdversaryState state;
  state.theta.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) state.theta[i] = 0.01 * normal(rng);
  MatrixXd g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = normal(rng);
  state.eraser = fantope_project(SymMatrix::symmetrize(g), {dim, k});
  state.best_eraser = state.eraser;
  return state;
}

void predictor_step(RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y, const GlmSpec& spec,
                    const RlaceConfig& config) {
  check_batch(state, x, y);
  const auto ev = eval_batch(state, x, y, spec);
  if (!std::isfinite(ev.loss) || !ev.g.allFinite())
    fail(ErrorKind::divergence, "non-finite loss in predictor step " + std::to_string(state.predictor_steps));
  const VectorXd grad = ev.g - state.eraser.matrix() * ev.g;  // (I - E) g
  if (config.weight_decay > 0) state.theta *= 1.0 - config.theta_lr * config.weight_decay;
  state.theta -= config.theta_lr * grad;
  ++state.predictor_steps;
}

void adversary_step(RelaxedAdversaryState& state, const RowMatrix& x, const VectorXd& y, const GlmSpec& spec,
                    const RlaceConfig& config) {
  check_batch(state, x, y);
  const auto ev = eval_batch(state, x, y, spec);
  if (!std::isfinite(ev.loss) || !ev.g.allFinite())
    fail(ErrorKind::divergence, "non-finite loss in adversary step " + std::to_string(state.adversary_steps));
  // d loss / dE = -sym(theta g^T)
  const MatrixXd outer = state.theta * ev.g.transpose();
  const MatrixXd ascent = state.eraser.matrix() - config.eraser_lr * 0.5 * (outer + outer.transpose());
  state.eraser = fantope_project(SymMatrix::symmetrize(ascent), {state.eraser.dim(), config.k});
  ++state.adversary_steps;
}

SnapResult snap_to_projection(const SymMatrix& eraser, Eigen::Index k) {
  const auto eig = sym_eig(eraser);
  MatrixXd basis = eig.eigenvectors.leftCols(k).transpose();
  const double residual = (eraser.matrix() - basis.transpose() * basis).norm();
  return {ErasureProjection::from_basis(std::move(basis), Method::rlace), residual};
}

ProbeScore evaluate_adversary(const SymMatrix& eraser, const Dataset& dev, const RlaceConfig& config) {
  require_classification(dev, "dev set");
  const auto snap = snap_to_projection(eraser, config.k);
  const RowMatrix projected = apply_projection(dev.x(), snap.projection);
  const auto fit = train_logistic_probe(projected, dev.y(), config.probe);
  return score_probe(fit, projected, dev.y());
}

RlaceFit rlace_fit(const Dataset& train, const Dataset& dev, const GlmSpec& spec, const RlaceConfig& config) {
  config.validate();
  require_logistic(spec);
  require_classification(train, "training set");
  require_classification(dev, "dev set");
  const Eigen::Index d = train.dim();
  if (dev.dim() != d) fail(ErrorKind::dimension_mismatch, "training and dev sets differ in dimension");
  if (config.k >= d) {
    std::ostringstream os;
    os << "rank must satisfy 1 <= k < D (k=" << config.k << ", D=" << d << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }

  std::mt19937_64 rng(config.seed);
  RelaxedAdversaryState state = initial_state(d, config.k, rng);
  FitDiagnostics diag;

  const Eigen::Index n = train.size();
  const Eigen::Index bs = std::min(config.batch_size, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::size_t pos = order.size();
  RowMatrix xb(bs, d);
  VectorXd yb(bs);
  auto next_batch = [&] {
    if (pos + static_cast<std::size_t>(bs) > order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      pos = 0;
    }
    for (Eigen::Index i = 0; i < bs; ++i) {
      const Eigen::Index r = order[pos + static_cast<std::size_t>(i)];
      xb.row(i) = train.x().row(r);
      yb[i] = train.y()[r];
    }
    pos += static_cast<std::size_t>(bs);
  };

  auto evaluate = [&](long step) {
    const auto score = evaluate_adversary(state.eraser, dev, config);
    diag.evaluations.push_back({step, score.loss, score.accuracy});
    if (score.loss > state.best_loss) {
      state.best_loss = score.loss;
      state.best_accuracy = score.accuracy;
      state.best_eraser = state.eraser;
      state.best_step = step;
    }
  };

  for (long t = 0; t < config.outer_loops; ++t) {
    for (int j = 0; j < config.inner_loops; ++j) {
      next_batch();
      predictor_step(state, xb, yb, spec, config);
    }
    for (int j = 0; j < config.inner_loops; ++j) {
      next_batch();
      adversary_step(state, xb, yb, spec, config);
    }
    const long done = t + 1;
    if (done % config.eval_every == 0 || done == config.outer_loops) evaluate(done);
  }

  diag.final_spectrum = sym_eig(state.eraser).eigenvalues;
  diag.best_spectrum = sym_eig(state.best_eraser).eigenvalues;
  diag.best_loss = state.best_loss;
  diag.best_accuracy = state.best_accuracy;
  diag.best_step = state.best_step;

  auto snap = snap_to_projection(state.best_eraser, config.k);
  diag.snap_residual = snap.residual;
  nlohmann::json meta = {{"best_dev_loss", diag.best_loss},
                         {"best_dev_accuracy", diag.best_accuracy},
                         {"best_step", diag.best_step},
                         {"snap_residual", diag.snap_residual}};
  auto proj = ErasureProjection::from_basis(snap.projection.basis(), Method::rlace, std::move(meta), config.seed);
  return {std::move(proj), std::move(diag)};
}

RlaceFit rlace_fit(const Dataset& data, const GlmSpec& spec, const RlaceConfig& config) {
  config.validate();
  require_classification(data, "dataset");
  std::mt19937_64 split_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), split_rng);
  const auto n_dev = static_cast<std::size_t>(std::floor(config.dev_fraction * static_cast<double>(data.size())));
  if (n_dev < 2 || n_dev + 2 > idx.size()) fail(ErrorKind::invalid_input, "dataset too small for the dev split");
  std::vector<Eigen::Index> dev_rows(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_dev));
  std::vector<Eigen::Index> train_rows(idx.begin() + static_cast<std::ptrdiff_t>(n_dev), idx.end());
  return rlace_fit(data.subset(train_rows), data.subset(dev_rows), spec, config);
}

}  // namespace erasure
