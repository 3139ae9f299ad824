#include "erasure/error.hpp"
#include "erasure/fantope.hpp"
#include "erasure/rlace.hpp"
#include "erasure/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace erasure;

namespace {

const GlmSpec kLogistic{GlmKind::logistic};

// x = +-(1, 0) + noise * e2, labels by the sign of the first coordinate.
Dataset separable_along_e1(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  RowMatrix x(n, 2);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = i % 2;
    x(i, 0) = y[i] == 1 ? 1.0 : -1.0;
    x(i, 1) = noise(rng);
  }
  return Dataset(x, y, TaskKind::binary_classification);
}

RelaxedAdversaryState state_with(const MatrixXd& eraser, const VectorXd& theta) {
  RelaxedAdversaryState s;
  s.eraser = SymMatrix::symmetrize(eraser);
  s.best_eraser = s.eraser;
  s.theta = theta;
  return s;
}

// Best accuracy of a threshold-at-zero classifier over a grid of directions in the plane.
double grid_probe_accuracy(const RowMatrix& x, const VectorXd& y) {
  double best = 0.0;
  for (int i = 0; i < 360; ++i) {
    const double a = i * M_PI / 180.0;
    Eigen::Vector2d w(std::cos(a), std::sin(a));
    Eigen::Index correct = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      if ((x.row(r).dot(w) > 0 ? 1.0 : 0.0) == y[r]) ++correct;
    best = std::max(best, static_cast<double>(correct) / static_cast<double>(x.rows()));
  }
  return best;
}

}  // namespace

TEST_CASE("config validation") {
  RlaceConfig c;
  CHECK_NOTHROW(c.validate());
  c.dev_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RlaceConfig{};
  c.theta_lr = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RlaceConfig{};
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("initial state lies in the Fantope") {
  std::mt19937_64 rng(81);
  const auto s = initial_state(10, 3, rng);
  CHECK(is_fantope_member(s.eraser, 3, 1e-8));
  CHECK(s.theta.norm() < 0.1);
}

TEST_CASE("adversary step keeps the eraser in the Fantope") {
  std::mt19937_64 rng(82);
  const RowMatrix x = test::gaussian(64, 6, rng);
  VectorXd y(64);
  for (Eigen::Index i = 0; i < 64; ++i) y[i] = x(i, 0) > 0 ? 1.0 : 0.0;
  auto state = initial_state(6, 2, rng);
  RlaceConfig c;
  c.k = 2;
  c.eraser_lr = 0.5;
  for (int step = 0; step < 50; ++step) {
    predictor_step(state, x, y, kLogistic, c);
    adversary_step(state, x, y, kLogistic, c);
    CHECK(is_fantope_member(state.eraser, 2, 1e-6));
  }
  CHECK(state.adversary_steps == 50);
}

TEST_CASE("zero gradient leaves a Fantope member unchanged") {
  RowMatrix x(2, 2);
  x << 1, 0, -1, 0;
  VectorXd y(2);
  y << 1, 0;
  MatrixXd e = MatrixXd::Zero(2, 2);
  e(1, 1) = 1.0;
  auto state = state_with(e, VectorXd::Zero(2));
  RlaceConfig c;
  adversary_step(state, x, y, kLogistic, c);
  CHECK((state.eraser.matrix() - e).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one adversary step from a zero-gradient-free start moves toward the signal") {
  // Signal along e1; eraser starts mostly on e2, theta aligned with e1.
  RowMatrix x(2, 2);
  x << 1, 0, -1, 0;
  VectorXd y(2);
  y << 1, 0;
  MatrixXd e = MatrixXd::Zero(2, 2);
  e(0, 0) = 0.2;
  e(1, 1) = 0.8;
  VectorXd theta(2);
  theta << 1, 0;
  auto state = state_with(e, theta);
  RlaceConfig c;
  c.eraser_lr = 0.1;
  // Hand gradient: scores s = +-0.8, r = sigmoid(s) - y, g = X^T r / 2.
  const double r = 1.0 / (1.0 + std::exp(0.8));  // = 1 - sigmoid(0.8)
  const double g0 = -r;
  const double expected_e00 = 0.2 - 0.1 * g0;  // ascent: E - lr * sym(theta g^T)
  adversary_step(state, x, y, kLogistic, c);
  CHECK(state.eraser(0, 0) > 0.2);
  // The projection shifts both eigenvalues equally to restore the trace.
  const double shift = (expected_e00 + 0.8 - 1.0) / 2.0;
  CHECK(state.eraser(0, 0) == doctest::Approx(expected_e00 - shift).epsilon(1e-10));
}

TEST_CASE("predictor step at the optimum leaves theta unchanged") {
  RowMatrix x(4, 2);
  x << 1, 0, -1, 0, 1, 0, -1, 0;
  VectorXd y(4);
  y << 1, 0, 0, 1;  // balanced at every x, optimum theta = 0
  auto state = state_with(MatrixXd::Zero(2, 2), VectorXd::Zero(2));
  RlaceConfig c;
  predictor_step(state, x, y, kLogistic, c);
  CHECK(state.theta.norm() < 1e-10);
}

TEST_CASE("a tiny predictor step lowers the batch loss") {
  std::mt19937_64 rng(83);
  const RowMatrix x = test::gaussian(50, 4, rng);
  VectorXd y(50);
  for (Eigen::Index i = 0; i < 50; ++i) y[i] = x(i, 1) + 0.3 * x(i, 2) > 0 ? 1.0 : 0.0;
  auto state = initial_state(4, 1, rng);
  RlaceConfig c;
  c.theta_lr = 1e-4;
  const MatrixXd p = MatrixXd::Identity(4, 4) - state.eraser.matrix();
  const double before = batch_loss(kLogistic, state.theta, p, x, y);
  predictor_step(state, x, y, kLogistic, c);
  CHECK(batch_loss(kLogistic, state.theta, p, x, y) < before);
}

TEST_CASE("non-finite losses raise a divergence error") {
  RowMatrix x(2, 2);
  x << 1, 0, -1, 0;
  VectorXd y(2);
  y << 1, 0;
  VectorXd theta(2);
  theta << NAN, 0;
  auto state = state_with(MatrixXd::Zero(2, 2), theta);
  try {
    predictor_step(state, x, y, kLogistic, RlaceConfig{});
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::divergence);
    CHECK(std::string(e.what()).find("predictor") != std::string::npos);
  }
}

TEST_CASE("snap_to_projection examples") {
  MatrixXd e1 = MatrixXd::Zero(3, 3);
  e1(0, 0) = 1;
  const auto exact = snap_to_projection(SymMatrix(e1), 1);
  MatrixXd expected = MatrixXd::Identity(3, 3);
  expected(0, 0) = 0;
  CHECK((exact.projection.matrix().matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(exact.residual < 1e-15);

  MatrixXd soft = MatrixXd::Zero(3, 3);
  soft.diagonal() << 0.9, 0.1, 0;
  const auto snapped = snap_to_projection(SymMatrix(soft), 1);
  CHECK(snapped.projection.matrix()(0, 0) == 0.0);
  CHECK(snapped.residual == doctest::Approx(std::sqrt(0.02)));
}

TEST_CASE("evaluate_adversary with and without the signal direction") {
  const auto dev = separable_along_e1(2000, 84);
  RlaceConfig c;
  MatrixXd keep = MatrixXd::Zero(2, 2);
  keep(1, 1) = 1;  // erase the noise direction, keep the signal
  CHECK(evaluate_adversary(SymMatrix(keep), dev, c).accuracy == 1.0);
  MatrixXd erase = MatrixXd::Zero(2, 2);
  erase(0, 0) = 1;
  CHECK(evaluate_adversary(SymMatrix(erase), dev, c).accuracy <= dev.majority_share() + 0.03);
}

TEST_CASE("an uninformative projection leaves the probe at the entropy bound") {
  RowMatrix x(6, 2);
  x << 1, 0, -1, 0, 2, 0, -2, 0, 1, 0, -1, 0;
  VectorXd y(6);
  y << 1, 0, 1, 0, 1, 0;
  const Dataset dev(x, y, TaskKind::binary_classification);
  MatrixXd erase = MatrixXd::Zero(2, 2);
  erase(0, 0) = 1;
  const auto score = evaluate_adversary(SymMatrix(erase), dev, RlaceConfig{});
  CHECK(score.accuracy == doctest::Approx(dev.majority_share()));
  CHECK(score.loss >= std::log(2.0) - 1e-6);
}

TEST_CASE("rank-1 fit on data separable along e1") {
  const auto train = separable_along_e1(1000, 85);
  const auto dev = separable_along_e1(400, 86);
  const auto test_set = separable_along_e1(2000, 87);
  RlaceConfig c;
  c.outer_loops = 2000;
  c.eval_every = 250;
  c.seed = 1;
  const auto fit = rlace_fit(train, dev, kLogistic, c);
  const double angle = std::acos(std::min(1.0, std::abs(fit.projection.basis()(0, 0))));
  CHECK(angle < 0.05);
  const RowMatrix projected = apply_projection(test_set.x(), fit.projection);
  CHECK(grid_probe_accuracy(projected, test_set.y()) <= test_set.majority_share() + 0.03);
}

TEST_CASE("best adversary has the highest recorded dev loss") {
  SynthSpec s{SynthKind::planted_1d, 600, 10, 3, 0};
  const auto data = make_synth(s).dataset();
  RlaceConfig c;
  c.outer_loops = 600;
  c.eval_every = 100;
  c.seed = 2;
  const auto fit = rlace_fit(data, kLogistic, c);
  REQUIRE(fit.diagnostics.evaluations.size() == 6);
  double best = -1.0;
  for (const auto& e : fit.diagnostics.evaluations) best = std::max(best, e.loss);
  CHECK(fit.diagnostics.best_loss == best);
  for (Eigen::Index i = 1; i < fit.diagnostics.final_spectrum.size(); ++i)
    CHECK(fit.diagnostics.final_spectrum[i - 1] >= fit.diagnostics.final_spectrum[i]);
}

TEST_CASE("identical seeds give bit-identical projections") {
  SynthSpec s{SynthKind::planted_1d, 500, 8, 4, 0};
  const auto data = make_synth(s).dataset();
  RlaceConfig c;
  c.outer_loops = 300;
  c.eval_every = 100;
  c.seed = 9;
  const auto a = rlace_fit(data, kLogistic, c);
  const auto b = rlace_fit(data, kLogistic, c);
  CHECK(a.projection.basis() == b.projection.basis());
  CHECK(projection_to_json(a.projection).dump() == projection_to_json(b.projection).dump());
}

TEST_CASE("rlace_fit input checks") {
  SynthSpec s{SynthKind::planted_1d, 200, 4, 5, 0};
  const auto data = make_synth(s).dataset();
  RlaceConfig c;
  c.k = 4;
  CHECK_THROWS_AS(rlace_fit(data, kLogistic, c), Error);
  c.k = 1;
  CHECK_THROWS_AS(rlace_fit(data, GlmSpec{GlmKind::squared_error}, c), Error);
  const Dataset regression(data.x(), data.x().col(0), TaskKind::regression);
  CHECK_THROWS_AS(rlace_fit(regression, kLogistic, c), Error);
}
