#include "erasure/kernels.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace erasure;

namespace {

VectorXd labels01(Eigen::Index n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = coin(rng) ? 1.0 : 0.0;
  return y;
}

}  // namespace

TEST_CASE("parallel loss_grad agrees with the serial reference") {
  std::mt19937_64 rng(21);
  for (Eigen::Index n : {1, 7, 255, 256, 257, 1000}) {
    const RowMatrix x = test::gaussian(n, 9, rng);
    const VectorXd w = test::gaussian_vector(9, rng);
    const VectorXd y = labels01(n, rng);
    for (GlmKind kind : {GlmKind::logistic, GlmKind::squared_error, GlmKind::pls}) {
      const auto s = kernels::serial::loss_grad(kind, x, w, y);
      const auto p = kernels::parallel::loss_grad(kind, x, w, y);
      CHECK(p.loss_sum == doctest::Approx(s.loss_sum).epsilon(1e-12));
      CHECK((p.grad_sum - s.grad_sum).norm() <= 1e-10 * (1.0 + s.grad_sum.norm()));
    }
  }
}

TEST_CASE("parallel weighted_gram agrees with the serial reference") {
  std::mt19937_64 rng(22);
  for (Eigen::Index n : {3, 256, 600}) {
    const RowMatrix x = test::gaussian(n, 6, rng);
    const VectorXd weights = test::gaussian_vector(n, rng).cwiseAbs();
    const MatrixXd s = kernels::serial::weighted_gram(x, weights);
    const MatrixXd p = kernels::parallel::weighted_gram(x, weights);
    CHECK((p - s).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + s.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("assign_nearest agrees and breaks ties toward the lower index") {
  std::mt19937_64 rng(23);
  const RowMatrix x = test::gaussian(700, 5, rng);
  const RowMatrix c = test::gaussian(4, 5, rng);
  const auto s = kernels::serial::assign_nearest(x, c);
  const auto p = kernels::parallel::assign_nearest(x, c);
  CHECK(s.labels == p.labels);
  CHECK((s.sq_dist - p.sq_dist).cwiseAbs().maxCoeff() < 1e-10);

  RowMatrix pt(1, 1);
  pt << 0.0;
  RowMatrix twins(2, 1);
  twins << -1.0, 1.0;
  CHECK(kernels::serial::assign_nearest(pt, twins).labels[0] == 0);
  CHECK(kernels::parallel::assign_nearest(pt, twins).labels[0] == 0);
}

TEST_CASE("parallel kernels are reproducible run to run") {
  std::mt19937_64 rng(24);
  const RowMatrix x = test::gaussian(3000, 20, rng);
  const VectorXd w = test::gaussian_vector(20, rng);
  const VectorXd y = labels01(3000, rng);
  const auto a = kernels::parallel::loss_grad(GlmKind::logistic, x, w, y);
  const auto b = kernels::parallel::loss_grad(GlmKind::logistic, x, w, y);
  CHECK(a.loss_sum == b.loss_sum);
  CHECK(a.grad_sum == b.grad_sum);
}
