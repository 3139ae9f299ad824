// Serial reference kernels against their OpenMP counterparts.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include "erasure/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace erasure;

namespace {

RowMatrix random_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(rng);
  return m;
}

VectorXd labels(Eigen::Index n) {
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(i % 2);
  return y;
}

template <bool Parallel>
void BM_LossGrad(benchmark::State& state) {
  const Eigen::Index n = state.range(0), d = state.range(1);
  const RowMatrix x = random_rows(n, d, 1);
  const VectorXd w = random_rows(d, 1, 2).col(0);
  const VectorXd y = labels(n);
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::loss_grad(GlmKind::logistic, x, w, y)
                      : kernels::serial::loss_grad(GlmKind::logistic, x, w, y);
    benchmark::DoNotOptimize(r.loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <bool Parallel>
void BM_WeightedGram(benchmark::State& state) {
  const Eigen::Index n = state.range(0), d = state.range(1);
  const RowMatrix x = random_rows(n, d, 3);
  const VectorXd weights = VectorXd::Constant(n, 0.25);
  for (auto _ : state) {
    MatrixXd g = Parallel ? kernels::parallel::weighted_gram(x, weights) : kernels::serial::weighted_gram(x, weights);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const Eigen::Index n = state.range(0), d = state.range(1);
  const RowMatrix x = random_rows(n, d, 4);
  const RowMatrix centroids = random_rows(8, d, 5);
  for (auto _ : state) {
    auto a = Parallel ? kernels::parallel::assign_nearest(x, centroids) : kernels::serial::assign_nearest(x, centroids);
    benchmark::DoNotOptimize(a.labels.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void shapes(benchmark::internal::Benchmark* b) {
  for (long n : {4096, 65536}) b->Args({n, 50});
  b->Args({16384, 300});
}

}  // namespace

BENCHMARK(BM_LossGrad<false>)->Name("loss_grad/serial")->Apply(shapes);
BENCHMARK(BM_LossGrad<true>)->Name("loss_grad/parallel")->Apply(shapes);
BENCHMARK(BM_WeightedGram<false>)->Name("weighted_gram/serial")->Apply(shapes);
BENCHMARK(BM_WeightedGram<true>)->Name("weighted_gram/parallel")->Apply(shapes);
BENCHMARK(BM_AssignNearest<false>)->Name("assign_nearest/serial")->Apply(shapes);
BENCHMARK(BM_AssignNearest<true>)->Name("assign_nearest/parallel")->Apply(shapes);

BENCHMARK_MAIN();
