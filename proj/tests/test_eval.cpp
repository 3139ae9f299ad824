#include "erasure/error.hpp"
#include "erasure/eval.hpp"
#include "erasure/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace erasure;

namespace {

// Attribute sets A = {e1}, B = {-e1}: s(w) is twice the cosine of w with e1.
WeatSpec hand_weat() {
  WeatSpec spec;
  spec.a = RowMatrix(1, 2);
  spec.a << 1, 0;
  spec.b = RowMatrix(1, 2);
  spec.b << -1, 0;
  spec.x = RowMatrix(2, 2);
  spec.x << 1, std::sqrt(3.0), 1, -std::sqrt(3.0);  // cos = 1/2, s = 1
  spec.y = RowMatrix(2, 2);
  spec.y << -1, std::sqrt(3.0), -1, -std::sqrt(3.0);  // s = -1
  return spec;
}

double entropy_of(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

}  // namespace

TEST_CASE("probe accuracy examples") {
  SynthSpec s{SynthKind::planted_1d, 1000, 10, 1, 0};
  const auto train = make_synth(s).dataset();
  s.draw = 1;
  const auto test_set = make_synth(s).dataset();
  CHECK(probe_accuracy(train, test_set).accuracy > 0.95);

  const Dataset zeros(RowMatrix::Zero(10, 3), train.y().head(10), TaskKind::binary_classification);
  CHECK(probe_accuracy(zeros, zeros).accuracy == doctest::Approx(zeros.majority_share()));
}

TEST_CASE("probe accuracy commutes with applying the projection") {
  SynthSpec s{SynthKind::planted_1d, 500, 6, 2, 0};
  const auto data = make_synth(s);
  const auto proj = ErasureProjection::from_basis(data.planted, Method::rlace);
  const auto ds = data.dataset();
  const auto with = probe_accuracy(ds, ds, proj);
  const auto pre = ds.with_x(apply_projection(ds.x(), proj));
  const auto without = probe_accuracy(pre, pre);
  CHECK(with.accuracy == without.accuracy);
  CHECK(with.loss == without.loss);
}

TEST_CASE("WEAT hand construction") {
  const auto r = weat_statistic(hand_weat());
  CHECK(std::abs(r.d - 2.0) < 1e-12);
  CHECK(std::abs(r.p_value - 1.0 / 6.0) < 1e-12);
  CHECK(r.exact);
  CHECK(r.permutations == 6);
}

TEST_CASE("WEAT with identical target sets has d = 0") {
  auto spec = hand_weat();
  spec.y = spec.x;
  CHECK(weat_statistic(spec).d == 0.0);

  std::mt19937_64 rng(5);
  for (Eigen::Index n : {3, 5, 7}) {
    WeatSpec random{test::gaussian(n, 9, rng), {}, test::gaussian(4, 9, rng), test::gaussian(4, 9, rng)};
    random.y = random.x;
    const auto r = weat_statistic(random);
    CHECK(r.d == 0.0);
    CHECK(r.statistic == 0.0);
  }
}

TEST_CASE("WEAT with A = B flags zero variance") {
  auto spec = hand_weat();
  spec.b = spec.a;
  const auto r = weat_statistic(spec);
  CHECK(r.zero_variance);
  CHECK(r.d == 0.0);
}

TEST_CASE("WEAT input errors") {
  auto spec = hand_weat();
  spec.x.row(0).setZero();
  CHECK_THROWS_AS(weat_statistic(spec), Error);
  spec = hand_weat();
  spec.y = spec.y.topRows(1).eval();
  CHECK_THROWS_AS(weat_statistic(spec), Error);
}

TEST_CASE("WEAT d is invariant under positive rescaling") {
  std::mt19937_64 rng(101);
  WeatSpec spec{test::gaussian(5, 4, rng), test::gaussian(5, 4, rng), test::gaussian(3, 4, rng),
                test::gaussian(3, 4, rng)};
  const auto base = weat_statistic(spec);
  spec.x *= 3.5;
  spec.y *= 0.2;
  spec.a *= 7.0;
  spec.b *= 1e-3;
  CHECK(std::abs(weat_statistic(spec).d - base.d) < 1e-10);
}

TEST_CASE("WEAT switches to seeded sampling for large sets") {
  std::mt19937_64 rng(102);
  WeatSpec spec{test::gaussian(10, 4, rng), test::gaussian(10, 4, rng), test::gaussian(3, 4, rng),
                test::gaussian(3, 4, rng)};
  spec.x.col(0).array() += 2.0;
  const auto a = weat_statistic(spec, 5);
  const auto b = weat_statistic(spec, 5);
  CHECK_FALSE(a.exact);
  CHECK(a.permutations == kWeatSamples);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value > 0.0);
  CHECK(a.p_value < 0.05);
}

TEST_CASE("V-measure trivial cases") {
  const std::vector<int> truth{0, 0, 1, 1};
  CHECK(v_measure(truth, truth).v == 1.0);
  CHECK(v_measure(truth, {5, 5, 9, 9}).v == 1.0);
  const auto single = v_measure(truth, {0, 0, 0, 0});
  CHECK(single.homogeneity == 0.0);
  CHECK(single.v == 0.0);
  CHECK_THROWS_AS(v_measure(truth, {0, 1}), Error);
}

TEST_CASE("V-measure against an entropy-table oracle") {
  const std::vector<int> truth{0, 0, 1, 1}, clusters{0, 1, 1, 1};
  const double h_c = entropy_of({0.5, 0.5});
  const double h_k = entropy_of({0.25, 0.75});
  // H(C|K): cluster 0 is pure; cluster 1 holds (1 of class 0, 2 of class 1).
  const double h_c_given_k = 0.75 * entropy_of({1.0 / 3, 2.0 / 3});
  // H(K|C): class 0 splits evenly, class 1 is pure.
  const double h_k_given_c = 0.5 * entropy_of({0.5, 0.5});
  const double h = 1 - h_c_given_k / h_c, c = 1 - h_k_given_c / h_k;
  const auto r = v_measure(truth, clusters);
  CHECK(std::abs(r.homogeneity - h) < 1e-12);
  CHECK(std::abs(r.completeness - c) < 1e-12);
  CHECK(std::abs(r.v - 2 * h * c / (h + c)) < 1e-12);
}

TEST_CASE("V-measure is symmetric in its arguments") {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> a(0, 3), b(0, 4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
      x[static_cast<std::size_t>(i)] = a(rng);
      y[static_cast<std::size_t>(i)] = b(rng);
    }
    CHECK(std::abs(v_measure(x, y).v - v_measure(y, x).v) < 1e-12);
  }
}

TEST_CASE("k-means on two blobs recovers blob identity") {
  SynthSpec s{SynthKind::blobs, 400, 5, 11, 0};
  const auto data = make_synth(s);
  const auto km = kmeans_cluster(data.x, 2, 3);
  std::vector<int> truth(400);
  for (int i = 0; i < 400; ++i) truth[static_cast<std::size_t>(i)] = static_cast<int>(data.y[i]);
  CHECK(v_measure(truth, km.labels).v == 1.0);
  CHECK(km.labels[0] == 0);
}

TEST_CASE("k-means edge cases and determinism") {
  std::mt19937_64 rng(104);
  const RowMatrix x = test::gaussian(12, 3, rng);
  const auto one = kmeans_cluster(x, 1, 0);
  for (int l : one.labels) CHECK(l == 0);
  const auto all = kmeans_cluster(x, 12, 0);
  CHECK(all.inertia == 0.0);
  const auto a = kmeans_cluster(x, 3, 42);
  const auto b = kmeans_cluster(x, 3, 42);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
  KMeansOptions serial;
  serial.parallel = false;
  CHECK(kmeans_cluster(x, 3, 42, serial).labels == a.labels);
  CHECK_THROWS_AS(kmeans_cluster(x, 13, 0), Error);
}

TEST_CASE("k-means reseeds empty clusters") {
  RowMatrix x(5, 1);
  x << 0, 0, 0, 0, 10;
  const auto km = kmeans_cluster(x, 2, 1);
  CHECK(km.inertia == 0.0);
  CHECK(km.labels[4] != km.labels[0]);
}

TEST_CASE("TPR gaps: equal rates give zero gaps") {
  const std::vector<int> y{0, 0, 1, 1, 0, 0, 1, 1};
  const std::vector<int> pred{0, 1, 1, 1, 0, 1, 1, 1};
  const std::vector<int> z{0, 0, 0, 0, 1, 1, 1, 1};
  const auto r = tpr_gap_suite(y, pred, z);
  CHECK(r.rms == 0.0);
  for (const auto& g : r.gaps) CHECK(*g == 0.0);
}

TEST_CASE("TPR gap RMS arithmetic") {
  // class 0: z=1 TPR 0.8, z=0 TPR 0.5 -> gap 0.3; class 1: 0.9 vs 0.5 -> 0.4
  std::vector<int> y, pred, z;
  auto add = [&](int cls, int group, int tp, int total) {
    for (int i = 0; i < total; ++i) {
      y.push_back(cls);
      z.push_back(group);
      pred.push_back(i < tp ? cls : 1 - cls);
    }
  };
  add(0, 1, 8, 10);
  add(0, 0, 5, 10);
  add(1, 1, 9, 10);
  add(1, 0, 5, 10);
  const auto r = tpr_gap_suite(y, pred, z);
  CHECK(std::abs(*r.gaps[0] - 0.3) < 1e-12);
  CHECK(std::abs(*r.gaps[1] - 0.4) < 1e-12);
  CHECK(std::abs(r.rms - std::sqrt((0.09 + 0.16) / 2)) < 1e-12);
}

TEST_CASE("TPR gap sigma and undefined cells") {
  std::vector<int> y, pred, z;
  auto add = [&](int cls, int group, int tp, int total) {
    for (int i = 0; i < total; ++i) {
      y.push_back(cls);
      z.push_back(group);
      pred.push_back(i < tp ? cls : -1);
    }
  };
  add(0, 1, 6, 10);
  add(0, 0, 5, 10);
  add(1, 1, 7, 10);
  add(1, 0, 5, 10);
  add(2, 1, 8, 10);
  add(2, 0, 5, 10);
  add(3, 1, 3, 4);  // no z=0 members: undefined
  const std::map<int, double> share{{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.9}};
  const auto r = tpr_gap_suite(y, pred, z, share);
  CHECK_FALSE(r.gaps[3].has_value());
  CHECK_FALSE(r.warnings.empty());
  REQUIRE(r.sigma);
  CHECK(*r.sigma == doctest::Approx(1.0));

  const std::map<int, double> flat{{0, 0.5}, {1, 0.5}, {2, 0.5}, {3, 0.5}};
  const auto f = tpr_gap_suite(y, pred, z, flat);
  CHECK_FALSE(f.sigma.has_value());
  CHECK(f.rms == r.rms);
  CHECK_THROWS_AS(tpr_gap_suite({0}, {0}, {2}), Error);
  CHECK_THROWS_AS(tpr_gap_suite({0, 0}, {0, 0}, {1, 1}), Error);
}

TEST_CASE("TPR RMS is zero iff every defined gap is zero") {
  CHECK(gap_rms({0.0, std::nullopt, 0.0}) == 0.0);
  CHECK(gap_rms({0.0, 1e-9}) > 0.0);
}

TEST_CASE("similarity correlation") {
  std::mt19937_64 rng(105);
  const RowMatrix a = test::gaussian(20, 5, rng), b = test::gaussian(20, 5, rng);
  VectorXd cos(20);
  for (Eigen::Index i = 0; i < 20; ++i) cos[i] = a.row(i).dot(b.row(i)) / (a.row(i).norm() * b.row(i).norm());
  CHECK(similarity_correlation(a, b, cos) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(similarity_correlation(a, b, -cos) == doctest::Approx(-1.0).epsilon(1e-12));

  const VectorXd human = test::gaussian_vector(20, rng);
  const double mc = cos.mean(), mh = human.mean();
  double sxy = 0, sxx = 0, syy = 0;
  for (Eigen::Index i = 0; i < 20; ++i) {
    sxy += (cos[i] - mc) * (human[i] - mh);
    sxx += (cos[i] - mc) * (cos[i] - mc);
    syy += (human[i] - mh) * (human[i] - mh);
  }
  CHECK(std::abs(similarity_correlation(a, b, human) - sxy / std::sqrt(sxx * syy)) < 1e-12);
  CHECK_THROWS_AS(similarity_correlation(a.topRows(2), b.topRows(2), human.head(2)), Error);
  CHECK_THROWS_AS(similarity_correlation(a, b, VectorXd::Ones(20)), Error);
}
