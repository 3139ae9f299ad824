#include "erasure/eval.hpp"

#include "erasure/error.hpp"
#include "erasure/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace erasure {

namespace {

constexpr const char* kModule = "eval";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, kModule, msg); }

void require_nonzero_rows(const RowMatrix& m, const char* name) {
  if (m.rows() == 0) fail(ErrorKind::invalid_input, std::string("WEAT set ") + name + " is empty");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (m.row(i).norm() == 0.0)
      fail(ErrorKind::invalid_input, std::string("zero-norm vector in WEAT set ") + name + ": cosine undefined");
}

double association(const VectorXd& w, const RowMatrix& a, const RowMatrix& b) {
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) sa += cosine(w, a.row(i).transpose());
  for (Eigen::Index i = 0; i < b.rows(); ++i) sb += cosine(w, b.row(i).transpose());
  return sa / static_cast<double>(a.rows()) - sb / static_cast<double>(b.rows());
}

// C(n, r), saturating at limit + 1.
long binomial_capped(long n, long r, long limit) {
  r = std::min(r, n - r);
  double c = 1.0;
  for (long i = 1; i <= r; ++i) {
    c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
    if (c > static_cast<double>(limit)) return limit + 1;
  }
  return std::lround(c);
}

double entropy(const std::map<int, long>& counts, long n) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

// H(A | B) from the joint table.
double conditional_entropy(const std::map<std::pair<int, int>, long>& joint, const std::map<int, long>& b_counts,
                           long n, bool b_is_first) {
  double h = 0.0;
  for (const auto& [key, c] : joint) {
    const int b = b_is_first ? key.first : key.second;
    const double pab = static_cast<double>(c) / static_cast<double>(n);
    h -= pab * std::log(static_cast<double>(c) / static_cast<double>(b_counts.at(b)));
  }
  return h;
}

std::vector<int> canonical_labels(const std::vector<int>& labels, int k) {
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& m = remap[static_cast<std::size_t>(labels[i])];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

kernels::Assignment assign(const RowMatrix& x, const RowMatrix& c, bool parallel) {
  return parallel ? kernels::parallel::assign_nearest(x, c) : kernels::serial::assign_nearest(x, c);
}

KMeansResult kmeans_once(const RowMatrix& x, int k, std::mt19937_64& rng, const KMeansOptions& options) {
  const Eigen::Index n = x.rows();
  RowMatrix centroids(k, x.cols());

  // k-means++ seeding
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  VectorXd d2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double target = unif(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2[pick];
        if (target < 0) break;
      }
    } else {
      pick = first(rng);
    }
    centroids.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  KMeansResult out;
  std::vector<int> prev;
  for (int it = 0; it < options.max_iterations; ++it) {
    auto a = assign(x, centroids, options.parallel);
    out.iterations = it + 1;
    const bool stable = a.labels == prev;
    prev = a.labels;
    out.inertia = a.sq_dist.sum();
    if (stable) break;

    RowMatrix sums = RowMatrix::Zero(k, x.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(a.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(a.labels[static_cast<std::size_t>(i)])];
    }
    VectorXd far = a.sq_dist;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        Eigen::Index idx = 0;
        far.maxCoeff(&idx);
        centroids.row(c) = x.row(idx);
        far[idx] = -1.0;
        prev.clear();  // force another assignment pass
      }
    }
  }
  out.labels = prev;
  out.centroids = centroids;
  return out;
}

}  // namespace

ProbeAccuracy probe_accuracy(const Dataset& train, const Dataset& test, const ProbeBudget& budget) {
  if (train.task() != TaskKind::binary_classification || test.task() != TaskKind::binary_classification)
    fail(ErrorKind::invalid_input, "probe accuracy needs binary-labeled train and test sets");
  if (train.dim() != test.dim()) fail(ErrorKind::dimension_mismatch, "train and test dimensions differ");
  const auto fit = train_logistic_probe(train.x(), train.y(), budget);
  const auto score = score_probe(fit, test.x(), test.y());
  return {score.accuracy, score.loss, fit.converged};
}

ProbeAccuracy probe_accuracy(const Dataset& train, const Dataset& test, const ErasureProjection& proj,
                             const ProbeBudget& budget) {
  return probe_accuracy(train.with_x(apply_pipeline(train.x(), proj)), test.with_x(apply_pipeline(test.x(), proj)),
                        budget);
}

double cosine(const VectorXd& a, const VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) fail(ErrorKind::invalid_input, "cosine of a zero vector is undefined");
  return a.dot(b) / (na * nb);
}

WeatResult weat_statistic(const WeatSpec& spec, std::uint64_t seed) {
  require_nonzero_rows(spec.x, "X");
  require_nonzero_rows(spec.y, "Y");
  require_nonzero_rows(spec.a, "A");
  require_nonzero_rows(spec.b, "B");
  if (spec.x.rows() != spec.y.rows()) fail(ErrorKind::invalid_input, "WEAT requires |X| = |Y|");
  const Eigen::Index dim = spec.x.cols();
  for (const RowMatrix* m : {&spec.y, &spec.a, &spec.b})
    if (m->cols() != dim) fail(ErrorKind::dimension_mismatch, "WEAT sets differ in dimension");

  const long nx = static_cast<long>(spec.x.rows());
  const long n = 2 * nx;
  VectorXd s(n);
  for (long i = 0; i < nx; ++i) s[i] = association(spec.x.row(i).transpose(), spec.a, spec.b);
  for (long i = 0; i < nx; ++i) s[nx + i] = association(spec.y.row(i).transpose(), spec.a, spec.b);

  WeatResult out;
  // Ordered loops so that identical X and Y give exactly equal sums.
  double sum_x = 0.0, sum_y = 0.0;
  for (long i = 0; i < nx; ++i) sum_x += s[i];
  for (long i = 0; i < nx; ++i) sum_y += s[nx + i];
  const double total = sum_x + sum_y;
  out.statistic = sum_x - sum_y;
  const double mean = total / static_cast<double>(n);
  const double sd = std::sqrt((s.array() - mean).square().sum() / static_cast<double>(n));
  if (sd == 0.0) {
    out.zero_variance = true;
    out.d = 0.0;
  } else {
    out.d = (sum_x - sum_y) / static_cast<double>(nx) / sd;
  }

  const double tie = 1e-12 * (1.0 + std::abs(out.statistic));
  auto at_least = [&](double subset_sum) { return 2.0 * subset_sum - total >= out.statistic - tie; };

  const long count = binomial_capped(n, nx, kWeatExactLimit);
  long favorable = 0;
  if (count <= kWeatExactLimit) {
    out.exact = true;
    std::vector<int> pick(static_cast<std::size_t>(nx));
    std::iota(pick.begin(), pick.end(), 0);
    long seen = 0;
    while (true) {
      double sub = 0.0;
      for (int i : pick) sub += s[i];
      ++seen;
      if (at_least(sub)) ++favorable;
      long i = nx - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - nx + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (long j = i + 1; j < nx; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    out.permutations = seen;
    out.p_value = static_cast<double>(favorable) / static_cast<double>(seen);
  } else {
    out.exact = false;
    std::mt19937_64 rng(seed);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (long r = 0; r < kWeatSamples; ++r) {
      std::shuffle(idx.begin(), idx.end(), rng);
      double sub = 0.0;
      for (long i = 0; i < nx; ++i) sub += s[idx[static_cast<std::size_t>(i)]];
      if (at_least(sub)) ++favorable;
    }
    // the observed partition counts as one more sample
    out.permutations = kWeatSamples;
    out.p_value = static_cast<double>(favorable + 1) / static_cast<double>(kWeatSamples + 1);
  }
  return out;
}

VMeasure v_measure(const std::vector<int>& labels_true, const std::vector<int>& labels_cluster, double beta) {
  if (labels_true.size() != labels_cluster.size()) fail(ErrorKind::dimension_mismatch, "label lists differ in length");
  if (labels_true.empty()) fail(ErrorKind::invalid_input, "V-measure needs at least one item");
  if (!(beta > 0)) fail(ErrorKind::invalid_argument, "beta must be positive");
  const long n = static_cast<long>(labels_true.size());
  std::map<int, long> classes, clusters;
  std::map<std::pair<int, int>, long> joint;
  for (std::size_t i = 0; i < labels_true.size(); ++i) {
    ++classes[labels_true[i]];
    ++clusters[labels_cluster[i]];
    ++joint[{labels_true[i], labels_cluster[i]}];
  }
  const double h_c = entropy(classes, n);
  const double h_k = entropy(clusters, n);
  VMeasure out;
  out.homogeneity = h_c == 0.0 ? 1.0 : 1.0 - conditional_entropy(joint, clusters, n, false) / h_c;
  out.completeness = h_k == 0.0 ? 1.0 : 1.0 - conditional_entropy(joint, classes, n, true) / h_k;
  const double denom = beta * out.homogeneity + out.completeness;
  out.v = denom == 0.0 ? 0.0 : (1.0 + beta) * out.homogeneity * out.completeness / denom;
  return out;
}

KMeansResult kmeans_cluster(const RowMatrix& x, int n_clusters, std::uint64_t seed, const KMeansOptions& options) {
  if (n_clusters < 1 || n_clusters > x.rows()) fail(ErrorKind::invalid_argument, "n_clusters must lie in [1, N]");
  if (options.restarts < 1 || options.max_iterations < 1)
    fail(ErrorKind::invalid_argument, "restarts and max_iterations must be >= 1");
  if (!x.allFinite()) fail(ErrorKind::invalid_input, "data has non-finite entries");
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    auto run = kmeans_once(x, n_clusters, rng, options);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }
  best.labels = canonical_labels(best.labels, n_clusters);
  return best;
}

double gap_rms(const std::vector<std::optional<double>>& gaps) {
  double sum = 0.0;
  long count = 0;
  for (const auto& g : gaps)
    if (g) {
      sum += *g * *g;
      ++count;
    }
  if (count == 0) fail(ErrorKind::invalid_input, "no class has a defined TPR gap");
  return std::sqrt(sum / static_cast<double>(count));
}

TprGapReport tpr_gap_suite(const std::vector<int>& y_true, const std::vector<int>& y_pred, const std::vector<int>& z,
                           const std::optional<std::map<int, double>>& group_share) {
  if (y_true.size() != y_pred.size() || y_true.size() != z.size())
    fail(ErrorKind::dimension_mismatch, "TPR inputs differ in length");
  for (int v : z)
    if (v != 0 && v != 1) fail(ErrorKind::invalid_input, "protected attribute must be 0 or 1");

  TprGapReport out;
  const std::set<int> classes(y_true.begin(), y_true.end());
  out.classes.assign(classes.begin(), classes.end());
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < out.classes.size(); ++i) index[out.classes[i]] = i;
  out.group0.resize(out.classes.size());
  out.group1.resize(out.classes.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    TprCell& cell = (z[i] == 1 ? out.group1 : out.group0)[index.at(y_true[i])];
    ++cell.positives;
    if (y_pred[i] == y_true[i]) ++cell.true_positives;
  }
  for (auto* group : {&out.group0, &out.group1})
    for (auto& cell : *group)
      if (cell.positives > 0)
        cell.tpr = static_cast<double>(cell.true_positives) / static_cast<double>(cell.positives);

  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    if (out.group0[c].tpr && out.group1[c].tpr) {
      out.gaps.emplace_back(*out.group1[c].tpr - *out.group0[c].tpr);
    } else {
      out.gaps.emplace_back(std::nullopt);
      out.warnings.push_back("class " + std::to_string(out.classes[c]) +
                             " lacks positives in one group; excluded from aggregates");
    }
  }
  out.rms = gap_rms(out.gaps);

  if (group_share) {
    std::vector<double> g, s;
    for (std::size_t c = 0; c < out.classes.size(); ++c) {
      auto it = group_share->find(out.classes[c]);
      if (out.gaps[c] && it != group_share->end()) {
        g.push_back(*out.gaps[c]);
        s.push_back(it->second);
      }
    }
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (g.size() < 2) {
      out.warnings.emplace_back("fewer than two classes with gap and share; sigma not computed");
    } else if (constant(g) || constant(s)) {
      out.warnings.emplace_back("gaps or shares are constant across classes; sigma not computed");
    } else {
      out.sigma = pearson(Eigen::Map<VectorXd>(g.data(), static_cast<Eigen::Index>(g.size())),
                          Eigen::Map<VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())));
    }
  }
  return out;
}

double pearson(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) fail(ErrorKind::dimension_mismatch, "correlation series differ in length");
  if (a.size() < 2) fail(ErrorKind::invalid_input, "correlation needs at least two points");
  const VectorXd ca = a.array() - a.mean();
  const VectorXd cb = b.array() - b.mean();
  const double na = ca.norm(), nb = cb.norm();
  if (na == 0.0 || nb == 0.0) fail(ErrorKind::degenerate, "correlation undefined: a series has zero variance");
  return ca.dot(cb) / (na * nb);
}

double similarity_correlation(const RowMatrix& a, const RowMatrix& b, const VectorXd& human_scores) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != human_scores.size())
    fail(ErrorKind::dimension_mismatch, "similarity pairs and scores differ in shape");
  if (a.rows() < 3) fail(ErrorKind::invalid_input, "similarity correlation needs at least 3 pairs");
  VectorXd cos(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) cos[i] = cosine(a.row(i).transpose(), b.row(i).transpose());
  return pearson(cos, human_scores);
}

nlohmann::json to_json(const ProbeAccuracy& r) {
  return {{"accuracy", r.accuracy}, {"loss", r.loss}, {"converged", r.converged}};
}

nlohmann::json to_json(const WeatResult& r) {
  return {{"d", r.d},           {"p_value", r.p_value}, {"exact", r.exact}, {"permutations", r.permutations},
          {"zero_variance", r.zero_variance}, {"statistic", r.statistic}};
}

nlohmann::json to_json(const VMeasure& r) {
  return {{"v_measure", r.v}, {"homogeneity", r.homogeneity}, {"completeness", r.completeness}};
}

nlohmann::json to_json(const TprGapReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    auto cell = [](const TprCell& t) {
      nlohmann::json j = {{"true_positives", t.true_positives}, {"positives", t.positives}};
      j["tpr"] = t.tpr ? nlohmann::json(*t.tpr) : nlohmann::json(nullptr);
      return j;
    };
    classes.push_back({{"class", r.classes[c]},
                       {"z0", cell(r.group0[c])},
                       {"z1", cell(r.group1[c])},
                       {"gap", r.gaps[c] ? nlohmann::json(*r.gaps[c]) : nlohmann::json(nullptr)}});
  }
  nlohmann::json j = {{"classes", classes}, {"rms", r.rms}, {"warnings", r.warnings}};
  j["sigma"] = r.sigma ? nlohmann::json(*r.sigma) : nlohmann::json(nullptr);
  return j;
}

}  // namespace erasure
