#pragma once

// Post-erasure measurements.

#include "erasure/dataio.hpp"
#include "erasure/probe.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erasure {

struct ProbeAccuracy {
  double accuracy = 0.0;  // on the test set
  double loss = 0.0;      // mean cross-entropy on the test set
  bool converged = false;
};

/// Trains a fresh logistic probe on `train` and scores it on `test`. The
/// projection overload applies the full pipeline (reduction, then P) first.
ProbeAccuracy probe_accuracy(const Dataset& train, const Dataset& test, const ProbeBudget& budget = {});
ProbeAccuracy probe_accuracy(const Dataset& train, const Dataset& test, const ErasureProjection& proj,
                             const ProbeBudget& budget = {});

/// Target sets X, Y and attribute sets A, B; one vector per row.
struct WeatSpec {
  RowMatrix x, y, a, b;
};

struct WeatResult {
  double d = 0.0;
  double p_value = 1.0;
  bool exact = true;
  long permutations = 0;  // partitions enumerated or sampled
  bool zero_variance = false;
  double statistic = 0.0;  // sum_X s - sum_Y s
};

inline constexpr long kWeatExactLimit = 20000;
inline constexpr long kWeatSamples = 10000;

/// Effect size d (population std) and one-sided permutation p-value: the
/// share of equal-size re-partitions whose statistic is >= the observed one,
/// the observed partition included. Exact when C(|X|+|Y|, |X|) <= 20000.
WeatResult weat_statistic(const WeatSpec& spec, std::uint64_t seed = 0);

struct VMeasure {
  double v = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
};

VMeasure v_measure(const std::vector<int>& labels_true, const std::vector<int>& labels_cluster, double beta = 1.0);

struct KMeansResult {
  std::vector<int> labels;  // renumbered by first appearance
  RowMatrix centroids;
  double inertia = 0.0;
  int iterations = 0;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  bool parallel = true;  // use the OpenMP assignment kernel
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by inertia.
KMeansResult kmeans_cluster(const RowMatrix& x, int n_clusters, std::uint64_t seed, const KMeansOptions& options = {});

struct TprCell {
  long true_positives = 0;
  long positives = 0;
  std::optional<double> tpr;  // absent when positives == 0
};

struct TprGapReport {
  std::vector<int> classes;  // sorted
  std::vector<TprCell> group0, group1;
  std::vector<std::optional<double>> gaps;  // TPR_{z=1} - TPR_{z=0}
  double rms = 0.0;
  std::optional<double> sigma;  // Pearson(gap, group share) over defined classes
  std::vector<std::string> warnings;
};

/// z must be 0/1. `group_share` maps a class to its share of z = 1 members.
TprGapReport tpr_gap_suite(const std::vector<int>& y_true, const std::vector<int>& y_pred, const std::vector<int>& z,
                           const std::optional<std::map<int, double>>& group_share = std::nullopt);

/// sqrt(mean(gap^2)) over the defined gaps.
double gap_rms(const std::vector<std::optional<double>>& gaps);

double pearson(const VectorXd& a, const VectorXd& b);
double cosine(const VectorXd& a, const VectorXd& b);

/// Pearson r between cos(a_i, b_i) and the human scores.
double similarity_correlation(const RowMatrix& a, const RowMatrix& b, const VectorXd& human_scores);

nlohmann::json to_json(const ProbeAccuracy& r);
nlohmann::json to_json(const WeatResult& r);
nlohmann::json to_json(const VMeasure& r);
nlohmann::json to_json(const TprGapReport& r);

}  // namespace erasure
