#pragma once

#include "erasure/linalg.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erasure {

enum class TaskKind { binary_classification, regression };

std::string_view to_string(TaskKind kind);

/// N x D representations with an N-vector of responses.
class Dataset {
 public:
  /// Validates: N >= 2, D >= 1, matching lengths, finite values, and for
  /// binary classification y in {0, 1} with both classes present.
  Dataset(RowMatrix x, VectorXd y, TaskKind task, std::vector<std::string> row_ids = {});

  const RowMatrix& x() const { return x_; }
  const VectorXd& y() const { return y_; }
  TaskKind task() const { return task_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

  /// Rows selected by index, in the given order.
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  /// Same labels, representations replaced (must keep the row count).
  Dataset with_x(RowMatrix x) const;

  /// Share of the most frequent label (classification only).
  double majority_share() const;

 private:
  RowMatrix x_;
  VectorXd y_;
  TaskKind task_;
  std::vector<std::string> row_ids_;
};

/// Infers binary classification when every label is 0 or 1.
TaskKind infer_task(const VectorXd& y);

enum class Method { rlace, inlp, regression_closed_form, rayleigh_closed_form, pls_closed_form, pca_diff };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

/// Optional PCA stage applied before the projection (centered, reduced).
struct Reduction {
  VectorXd mean;   // input-space column means
  MatrixXd basis;  // reduced_dim x input_dim, orthonormal rows
};

/// A fitted rank (D - k) orthogonal projection together with the k
/// orthonormal rows spanning the neutralized subspace.
class ErasureProjection {
 public:
  /// Builds P = I - W^T W from the basis and checks every invariant.
  static ErasureProjection from_basis(MatrixXd basis, Method method, nlohmann::json metadata = {},
                                      std::optional<std::uint64_t> seed = std::nullopt);

  Eigen::Index dim() const { return p_.dim(); }
  Eigen::Index rank_removed() const { return basis_.rows(); }
  const SymMatrix& matrix() const { return p_; }
  const MatrixXd& basis() const { return basis_; }
  Method method() const { return method_; }
  const nlohmann::json& metadata() const { return metadata_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  const std::optional<Reduction>& reduction() const { return reduction_; }
  void set_reduction(Reduction r);

 private:
  ErasureProjection(SymMatrix p, MatrixXd basis, Method method, nlohmann::json metadata,
                    std::optional<std::uint64_t> seed)
      : p_(std::move(p)), basis_(std::move(basis)), method_(method), metadata_(std::move(metadata)),
        seed_(seed) {}

  SymMatrix p_;
  MatrixXd basis_;
  Method method_;
  nlohmann::json metadata_;
  std::optional<std::uint64_t> seed_;
  std::optional<Reduction> reduction_;
};

inline constexpr int kProjectionFormatVersion = 1;

struct VectorsFile {
  RowMatrix x;
  std::vector<std::string> ids;
  std::vector<std::string> warnings;
};

/// GloVe-style text: `token v1 ... vD` per line. Duplicate tokens keep the
/// first occurrence and add a warning.
VectorsFile load_vectors_text(const std::filesystem::path& path);
VectorsFile parse_vectors_text(std::string_view text);

struct LabelFile {
  std::vector<std::string> ids;  // empty for a single-column file
  VectorXd values;
  /// For string labels: the two names mapped to 0 and 1 (lexicographic).
  std::optional<std::pair<std::string, std::string>> string_classes;
};

/// `id label` per line, or one label per line. Two distinct non-numeric
/// labels are mapped to {0, 1} by lexicographic order.
LabelFile load_labels(const std::filesystem::path& path);
LabelFile parse_labels(std::string_view text);

/// Aligns labels with row ids; a missing id is an error naming it.
VectorXd join_labels(const std::vector<std::string>& row_ids, const LabelFile& labels);

/// Dense numeric CSV; the first row is skipped when has_header is set.
RowMatrix load_csv_matrix(const std::filesystem::path& path, bool has_header);
RowMatrix parse_csv_matrix(std::string_view text, bool has_header);

/// X P. Requires X.cols() == proj.dim().
RowMatrix apply_projection(const RowMatrix& x, const ErasureProjection& proj);
/// Applies the stored reduction (if any) and then the projection.
RowMatrix apply_pipeline(const RowMatrix& x, const ErasureProjection& proj);

nlohmann::json projection_to_json(const ErasureProjection& proj);
ErasureProjection projection_from_json(const nlohmann::json& j);
void save_projection(const ErasureProjection& proj, const std::filesystem::path& path);
ErasureProjection load_projection(const std::filesystem::path& path);

/// Writers for the formats above. Numbers use the shortest representation
/// that parses back to the same double.
std::string format_double(double v);
std::string format_vectors_text(const std::vector<std::string>& ids, const RowMatrix& x);
std::string format_labels(const std::vector<std::string>& ids, const VectorXd& y);
std::string format_csv_matrix(const MatrixXd& m, const std::vector<std::string>& header = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace erasure
