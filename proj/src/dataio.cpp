#include "erasure/dataio.hpp"

#include "erasure/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace erasure {

namespace {

constexpr const char* kModule = "dataio";

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, kModule, msg); }

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t pos = line.find(sep, start);
    const std::size_t end = pos == std::string_view::npos ? line.size() : pos;
    out.push_back(line.substr(start, end - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Lines with their 1-based numbers; blank lines are skipped.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (!line.empty()) out.emplace_back(lineno, line);
  }
  return out;
}

std::vector<double> flatten(const MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

MatrixXd unflatten(const nlohmann::json& arr, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    std::ostringstream os;
    os << "field '" << what << "' must be an array of " << rows * cols << " numbers";
    fail(ErrorKind::parse_error, os.str());
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& v = arr[static_cast<std::size_t>(i * cols + j)];
      if (!v.is_number()) fail(ErrorKind::parse_error, std::string("non-numeric entry in '") + what + "'");
      m(i, j) = v.get<double>();
    }
  return m;
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::binary_classification ? "binary-classification" : "regression";
}

Dataset::Dataset(RowMatrix x, VectorXd y, TaskKind task, std::vector<std::string> row_ids)
    : x_(std::move(x)), y_(std::move(y)), task_(task), row_ids_(std::move(row_ids)) {
  if (x_.rows() < 2) fail(ErrorKind::invalid_input, "dataset needs at least 2 rows");
  if (x_.cols() < 1) fail(ErrorKind::invalid_input, "dataset needs at least 1 column");
  if (x_.rows() != y_.size()) {
    std::ostringstream os;
    os << "row count " << x_.rows() << " does not match label count " << y_.size();
    fail(ErrorKind::dimension_mismatch, os.str());
  }
  if (!row_ids_.empty() && static_cast<Eigen::Index>(row_ids_.size()) != x_.rows())
    fail(ErrorKind::dimension_mismatch, "row id count does not match row count");
  if (!x_.allFinite() || !y_.allFinite()) fail(ErrorKind::invalid_input, "dataset has non-finite values");
  if (task_ == TaskKind::binary_classification) {
    bool has0 = false, has1 = false;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      if (y_[i] == 0.0) has0 = true;
      else if (y_[i] == 1.0) has1 = true;
      else fail(ErrorKind::invalid_input, "binary classification labels must be 0 or 1");
    }
    if (!has0 || !has1) fail(ErrorKind::invalid_input, "binary classification needs both classes present");
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  VectorXd y(static_cast<Eigen::Index>(rows.size()));
  std::vector<std::string> ids;
  if (!row_ids_.empty()) ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    if (r < 0 || r >= x_.rows()) fail(ErrorKind::invalid_argument, "subset row index out of range");
    x.row(static_cast<Eigen::Index>(i)) = x_.row(r);
    y[static_cast<Eigen::Index>(i)] = y_[r];
    if (!row_ids_.empty()) ids.push_back(row_ids_[static_cast<std::size_t>(r)]);
  }
  return Dataset(std::move(x), std::move(y), task_, std::move(ids));
}

Dataset Dataset::with_x(RowMatrix x) const { return Dataset(std::move(x), y_, task_, row_ids_); }

double Dataset::majority_share() const {
  std::map<double, Eigen::Index> counts;
  for (Eigen::Index i = 0; i < y_.size(); ++i) ++counts[y_[i]];
  Eigen::Index best = 0;
  for (const auto& [label, c] : counts) best = std::max(best, c);
  return static_cast<double>(best) / static_cast<double>(y_.size());
}

TaskKind infer_task(const VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0) return TaskKind::regression;
  return TaskKind::binary_classification;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rlace: return "rlace";
    case Method::inlp: return "inlp";
    case Method::regression_closed_form: return "regression-closed-form";
    case Method::rayleigh_closed_form: return "rayleigh-closed-form";
    case Method::pls_closed_form: return "pls-closed-form";
    case Method::pca_diff: return "pca-diff";
  }
  return "rlace";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::rlace, Method::inlp, Method::regression_closed_form, Method::rayleigh_closed_form,
                   Method::pls_closed_form, Method::pca_diff})
    if (to_string(m) == name) return m;
  fail(ErrorKind::parse_error, "unknown method '" + std::string(name) + "'");
}

ErasureProjection ErasureProjection::from_basis(MatrixXd basis, Method method, nlohmann::json metadata,
                                                std::optional<std::uint64_t> seed) {
  const Eigen::Index k = basis.rows();
  const Eigen::Index d = basis.cols();
  if (k < 1 || k >= d) {
    std::ostringstream os;
    os << "rank_removed must satisfy 1 <= k < D (k=" << k << ", D=" << d << ")";
    fail(ErrorKind::invariant_violation, os.str());
  }
  SymMatrix p = rank_k_neutralizer(basis);
  const auto check = is_orthogonal_projection(p, 1e-6);
  if (!check.ok || check.rank != d - k)
    fail(ErrorKind::invariant_violation, "neutralizer is not an orthogonal projection of rank D-k");
  if (metadata.is_null()) metadata = nlohmann::json::object();
  return ErasureProjection(std::move(p), std::move(basis), method, std::move(metadata), seed);
}

void ErasureProjection::set_reduction(Reduction r) {
  if (r.basis.rows() != dim())
    fail(ErrorKind::dimension_mismatch, "reduction output dimension must equal projection dimension");
  if (r.mean.size() != r.basis.cols())
    fail(ErrorKind::dimension_mismatch, "reduction mean length must equal input dimension");
  if (gram_deviation(r.basis) > 1e-8) fail(ErrorKind::invariant_violation, "reduction basis rows not orthonormal");
  reduction_ = std::move(r);
}

VectorsFile parse_vectors_text(std::string_view text) {
  VectorsFile out;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> seen;
  Eigen::Index dim = -1;
  for (const auto& [lineno, line] : lines_of(text)) {
    auto fields = split(line, ' ');
    fields.erase(std::remove_if(fields.begin(), fields.end(), [](std::string_view f) { return f.empty(); }),
                 fields.end());
    if (fields.size() < 2) {
      std::ostringstream os;
      os << "line " << lineno << ": expected a token followed by at least one value";
      fail(ErrorKind::parse_error, os.str());
    }
    const auto d = static_cast<Eigen::Index>(fields.size() - 1);
    if (dim < 0) dim = d;
    if (d != dim) {
      std::ostringstream os;
      os << "line " << lineno << ": expected " << dim << " values, found " << d;
      fail(ErrorKind::parse_error, os.str());
    }
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto v = parse_double(fields[f]);
      if (!v || !std::isfinite(*v)) {
        std::ostringstream os;
        os << "line " << lineno << ": non-numeric field '" << fields[f] << "'";
        fail(ErrorKind::parse_error, os.str());
      }
      values.push_back(*v);
    }
    std::string token(fields[0]);
    if (seen.count(token)) {
      std::ostringstream os;
      os << "line " << lineno << ": duplicate token '" << token << "' ignored (first occurrence kept)";
      out.warnings.push_back(os.str());
      continue;
    }
    seen.emplace(token, rows.size());
    out.ids.push_back(std::move(token));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) fail(ErrorKind::parse_error, "no rows");
  out.x.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out.x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return out;
}

VectorsFile load_vectors_text(const std::filesystem::path& path) { return parse_vectors_text(read_text_file(path)); }

LabelFile parse_labels(std::string_view text) {
  LabelFile out;
  std::vector<std::string> raw;
  std::set<std::string> ids_seen;
  int columns = -1;
  for (const auto& [lineno, line] : lines_of(text)) {
    auto fields = split(line, ' ');
    fields.erase(std::remove_if(fields.begin(), fields.end(), [](std::string_view f) { return f.empty(); }),
                 fields.end());
    const int c = static_cast<int>(fields.size());
    if (c != 1 && c != 2) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 'id label' or 'label'";
      fail(ErrorKind::parse_error, os.str());
    }
    if (columns < 0) columns = c;
    if (c != columns) {
      std::ostringstream os;
      os << "line " << lineno << ": inconsistent column count";
      fail(ErrorKind::parse_error, os.str());
    }
    if (c == 2) {
      std::string id(fields[0]);
      if (!ids_seen.insert(id).second) {
        std::ostringstream os;
        os << "line " << lineno << ": duplicate id '" << id << "'";
        fail(ErrorKind::parse_error, os.str());
      }
      out.ids.push_back(std::move(id));
    }
    raw.emplace_back(fields[static_cast<std::size_t>(c - 1)]);
  }
  if (raw.empty()) fail(ErrorKind::parse_error, "no rows");

  out.values.resize(static_cast<Eigen::Index>(raw.size()));
  std::set<std::string> non_numeric;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto v = parse_double(raw[i]);
    if (v && std::isfinite(*v)) out.values[static_cast<Eigen::Index>(i)] = *v;
    else non_numeric.insert(raw[i]);
  }
  if (non_numeric.empty()) return out;

  std::set<std::string> distinct(raw.begin(), raw.end());
  if (distinct.size() != 2 || non_numeric.size() != 2)
    fail(ErrorKind::parse_error, "unparseable label '" + *non_numeric.begin() + "'");
  const std::string& zero = *distinct.begin();
  const std::string& one = *std::next(distinct.begin());
  for (std::size_t i = 0; i < raw.size(); ++i) out.values[static_cast<Eigen::Index>(i)] = raw[i] == zero ? 0.0 : 1.0;
  out.string_classes = std::make_pair(zero, one);
  return out;
}

LabelFile load_labels(const std::filesystem::path& path) { return parse_labels(read_text_file(path)); }

VectorXd join_labels(const std::vector<std::string>& row_ids, const LabelFile& labels) {
  if (labels.ids.empty()) {
    if (static_cast<std::size_t>(labels.values.size()) != row_ids.size() && !row_ids.empty()) {
      std::ostringstream os;
      os << "label count " << labels.values.size() << " does not match row count " << row_ids.size();
      fail(ErrorKind::dimension_mismatch, os.str());
    }
    return labels.values;
  }
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < labels.ids.size(); ++i) index.emplace(labels.ids[i], static_cast<Eigen::Index>(i));
  VectorXd y(static_cast<Eigen::Index>(row_ids.size()));
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const auto it = index.find(row_ids[i]);
    if (it == index.end()) fail(ErrorKind::invalid_input, "label missing for id '" + row_ids[i] + "'");
    y[static_cast<Eigen::Index>(i)] = labels.values[it->second];
  }
  return y;
}

RowMatrix parse_csv_matrix(std::string_view text, bool has_header) {
  std::vector<std::vector<double>> rows;
  bool skipped = !has_header;
  for (const auto& [lineno, line] : lines_of(text)) {
    if (!skipped) {
      skipped = true;
      continue;
    }
    std::vector<double> values;
    for (auto field : split(line, ',')) {
      const auto v = parse_double(trim(field));
      if (!v || !std::isfinite(*v)) {
        std::ostringstream os;
        os << "line " << lineno << ": non-numeric field '" << trim(field) << "'";
        fail(ErrorKind::parse_error, os.str());
      }
      values.push_back(*v);
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      std::ostringstream os;
      os << "line " << lineno << ": expected " << rows.front().size() << " fields, found " << values.size();
      fail(ErrorKind::parse_error, os.str());
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) fail(ErrorKind::parse_error, "no rows");
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

RowMatrix load_csv_matrix(const std::filesystem::path& path, bool has_header) {
  return parse_csv_matrix(read_text_file(path), has_header);
}

RowMatrix apply_projection(const RowMatrix& x, const ErasureProjection& proj) {
  if (x.cols() != proj.dim()) {
    std::ostringstream os;
    os << "data has " << x.cols() << " columns but the projection has dimension " << proj.dim();
    fail(ErrorKind::dimension_mismatch, os.str());
  }
  return x * proj.matrix().matrix();
}

RowMatrix apply_pipeline(const RowMatrix& x, const ErasureProjection& proj) {
  if (!proj.reduction()) return apply_projection(x, proj);
  const auto& r = *proj.reduction();
  if (x.cols() != r.basis.cols()) {
    std::ostringstream os;
    os << "data has " << x.cols() << " columns but the reduction expects " << r.basis.cols();
    fail(ErrorKind::dimension_mismatch, os.str());
  }
  RowMatrix reduced = (x.rowwise() - r.mean.transpose()) * r.basis.transpose();
  return apply_projection(reduced, proj);
}

nlohmann::json projection_to_json(const ErasureProjection& proj) {
  nlohmann::json j;
  j["format_version"] = kProjectionFormatVersion;
  j["dim"] = proj.dim();
  j["rank_removed"] = proj.rank_removed();
  j["method"] = std::string(to_string(proj.method()));
  j["seed"] = proj.seed() ? nlohmann::json(*proj.seed()) : nlohmann::json(nullptr);
  j["basis"] = flatten(proj.basis());
  j["metadata"] = proj.metadata();
  if (proj.reduction()) {
    const auto& r = *proj.reduction();
    nlohmann::json red;
    red["input_dim"] = r.basis.cols();
    red["mean"] = std::vector<double>(r.mean.data(), r.mean.data() + r.mean.size());
    red["basis"] = flatten(r.basis);
    j["reduction"] = std::move(red);
  }
  return j;
}

ErasureProjection projection_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::parse_error, "projection file must be a JSON object");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    fail(ErrorKind::parse_error, "missing integer field 'format_version'");
  const int version = j["format_version"].get<int>();
  if (version != kProjectionFormatVersion)
    fail(ErrorKind::unsupported_version, "unsupported projection format_version " + std::to_string(version));
  for (const char* field : {"dim", "rank_removed"})
    if (!j.contains(field) || !j[field].is_number_integer())
      fail(ErrorKind::parse_error, std::string("missing integer field '") + field + "'");
  if (!j.contains("method") || !j["method"].is_string()) fail(ErrorKind::parse_error, "missing field 'method'");
  const auto d = j["dim"].get<Eigen::Index>();
  const auto k = j["rank_removed"].get<Eigen::Index>();
  if (d < 2 || k < 1 || k >= d) fail(ErrorKind::invariant_violation, "dim/rank_removed violate 1 <= k < D");
  if (!j.contains("basis")) fail(ErrorKind::parse_error, "missing field 'basis'");
  MatrixXd basis = unflatten(j["basis"], k, d, "basis");
  const Method method = method_from_string(j["method"].get<std::string>());

  std::optional<std::uint64_t> seed;
  if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<std::uint64_t>();
  nlohmann::json metadata = j.value("metadata", nlohmann::json::object());

  const double dev = gram_deviation(basis);
  if (dev > 1e-8) {
    std::ostringstream os;
    os << "basis rows are not orthonormal (max Gram deviation " << dev << "); P would not be idempotent";
    fail(ErrorKind::invariant_violation, os.str());
  }
  auto proj = ErasureProjection::from_basis(std::move(basis), method, std::move(metadata), seed);

  if (j.contains("P")) {
    const SymMatrix stored = SymMatrix::symmetrize(unflatten(j["P"], d, d, "P"));
    const auto check = is_orthogonal_projection(stored, 1e-6);
    if (!check.ok) fail(ErrorKind::invariant_violation, "stored P is not idempotent");
    if ((stored.matrix() - proj.matrix().matrix()).cwiseAbs().maxCoeff() > 1e-6)
      fail(ErrorKind::invariant_violation, "stored P does not match the neutralizer of the basis");
  }
  if (j.contains("reduction")) {
    const auto& red = j["reduction"];
    const auto in_dim = red.at("input_dim").get<Eigen::Index>();
    Reduction r;
    r.mean = unflatten(red.at("mean"), in_dim, 1, "reduction.mean");
    r.basis = unflatten(red.at("basis"), d, in_dim, "reduction.basis");
    proj.set_reduction(std::move(r));
  }
  return proj;
}

void save_projection(const ErasureProjection& proj, const std::filesystem::path& path) {
  write_text_file(path, projection_to_json(proj).dump(2) + "\n");
}

ErasureProjection load_projection(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse_error, std::string("malformed projection file: ") + e.what());
  }
  try {
    return projection_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse_error, std::string("malformed projection file: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_vectors_text(const std::vector<std::string>& ids, const RowMatrix& x) {
  if (static_cast<Eigen::Index>(ids.size()) != x.rows())
    fail(ErrorKind::dimension_mismatch, "one id per vector row is required");
  std::string out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out += ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out += ' ';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string format_labels(const std::vector<std::string>& ids, const VectorXd& y) {
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != y.size())
    fail(ErrorKind::dimension_mismatch, "one id per label is required");
  std::string out;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!ids.empty()) {
      out += ids[static_cast<std::size_t>(i)];
      out += ' ';
    }
    out += format_double(y[i]);
    out += '\n';
  }
  return out;
}

std::string format_csv_matrix(const MatrixXd& m, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  if (!header.empty()) out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::invalid_input, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::invalid_input, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::invalid_input, "failed writing '" + path.string() + "'");
}

}  // namespace erasure
