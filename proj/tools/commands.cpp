#include "commands.hpp"

#include "cli_support.hpp"

#include "erasure/baselines.hpp"
#include "erasure/closedform.hpp"
#include "erasure/error.hpp"
#include "erasure/eval.hpp"
#include "erasure/rlace.hpp"
#include "erasure/synth.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <unordered_map>

namespace erasure::cli {

namespace {

using nlohmann::json;

Method cli_method(const std::string& name) {
  if (name == "rlace") return Method::rlace;
  if (name == "inlp") return Method::inlp;
  if (name == "regression") return Method::regression_closed_form;
  if (name == "rayleigh") return Method::rayleigh_closed_form;
  if (name == "pls") return Method::pls_closed_form;
  if (name == "pca-diff") return Method::pca_diff;
  usage_error("unknown method '" + name + "' (expected rlace, inlp, regression, rayleigh, pls or pca-diff)");
}

bool parse_number(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = line.find(sep);
    std::string_view field = line.substr(0, pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    line = line.substr(pos + 1);
  }
  return out;
}

/// Comma-separated rows with at least `columns` fields. A first row whose
/// column `numeric_col` does not parse as a number is taken as a header.
std::vector<std::vector<std::string>> read_id_csv(const std::string& path, std::size_t columns,
                                                  std::optional<std::size_t> numeric_col) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos || line.front() == '#') continue;
    auto fields = split(line, ',');
    if (fields.size() < columns)
      throw Error(ErrorKind::parse_error, "cli",
                  path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) + " fields");
    double v = 0.0;
    if (rows.empty() && numeric_col && !parse_number(fields[*numeric_col], v)) continue;
    rows.push_back(std::move(fields));
  }
  return rows;
}

class IdIndex {
 public:
  explicit IdIndex(const std::vector<std::string>& ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], static_cast<Eigen::Index>(i));
  }
  Eigen::Index at(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::invalid_input, "cli", "unknown id '" + id + "'");
    return it->second;
  }

 private:
  std::unordered_map<std::string, Eigen::Index> index_;
};

RowMatrix gather(const RowMatrix& x, const std::vector<Eigen::Index>& rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

RlaceConfig rlace_config(const RlaceFlags& f, Eigen::Index k, std::uint64_t seed) {
  RlaceConfig c;
  c.k = k;
  c.outer_loops = f.outer_loops;
  c.inner_loops = f.inner_loops;
  c.theta_lr = f.lr;
  c.eraser_lr = f.eraser_lr;
  c.batch_size = f.batch_size;
  c.eval_every = f.eval_every;
  c.dev_fraction = f.dev_fraction;
  c.weight_decay = f.weight_decay;
  c.probe.max_iterations = f.probe_iterations;
  c.seed = seed;
  try {
    c.validate();
  } catch (const Error& e) {
    usage_error(e.what());
  }
  return c;
}

json vector_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json rlace_diagnostics_json(const FitDiagnostics& d) {
  json evals = json::array();
  for (const auto& e : d.evaluations) evals.push_back({{"step", e.step}, {"loss", e.loss}, {"accuracy", e.accuracy}});
  return {{"final_spectrum", vector_json(d.final_spectrum)},
          {"best_spectrum", vector_json(d.best_spectrum)},
          {"best_dev_loss", d.best_loss},
          {"best_dev_accuracy", d.best_accuracy},
          {"best_step", d.best_step},
          {"snap_residual", d.snap_residual},
          {"evaluations", evals}};
}

json equilibrium_json(const EquilibriumResult& r) {
  return {{"game_value", r.game_value},
          {"theta_star", vector_json(r.theta_star)},
          {"degenerate", r.degenerate},
          {"metadata", r.metadata}};
}

void require_classification(const Dataset& data, const std::string& what) {
  if (data.task() != TaskKind::binary_classification)
    usage_error(what + " requires binary classification labels but the labels are " +
                std::string(to_string(data.task())));
}

std::vector<int> integer_labels(const VectorXd& y, const std::string& what) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != std::round(y[i])) usage_error(what + " requires integer labels");
    out[static_cast<std::size_t>(i)] = static_cast<int>(y[i]);
  }
  return out;
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  for (const auto& f : fields) out += (out.empty() ? "" : ",") + f;
  return out + "\n";
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

/// Seeded train/test split of the row indices.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_rows(Eigen::Index n, double test_fraction,
                                                                          std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(test_fraction * n)), 1, n - 1);
  std::vector<Eigen::Index> test(order.begin(), order.begin() + n_test);
  std::vector<Eigen::Index> train(order.begin() + n_test, order.end());
  return {train, test};
}

}  // namespace

void add_rlace_flags(CLI::App& app, RlaceFlags& f) {
  app.add_option("--outer-loops", f.outer_loops, "R-LACE outer iterations")->group("R-LACE");
  app.add_option("--inner-loops", f.inner_loops, "steps per player per outer iteration")->group("R-LACE");
  app.add_option("--lr", f.lr, "predictor learning rate")->group("R-LACE");
  app.add_option("--eraser-lr", f.eraser_lr, "eraser learning rate")->group("R-LACE");
  app.add_option("--batch-size", f.batch_size, "minibatch size")->group("R-LACE");
  app.add_option("--eval-every", f.eval_every, "outer iterations between adversary evaluations")->group("R-LACE");
  app.add_option("--dev-fraction", f.dev_fraction, "share of rows held out for adversary selection")
      ->group("R-LACE");
  app.add_option("--weight-decay", f.weight_decay, "decoupled weight decay on the predictor")->group("R-LACE");
  app.add_option("--probe-iterations", f.probe_iterations, "Newton iterations for evaluation probes")
      ->group("R-LACE");
}

std::vector<long> parse_rank_list(const std::string& text) {
  auto parse_one = [&](std::string_view s) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1)
      usage_error("bad rank list '" + text + "' (expected \"a..b\" or \"a,b,c\" with ranks >= 1)");
    return v;
  };
  std::vector<long> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long lo = parse_one(std::string_view(text).substr(0, dots));
    const long hi = parse_one(std::string_view(text).substr(dots + 2));
    if (hi < lo) usage_error("bad rank list '" + text + "': empty range");
    for (long r = lo; r <= hi; ++r) out.push_back(r);
  } else {
    for (const auto& f : split(text, ',')) out.push_back(parse_one(f));
  }
  if (out.empty()) usage_error("empty rank list");
  return out;
}

void run_erase(const EraseFlags& f, const CLI::App& app) {
  if (f.method.empty()) usage_error("--method is required");
  const Method method = cli_method(f.method);
  if (f.rank < 1) usage_error("rank must be ≥ 1");
  if (f.out.empty()) usage_error("--out is required");
  if (f.pca_dim < 0) usage_error("--pca-dim must be >= 1");
  const Eigen::Index k = f.rank;

  Manifest manifest("erase", resolved_config(app), f.seed);
  json fit = {{"method", f.method}, {"rank", f.rank}, {"seed", f.seed}};
  json warnings = json::array();
  std::optional<ErasureProjection> proj;

  if (method == Method::rayleigh_closed_form) {
    if (f.matrix.empty()) usage_error("method rayleigh requires --matrix");
    if (f.pca_dim > 0) usage_error("--pca-dim does not apply to --matrix input");
    const RowMatrix a = load_csv_matrix(f.matrix, f.matrix_header);
    manifest.add_input("matrix", f.matrix);
    if (k >= a.cols()) usage_error("rank must be smaller than the dimension " + std::to_string(a.cols()));
    const auto eq = rayleigh_equilibrium({SymMatrix(MatrixXd(a)), k});
    for (const auto& w : eq.warnings) warnings.push_back(w);
    fit["equilibrium"] = equilibrium_json(eq);
    proj = eq.to_projection(Method::rayleigh_closed_form);
  } else {
    const bool needs_labels = method != Method::pca_diff;
    if (needs_labels && f.labels.empty()) usage_error("method " + f.method + " requires --labels");
    if (method == Method::pca_diff && f.pairs.empty()) usage_error("method pca-diff requires --pairs");
    const LoadedData loaded = load_data(f.vectors, needs_labels ? f.labels : "", f.task);
    manifest.add_input("vectors", f.vectors);
    if (needs_labels) manifest.add_input("labels", f.labels);
    for (const auto& w : loaded.vectors.warnings) warnings.push_back(w);

    RowMatrix x = loaded.vectors.x;
    std::optional<Reduction> reduction;
    if (f.pca_dim > 0) {
      auto pca = pca_reduce(x, f.pca_dim);
      x = std::move(pca.projected);
      reduction = Reduction{std::move(pca.mean), std::move(pca.basis)};
      fit["pca_dim"] = f.pca_dim;
    }
    if (k >= x.cols()) usage_error("rank must be smaller than the dimension " + std::to_string(x.cols()));

    std::optional<Dataset> data;
    if (loaded.dataset) data.emplace(loaded.dataset->with_x(x));
    if (loaded.string_classes)
      fit["label_classes"] = {loaded.string_classes->first, loaded.string_classes->second};

    switch (method) {
      case Method::rlace: {
        require_classification(*data, "method rlace");
        const auto result = rlace_fit(*data, GlmSpec{GlmKind::logistic}, rlace_config(f.rlace, k, f.seed));
        fit["diagnostics"] = rlace_diagnostics_json(result.diagnostics);
        proj = result.projection;
        break;
      }
      case Method::inlp: {
        InlpConfig c;
        c.iterations = k;
        c.spec = GlmSpec{data->task() == TaskKind::regression ? GlmKind::squared_error : GlmKind::logistic};
        c.probe.max_iterations = f.rlace.probe_iterations;
        c.seed = f.seed;
        const auto result = inlp_fit(*data, c);
        for (const auto& w : result.warnings) warnings.push_back(w);
        json iters = json::array();
        for (const auto& it : result.iterations)
          iters.push_back({{"train_metric", it.train_metric}, {"theta_norm", it.theta_norm}});
        fit["iterations"] = iters;
        if (!result.projection)
          throw Error(ErrorKind::degenerate, "baselines", "INLP found no direction to remove");
        proj = *result.projection;
        break;
      }
      case Method::regression_closed_form: {
        if (data->task() != TaskKind::regression)
          usage_error("method regression requires a regression task but the labels are " +
                      std::string(to_string(data->task())) + " (pass --task regression to override)");
        if (k != 1) usage_error("method regression removes exactly one direction; use --rank 1");
        const auto eq = regression_equilibrium(*data, !f.no_center);
        for (const auto& w : eq.warnings) warnings.push_back(w);
        fit["equilibrium"] = equilibrium_json(eq);
        proj = eq.to_projection(Method::regression_closed_form);
        break;
      }
      case Method::pls_closed_form: {
        const auto eq = pls_equilibrium(*data, k);
        for (const auto& w : eq.warnings) warnings.push_back(w);
        fit["equilibrium"] = equilibrium_json(eq);
        proj = eq.to_projection(Method::pls_closed_form);
        break;
      }
      case Method::pca_diff: {
        const auto rows = read_id_csv(f.pairs, 2, std::nullopt);
        manifest.add_input("pairs", f.pairs);
        const IdIndex index(loaded.vectors.ids);
        std::vector<Eigen::Index> ia, ib;
        for (const auto& r : rows) {
          ia.push_back(index.at(r[0]));
          ib.push_back(index.at(r[1]));
        }
        fit["pairs"] = rows.size();
        proj = pca_diff_fit(gather(x, ia), gather(x, ib), k);
        break;
      }
      case Method::rayleigh_closed_form:
        break;
    }
    if (reduction) proj->set_reduction(std::move(*reduction));
  }

  fit["warnings"] = warnings;
  fit["dim"] = proj->dim();
  const std::filesystem::path out(f.out);
  std::filesystem::create_directories(out);
  manifest.write_output(out, "projection.json", dump_json(projection_to_json(*proj)));
  manifest.write_output(out, "fit.json", dump_json(fit));
  manifest.finish(out);
}

void run_apply(const ApplyFlags& f, const CLI::App& app) {
  if (f.projection.empty()) usage_error("--projection is required");
  if (f.vectors.empty()) usage_error("--vectors is required");
  if (f.out.empty()) usage_error("--out is required");
  Manifest manifest("apply", resolved_config(app), 0);
  const auto proj = load_projection(f.projection);
  const auto vectors = load_vectors_text(f.vectors);
  manifest.add_input("projection", f.projection);
  manifest.add_input("vectors", f.vectors);
  const std::filesystem::path out(f.out);
  std::filesystem::create_directories(out);
  manifest.write_output(out, "vectors.txt", format_vectors_text(vectors.ids, apply_pipeline(vectors.x, proj)));
  manifest.finish(out);
}

void run_eval(const EvalFlags& f, const CLI::App& app) {
  if (f.out.empty()) usage_error("--out is required");
  const bool any = f.probe || !f.weat.empty() || f.vmeasure || !f.tpr_gap.empty() || !f.simpairs.empty() ||
                   !f.sweep_rank.empty();
  if (!any) usage_error("select at least one metric: --probe, --weat, --vmeasure, --tpr-gap, --simpairs, --sweep-rank");
  if (!(f.test_fraction > 0.0 && f.test_fraction < 1.0)) usage_error("--test-fraction must be in (0, 1)");
  if (f.jobs < 1) usage_error("--jobs must be >= 1");
  if (!f.test_vectors.empty() && f.test_labels.empty()) usage_error("--test-vectors requires --test-labels");

  Manifest manifest("eval", resolved_config(app), f.seed);
  const LoadedData loaded = load_data(f.vectors, f.labels, f.task);
  manifest.add_input("vectors", f.vectors);
  if (!f.labels.empty()) manifest.add_input("labels", f.labels);

  std::optional<ErasureProjection> proj;
  if (!f.projection.empty()) {
    proj = load_projection(f.projection);
    manifest.add_input("projection", f.projection);
  }
  const RowMatrix x = proj ? apply_pipeline(loaded.vectors.x, *proj) : loaded.vectors.x;

  json report = json::object();
  report["projected"] = proj.has_value();
  json warnings = json::array();
  for (const auto& w : loaded.vectors.warnings) warnings.push_back(w);
  std::vector<std::pair<std::string, std::string>> csvs;

  auto labels_for = [&](const std::string& what) -> const Dataset& {
    if (!loaded.dataset) usage_error(what + " requires --labels");
    return *loaded.dataset;
  };

  // Shared probe split: explicit test files, or a seeded split of the input.
  std::optional<Dataset> train, test;
  auto ensure_split = [&](const Dataset& data, bool project) {
    if (train) return;
    if (!f.test_vectors.empty()) {
      const LoadedData t = load_data(f.test_vectors, f.test_labels, f.task);
      manifest.add_input("test_vectors", f.test_vectors);
      manifest.add_input("test_labels", f.test_labels);
      if (project && proj) {
        train.emplace(data.with_x(x));
        test.emplace(t.dataset->with_x(apply_pipeline(t.vectors.x, *proj)));
      } else {
        train.emplace(data);
        test.emplace(*t.dataset);
      }
    } else {
      const auto [tr, te] = split_rows(data.size(), f.test_fraction, f.seed);
      const Dataset base = project && proj ? data.with_x(x) : data;
      train.emplace(base.subset(tr));
      test.emplace(base.subset(te));
    }
  };

  if (f.probe) {
    const Dataset& data = labels_for("--probe");
    require_classification(data, "--probe");
    ensure_split(data, true);
    ProbeBudget budget;
    budget.max_iterations = f.rlace.probe_iterations;
    const auto r = probe_accuracy(*train, *test, budget);
    json j = to_json(r);
    j["majority"] = test->majority_share();
    j["train_rows"] = train->size();
    j["test_rows"] = test->size();
    report["probe"] = j;
    csvs.emplace_back("probe.csv", csv_row({"accuracy", "loss", "majority", "converged"}) +
                                        csv_row({format_double(r.accuracy), format_double(r.loss),
                                                 format_double(test->majority_share()),
                                                 r.converged ? "true" : "false"}));
  }

  if (!f.weat.empty()) {
    const json spec = json::parse(read_text_file(f.weat), nullptr, false);
    if (spec.is_discarded() || !spec.is_object())
      throw Error(ErrorKind::parse_error, "cli", f.weat + ": expected a JSON object {X, Y, A, B}");
    manifest.add_input("weat", f.weat);
    const IdIndex index(loaded.vectors.ids);
    auto rows = [&](const char* key) {
      if (!spec.contains(key) || !spec[key].is_array())
        throw Error(ErrorKind::parse_error, "cli", f.weat + ": missing id list '" + key + "'");
      std::vector<Eigen::Index> ids;
      for (const auto& id : spec[key]) ids.push_back(index.at(id.get<std::string>()));
      return gather(x, ids);
    };
    const auto r = weat_statistic(WeatSpec{rows("X"), rows("Y"), rows("A"), rows("B")}, f.seed);
    report["weat"] = to_json(r);
    csvs.emplace_back("weat.csv", csv_row({"d", "p_value", "exact", "permutations"}) +
                                      csv_row({format_double(r.d), format_double(r.p_value),
                                               r.exact ? "true" : "false", std::to_string(r.permutations)}));
  }

  if (f.vmeasure) {
    const Dataset& data = labels_for("--vmeasure");
    const auto truth = integer_labels(data.y(), "--vmeasure");
    json rows = json::array();
    std::string csv = csv_row({"clusters", "v", "homogeneity", "completeness", "inertia"});
    for (const long c : parse_rank_list(f.clusters)) {
      if (c > x.rows()) usage_error("cannot form " + std::to_string(c) + " clusters from " + std::to_string(x.rows()) + " rows");
      const auto km = kmeans_cluster(x, static_cast<int>(c), f.seed);
      const auto v = v_measure(truth, km.labels);
      json j = to_json(v);
      j["clusters"] = c;
      j["inertia"] = km.inertia;
      rows.push_back(j);
      csv += csv_row({std::to_string(c), format_double(v.v), format_double(v.homogeneity),
                      format_double(v.completeness), format_double(km.inertia)});
    }
    report["vmeasure"] = rows;
    csvs.emplace_back("vmeasure.csv", csv);
  }

  if (!f.tpr_gap.empty()) {
    const Dataset& data = labels_for("--tpr-gap");
    const auto z_all = integer_labels(data.y(), "--tpr-gap");
    const auto rows = read_id_csv(f.tpr_gap, 3, 1);
    manifest.add_input("tpr_gap", f.tpr_gap);
    const IdIndex index(loaded.vectors.ids);
    std::vector<int> y_true, y_pred, z;
    std::map<int, std::pair<long, long>> members;  // class -> (z = 1 count, total)
    for (const auto& r : rows) {
      double t = 0.0, p = 0.0;
      if (!parse_number(r[1], t) || !parse_number(r[2], p) || t != std::round(t) || p != std::round(p))
        throw Error(ErrorKind::parse_error, "cli", f.tpr_gap + ": class labels must be integers");
      const int zi = z_all[static_cast<std::size_t>(index.at(r[0]))];
      if (zi != 0 && zi != 1) usage_error("--tpr-gap requires 0/1 protected-attribute labels");
      y_true.push_back(static_cast<int>(t));
      y_pred.push_back(static_cast<int>(p));
      z.push_back(zi);
      auto& m = members[static_cast<int>(t)];
      m.first += zi;
      m.second += 1;
    }
    std::map<int, double> share;
    for (const auto& [cls, m] : members) share[cls] = static_cast<double>(m.first) / static_cast<double>(m.second);
    const auto r = tpr_gap_suite(y_true, y_pred, z, share);
    report["tpr_gap"] = to_json(r);
    std::string csv = csv_row({"class", "share", "positives_z0", "tpr_z0", "positives_z1", "tpr_z1", "gap"});
    for (std::size_t i = 0; i < r.classes.size(); ++i)
      csv += csv_row({std::to_string(r.classes[i]), format_double(share[r.classes[i]]),
                      std::to_string(r.group0[i].positives), opt_double(r.group0[i].tpr),
                      std::to_string(r.group1[i].positives), opt_double(r.group1[i].tpr), opt_double(r.gaps[i])});
    csvs.emplace_back("tpr_gap.csv", csv);
  }

  if (!f.simpairs.empty()) {
    const auto rows = read_id_csv(f.simpairs, 3, 2);
    manifest.add_input("simpairs", f.simpairs);
    const IdIndex index(loaded.vectors.ids);
    std::vector<Eigen::Index> ia, ib;
    VectorXd scores(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ia.push_back(index.at(rows[i][0]));
      ib.push_back(index.at(rows[i][1]));
      if (!parse_number(rows[i][2], scores[static_cast<Eigen::Index>(i)]))
        throw Error(ErrorKind::parse_error, "cli", f.simpairs + ": bad score '" + rows[i][2] + "'");
    }
    const double r = similarity_correlation(gather(x, ia), gather(x, ib), scores);
    report["simpairs"] = {{"pairs", rows.size()}, {"pearson", r}};
    csvs.emplace_back("simpairs.csv", csv_row({"pairs", "pearson"}) +
                                          csv_row({std::to_string(rows.size()), format_double(r)}));
  }

  if (!f.sweep_rank.empty()) {
    if (proj) usage_error("--sweep-rank fits its own projections; drop --projection");
    const Dataset& data = labels_for("--sweep-rank");
    require_classification(data, "--sweep-rank");
    if (f.method != "rlace" && f.method != "inlp" && f.method != "pls")
      usage_error("--sweep-rank supports --method rlace, inlp or pls");
    const auto ranks = parse_rank_list(f.sweep_rank);
    if (*std::max_element(ranks.begin(), ranks.end()) >= data.dim())
      usage_error("sweep ranks must be smaller than the dimension " + std::to_string(data.dim()));
    ensure_split(data, false);
    ProbeBudget budget;
    budget.max_iterations = f.rlace.probe_iterations;

    const std::size_t n = ranks.size();
    std::vector<std::optional<ProbeAccuracy>> results(n);
    std::vector<std::string> notes(n);
    std::optional<InlpFit> inlp;
    if (f.method == "inlp") {
      InlpConfig c;
      c.iterations = *std::max_element(ranks.begin(), ranks.end());
      c.probe = budget;
      c.seed = f.seed;
      inlp = inlp_fit(*train, c);
    }
    std::vector<std::exception_ptr> errors(n);
    const int jobs = f.method == "rlace" ? f.jobs : 1;
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        const Eigen::Index k = ranks[i];
        std::optional<ErasureProjection> p;
        if (f.method == "rlace") {
          p = rlace_fit(*train, GlmSpec{GlmKind::logistic}, rlace_config(f.rlace, k, f.seed)).projection;
        } else if (f.method == "pls") {
          p = pls_equilibrium(*train, k).to_projection(Method::pls_closed_form);
        } else if (static_cast<std::size_t>(k) <= inlp->iterations.size()) {
          p = inlp->prefix(static_cast<std::size_t>(k));
        } else {
          notes[i] = "INLP stopped after " + std::to_string(inlp->iterations.size()) + " iterations";
        }
        if (p) results[i] = probe_accuracy(*train, *test, *p, budget);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    const auto baseline = probe_accuracy(*train, *test, budget);
    json points = json::array();
    std::string csv = csv_row({"rank", "accuracy", "loss"});
    csv += csv_row({"0", format_double(baseline.accuracy), format_double(baseline.loss)});
    for (std::size_t i = 0; i < n; ++i) {
      if (!results[i]) {
        warnings.push_back("rank " + std::to_string(ranks[i]) + " skipped: " + notes[i]);
        continue;
      }
      points.push_back({{"rank", ranks[i]}, {"accuracy", results[i]->accuracy}, {"loss", results[i]->loss}});
      csv += csv_row({std::to_string(ranks[i]), format_double(results[i]->accuracy), format_double(results[i]->loss)});
    }
    report["sweep"] = {{"method", f.method},
                       {"baseline", to_json(baseline)},
                       {"majority", test->majority_share()},
                       {"points", points}};
    csvs.emplace_back("sweep.csv", csv);
  }

  report["warnings"] = warnings;
  const std::filesystem::path out(f.out);
  std::filesystem::create_directories(out);
  manifest.write_output(out, "report.json", dump_json(report));
  for (const auto& [name, text] : csvs) manifest.write_output(out, name, text);
  manifest.finish(out);
}

void run_synth(const SynthFlags& f, const CLI::App& app) {
  if (f.out.empty()) usage_error("--out is required");
  SynthSpec spec;
  spec.kind = synth_kind_from_string(f.kind);
  spec.n = f.n;
  spec.dim = f.dim;
  spec.seed = f.seed;
  spec.draw = f.draw;
  const SynthData data = make_synth(spec);

  Manifest manifest("synth", resolved_config(app), f.seed);
  const std::filesystem::path out(f.out);
  std::filesystem::create_directories(out);
  manifest.write_output(out, "vectors.txt", format_vectors_text(data.ids, data.x));
  manifest.write_output(out, "labels.txt", format_labels(data.ids, data.y));
  if (data.planted.rows() > 0) manifest.write_output(out, "planted.csv", format_csv_matrix(data.planted));
  manifest.finish(out);
}

}  // namespace erasure::cli
