#include "cli_support.hpp"
#include "commands.hpp"

#include "erasure/error.hpp"

#include <iostream>

using namespace erasure;
using namespace erasure::cli;

namespace {

struct Common {
  std::string config;
  bool print_config = false;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Common& common) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->option_defaults()->always_capture_default();
  sub->add_option("--config", common.config, "flat key = value file; flags take precedence");
  sub->add_flag("--print-config", common.print_config, "print the resolved configuration and exit");
  return sub;
}

void emit_error(ErrorKind kind, const std::string& module, const std::string& message) {
  const nlohmann::json j = {{"error_kind", to_string(kind)}, {"message", message}, {"module", module}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Fit and evaluate rank-k concept-erasure projections", "erasure");
  app.set_version_flag("--version", ERASURE_VERSION);
  app.require_subcommand(1);

  Common common;
  EraseFlags erase;
  ApplyFlags apply;
  EvalFlags eval;
  SynthFlags synth;

  CLI::App* erase_cmd = add_command(app, "erase", "fit an erasure projection", common);
  erase_cmd->add_option("--method", erase.method, "rlace, inlp, regression, rayleigh, pls or pca-diff");
  erase_cmd->add_option("--rank", erase.rank, "number of directions to remove");
  erase_cmd->add_option("--vectors", erase.vectors, "vectors file (token v1 ... vD per line)");
  erase_cmd->add_option("--labels", erase.labels, "labels file (id label per line)");
  erase_cmd->add_option("--pairs", erase.pairs, "CSV id_a,id_b of paired words (pca-diff)");
  erase_cmd->add_option("--matrix", erase.matrix, "symmetric CSV matrix A (rayleigh)");
  erase_cmd->add_flag("--matrix-header", erase.matrix_header, "the --matrix CSV has a header row");
  erase_cmd->add_option("--pca-dim", erase.pca_dim, "reduce with PCA to this many dimensions first (0 = off)");
  erase_cmd->add_option("--task", erase.task, "auto, classification or regression");
  erase_cmd->add_flag("--no-center", erase.no_center, "do not center data for the regression closed form");
  erase_cmd->add_option("--seed", erase.seed, "random seed");
  add_rlace_flags(*erase_cmd, erase.rlace);
  erase_cmd->add_option("--out", erase.out, "output directory");

  CLI::App* apply_cmd = add_command(app, "apply", "apply a saved projection to vectors", common);
  apply_cmd->add_option("--projection", apply.projection, "projection.json");
  apply_cmd->add_option("--vectors", apply.vectors, "vectors file");
  apply_cmd->add_option("--out", apply.out, "output directory");

  CLI::App* eval_cmd = add_command(app, "eval", "measure erasure quality", common);
  eval_cmd->add_option("--vectors", eval.vectors, "vectors file");
  eval_cmd->add_option("--labels", eval.labels, "labels file");
  eval_cmd->add_option("--projection", eval.projection, "projection.json applied before every metric");
  eval_cmd->add_option("--task", eval.task, "auto, classification or regression");
  eval_cmd->add_option("--test-vectors", eval.test_vectors, "held-out vectors for --probe");
  eval_cmd->add_option("--test-labels", eval.test_labels, "held-out labels for --probe");
  eval_cmd->add_option("--test-fraction", eval.test_fraction, "seeded test share when no test files are given");
  eval_cmd->add_flag("--probe", eval.probe, "linear probe accuracy");
  eval_cmd->add_option("--weat", eval.weat, "WEAT spec JSON {X, Y, A, B}");
  eval_cmd->add_flag("--vmeasure", eval.vmeasure, "k-means V-measure against the labels");
  eval_cmd->add_option("--clusters", eval.clusters, "cluster counts, \"2,4,8\" or \"2..8\"");
  eval_cmd->add_option("--tpr-gap", eval.tpr_gap, "CSV id,y_true,y_pred; labels give the protected group");
  eval_cmd->add_option("--simpairs", eval.simpairs, "CSV id1,id2,score");
  eval_cmd->add_option("--sweep-rank", eval.sweep_rank, "refit for each rank, \"1..20\" or \"1,2,5\"");
  eval_cmd->add_option("--method", eval.method, "sweep method: rlace, inlp or pls");
  eval_cmd->add_option("--jobs", eval.jobs, "parallel sweep points");
  eval_cmd->add_option("--seed", eval.seed, "random seed");
  add_rlace_flags(*eval_cmd, eval.rlace);
  eval_cmd->add_option("--out", eval.out, "output directory");

  CLI::App* synth_cmd = add_command(app, "synth", "generate a synthetic fixture", common);
  synth_cmd->add_option("--kind", synth.kind, "planted-1d, planted-3d, multi-separable, no-signal or blobs");
  synth_cmd->add_option("--n", synth.n, "rows");
  synth_cmd->add_option("--dim", synth.dim, "dimension");
  synth_cmd->add_option("--seed", synth.seed, "structure seed");
  synth_cmd->add_option("--draw", synth.draw, "independent sample index for the same structure");
  synth_cmd->add_option("--out", synth.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(ErrorKind::usage, "cli", e.what());
    return kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!common.config.empty()) apply_config(*sub, parse_flat_config(read_text_file(common.config)));
    if (common.print_config) {
      std::cout << format_config(resolved_config(*sub));
      return kExitOk;
    }
    if (sub == erase_cmd) run_erase(erase, *sub);
    if (sub == apply_cmd) run_apply(apply, *sub);
    if (sub == eval_cmd) run_eval(eval, *sub);
    if (sub == synth_cmd) run_synth(synth, *sub);
  } catch (const Error& e) {
    emit_error(e.kind(), e.module(), e.what());
    return e.kind() == ErrorKind::usage ? kExitUsage : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    emit_error(ErrorKind::parse_error, "cli", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    emit_error(ErrorKind::internal, "cli", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
