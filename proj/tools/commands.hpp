#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <string>

namespace erasure::cli {

/// R-LACE knobs shared by `erase` and the `eval` rank sweep.
struct RlaceFlags {
  long outer_loops = 10000;
  int inner_loops = 1;
  double lr = 0.005;
  double eraser_lr = 0.005;
  long batch_size = 128;
  long eval_every = 1000;
  double dev_fraction = 0.2;
  double weight_decay = 0.0;
  int probe_iterations = 100;
};

struct EraseFlags {
  std::string method;
  long rank = 1;
  std::string vectors, labels, pairs, matrix;
  bool matrix_header = false;
  long pca_dim = 0;
  std::string task = "auto";
  bool no_center = false;
  std::uint64_t seed = 0;
  RlaceFlags rlace;
  std::string out;
};

struct ApplyFlags {
  std::string projection, vectors, out;
};

struct EvalFlags {
  std::string vectors, labels, projection, task = "auto";
  std::string test_vectors, test_labels;
  double test_fraction = 0.3;
  bool probe = false;
  std::string weat;
  bool vmeasure = false;
  std::string clusters = "2";
  std::string tpr_gap;
  std::string simpairs;
  std::string sweep_rank;
  std::string method = "rlace";
  int jobs = 1;
  std::uint64_t seed = 0;
  RlaceFlags rlace;
  std::string out;
};

struct SynthFlags {
  std::string kind = "planted-1d";
  long n = 2000;
  long dim = 50;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
  std::string out;
};

void add_rlace_flags(CLI::App& app, RlaceFlags& flags);

void run_erase(const EraseFlags& flags, const CLI::App& app);
void run_apply(const ApplyFlags& flags, const CLI::App& app);
void run_eval(const EvalFlags& flags, const CLI::App& app);
void run_synth(const SynthFlags& flags, const CLI::App& app);

/// "1..20" or "1,2,5". Usage error on anything else.
std::vector<long> parse_rank_list(const std::string& text);

}  // namespace erasure::cli
