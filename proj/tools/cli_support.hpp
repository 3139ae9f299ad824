#pragma once

#include "erasure/dataio.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace erasure::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

[[noreturn]] void usage_error(const std::string& message);

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_flat_config(std::string_view text);

/// Fills options of `app` that were not given on the command line from the
/// config map. Unknown keys are usage errors.
void apply_config(CLI::App& app, const std::map<std::string, std::string>& config);

/// key=value for every option of `app` after flags and config are resolved.
std::map<std::string, std::string> resolved_config(const CLI::App& app);
std::string format_config(const std::map<std::string, std::string>& config);

/// 64-bit FNV-1a over the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Records inputs, outputs and timing; written as manifest.json next to the
/// outputs. Only the manifest carries wall-clock data.
class Manifest {
 public:
  Manifest(std::string command, std::map<std::string, std::string> config, std::uint64_t seed);

  void add_input(const std::string& role, const std::filesystem::path& path);
  /// Writes `text` to dir/name and records its digest.
  void write_output(const std::filesystem::path& dir, const std::string& name, std::string_view text);
  void finish(const std::filesystem::path& dir);

 private:
  std::string command_;
  std::map<std::string, std::string> config_;
  std::uint64_t seed_;
  nlohmann::json inputs_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point start_;
  std::chrono::system_clock::time_point started_at_;
};

struct LoadedData {
  VectorsFile vectors;
  std::optional<Dataset> dataset;  // when labels were given
  std::optional<std::pair<std::string, std::string>> string_classes;
};

/// Vectors plus optional labels joined by id. `task` is "auto",
/// "classification" or "regression".
LoadedData load_data(const std::string& vectors, const std::string& labels, const std::string& task);

std::string dump_json(const nlohmann::json& j);

}  // namespace erasure::cli
