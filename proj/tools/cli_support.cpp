#include "cli_support.hpp"

#include "erasure/error.hpp"

#include <ctime>
#include <iomanip>
#include <sstream>

namespace erasure::cli {

namespace {

constexpr const char* kModule = "cli";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_internal(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  if (names.empty()) return true;
  return names[0] == "help" || names[0] == "config" || names[0] == "print-config";
}

bool is_flag(const CLI::Option* opt) { return opt->get_expected_max() == 0; }

}  // namespace

void usage_error(const std::string& message) { throw Error(ErrorKind::usage, kModule, message); }

std::map<std::string, std::string> parse_flat_config(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      usage_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) usage_error("config line " + std::to_string(lineno) + ": empty key");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_config(CLI::App& app, const std::map<std::string, std::string>& config) {
  for (const auto& [key, value] : config) {
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || is_internal(opt)) usage_error("unknown config key '" + key + "'");
    if (opt->count() > 0) continue;  // the command line wins
    if (is_flag(opt)) {
      if (value != "true" && value != "false") usage_error("config key '" + key + "' expects true or false");
      if (value == "false") continue;
    }
    opt->add_result(is_flag(opt) ? std::string("true") : value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      usage_error("config key '" + key + "': " + e.what());
    }
  }
}

std::map<std::string, std::string> resolved_config(const CLI::App& app) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : app.get_options()) {
    if (is_internal(opt)) continue;
    const std::string& key = opt->get_lnames()[0];
    if (is_flag(opt)) {
      out[key] = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      out[key] = joined;
    } else {
      out[key] = opt->get_default_str();
    }
  }
  return out;
}

std::string format_config(const std::map<std::string, std::string>& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Manifest::Manifest(std::string command, std::map<std::string, std::string> config, std::uint64_t seed)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed),
      start_(std::chrono::steady_clock::now()), started_at_(std::chrono::system_clock::now()) {}

void Manifest::add_input(const std::string& role, const std::filesystem::path& path) {
  inputs_[role] = {{"path", path.string()}, {"fnv1a64", fnv1a_hex(read_text_file(path))}};
}

void Manifest::write_output(const std::filesystem::path& dir, const std::string& name, std::string_view text) {
  write_text_file(dir / name, text);
  outputs_[name] = {{"fnv1a64", fnv1a_hex(text)}};
}

void Manifest::finish(const std::filesystem::path& dir) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(started_at_);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream stamp;
  stamp << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  nlohmann::json j = {{"command", command_},
                      {"config", config_},
                      {"seed", seed_},
                      {"inputs", inputs_},
                      {"outputs", outputs_},
                      {"tool_version", ERASURE_VERSION},
                      {"started_at", stamp.str()},
                      {"wall_clock_seconds", seconds}};
  write_text_file(dir / "manifest.json", dump_json(j));
}

LoadedData load_data(const std::string& vectors, const std::string& labels, const std::string& task) {
  if (vectors.empty()) usage_error("--vectors is required");
  if (task != "auto" && task != "classification" && task != "regression")
    usage_error("--task must be auto, classification or regression");
  LoadedData out;
  out.vectors = load_vectors_text(vectors);
  if (labels.empty()) return out;
  const auto label_file = load_labels(labels);
  out.string_classes = label_file.string_classes;
  const VectorXd y = join_labels(out.vectors.ids, label_file);
  TaskKind kind = infer_task(y);
  if (task == "classification") kind = TaskKind::binary_classification;
  if (task == "regression") kind = TaskKind::regression;
  out.dataset.emplace(out.vectors.x, y, kind, out.vectors.ids);
  return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace erasure::cli
