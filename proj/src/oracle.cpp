#include "ddmin_loc/oracle.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>

#include "ddmin_loc/subprocess.hpp"

namespace ddmin_loc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<std::size_t> g_subject_runs{0};
std::atomic<std::uint64_t> g_trace_counter{0};

std::mutex g_self_mutex;
fs::path g_self_executable;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void require_schema(const json& j, const char* what) {
  if (!j.is_object()) throw ValidationError(fmt::format("{} must be a JSON object", what));
  if (!j.contains("schema") || j.at("schema") != 1) {
    throw ValidationError(fmt::format("{} has unsupported schema (expected 1)", what));
  }
}

std::vector<std::string> command_from_json(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw ConfigurationError(fmt::format("manifest field '{}' must be an array of strings", field));
  }
  std::vector<std::string> out;
  for (const auto& arg : j.at(field)) {
    if (!arg.is_string()) {
      throw ConfigurationError(fmt::format("manifest field '{}' must contain strings", field));
    }
    out.push_back(arg.get<std::string>());
  }
  return out;
}

std::vector<std::string> expand_command(const std::vector<std::string>& cmd) {
  std::vector<std::string> out = cmd;
  for (auto& arg : out) {
    if (arg == kSelfToken) arg = self_executable().string();
  }
  return out;
}

fs::path fresh_trace_path() {
  const auto id = g_trace_counter.fetch_add(1);
  return fs::temp_directory_path() / fmt::format("ddmin-loc-{}-{}.trace.json", ::getpid(), id);
}

ProcessResult launch(const SubjectManifest& manifest, const std::vector<std::string>& cmd,
                     const std::string& input, std::optional<fs::path> trace_path) {
  ProcessRequest request;
  request.argv = expand_command(cmd);
  if (manifest.input_mode == InputMode::ArgvLast) {
    request.argv.push_back(input);
  } else {
    request.stdin_data = input;
  }
  request.workdir = manifest.workdir;
  request.timeout = manifest.per_run_timeout;
  request.env[std::string(kTraceEnvVar)] =
      trace_path ? std::optional<std::string>(trace_path->string()) : std::nullopt;
  g_subject_runs.fetch_add(1);
  return run_process(request);
}

struct TraceFile {
  fs::path path = fresh_trace_path();
  TraceFile() { fs::remove(path); }
  ~TraceFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

OracleCall run_buggy(const SubjectManifest& manifest, const std::string& input,
                     std::string_view reference) {
  TraceFile trace_file;
  const ProcessResult buggy = launch(manifest, manifest.buggy_cmd, input, trace_file.path);
  OracleCall call;
  call.buggy_output = buggy.stdout_data;
  if (!buggy.clean_exit()) return call;

  std::error_code ec;
  if (!fs::exists(trace_file.path, ec)) return call;
  try {
    call.trace = trace_from_json(read_file(trace_file.path));
  } catch (const Error&) {
    return call;
  }
  call.outcome = normalize_output(buggy.stdout_data) == normalize_output(reference) ? Outcome::Pass
                                                                                  : Outcome::Fail;
  return call;
}

}  // namespace

void SubjectManifest::validate() const {
  if (buggy_cmd.empty()) throw ConfigurationError("manifest buggy_cmd is empty");
  if (golden_cmd.empty()) throw ConfigurationError("manifest golden_cmd is empty");
  if (per_run_timeout.count() <= 0) throw ConfigurationError("per_run_timeout must be positive");
}

SubjectManifest manifest_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigurationError("manifest must be a JSON object");
  SubjectManifest m;
  m.buggy_cmd = command_from_json(j, "buggy_cmd");
  m.golden_cmd = command_from_json(j, "golden_cmd");
  const std::string mode = j.value("input_mode", std::string("stdin"));
  if (mode == "stdin") {
    m.input_mode = InputMode::Stdin;
  } else if (mode == "argv") {
    m.input_mode = InputMode::ArgvLast;
  } else {
    throw ConfigurationError(fmt::format("unknown input_mode '{}'", mode));
  }
  if (!j.contains("element_map_path") || !j.at("element_map_path").is_string()) {
    throw ConfigurationError("manifest needs element_map_path");
  }
  m.element_map_path = base_dir / j.at("element_map_path").get<std::string>();
  if (j.contains("per_run_timeout")) {
    const double seconds = j.at("per_run_timeout").get<double>();
    m.per_run_timeout = std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
  }
  m.workdir = base_dir / j.value("workdir", std::string("."));
  m.workdir = m.workdir.lexically_normal();
  m.element_map_path = m.element_map_path.lexically_normal();
  m.validate();
  return m;
}

SubjectManifest load_manifest(const fs::path& path) {
  const fs::path base = fs::absolute(path).parent_path();
  return manifest_from_json(parse_json_file(path), base);
}

json manifest_to_json(const SubjectManifest& m) {
  return json{
      {"buggy_cmd", m.buggy_cmd},
      {"golden_cmd", m.golden_cmd},
      {"input_mode", m.input_mode == InputMode::Stdin ? "stdin" : "argv"},
      {"element_map_path", m.element_map_path.string()},
      {"per_run_timeout", static_cast<double>(m.per_run_timeout.count()) / 1000.0},
      {"workdir", m.workdir.string()},
  };
}

json element_map_to_json(const ElementMap& map) {
  json sites = json::array();
  for (const auto& s : map.predicate_sites()) {
    sites.push_back({{"site", s.site}, {"line", s.line}, {"expr", s.expr}});
  }
  json j{{"schema", 1}, {"executable_lines", map.executable_lines()}, {"predicates", sites}};
  if (map.fault_lines()) j["fault_lines"] = *map.fault_lines();
  return j;
}

ElementMap element_map_from_json(const json& j) {
  require_schema(j, "element map");
  try {
    std::set<int> lines = j.at("executable_lines").get<std::set<int>>();
    std::vector<PredicateSite> sites;
    for (const auto& s : j.at("predicates")) {
      sites.push_back({s.at("site").get<int>(), s.at("line").get<int>(), s.value("expr", std::string())});
    }
    std::optional<std::set<int>> faults;
    if (j.contains("fault_lines")) faults = j.at("fault_lines").get<std::set<int>>();
    return ElementMap(std::move(lines), std::move(sites), std::move(faults));
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed element map: {}", e.what()));
  }
}

ElementMap load_element_map(const fs::path& path) {
  try {
    return element_map_from_json(parse_json_file(path));
  } catch (const ValidationError& e) {
    throw ConfigurationError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

std::string trace_to_json(const Trace& trace) {
  json preds = json::array();
  for (const auto& [site, outcome] : trace.predicate_hits) {
    preds.push_back({{"site", site}, {"outcome", outcome}});
  }
  return json{{"schema", 1}, {"lines", trace.lines_hit}, {"predicates", preds}}.dump();
}

Trace trace_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("trace is not valid JSON: {}", e.what()));
  }
  require_schema(j, "trace");
  try {
    Trace trace;
    for (const auto& line : j.at("lines")) trace.lines_hit.insert(line.get<int>());
    for (const auto& p : j.at("predicates")) {
      trace.predicate_hits.insert({p.at("site").get<int>(), p.at("outcome").get<bool>()});
    }
    return trace;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed trace: {}", e.what()));
  }
}

void set_self_executable(fs::path path) {
  std::lock_guard lock(g_self_mutex);
  g_self_executable = std::move(path);
}

fs::path self_executable() {
  std::lock_guard lock(g_self_mutex);
  if (g_self_executable.empty()) {
    std::error_code ec;
    g_self_executable = fs::read_symlink("/proc/self/exe", ec);
  }
  return g_self_executable;
}

std::string_view normalize_output(std::string_view output) {
  if (!output.empty() && output.back() == '\n') output.remove_suffix(1);
  return output;
}

OracleCall run_differential(const SubjectManifest& manifest, const std::string& input) {
  const ProcessResult golden = launch(manifest, manifest.golden_cmd, input, std::nullopt);
  if (!golden.clean_exit()) return {};
  return run_buggy(manifest, input, golden.stdout_data);
}

OracleCall run_expected(const SubjectManifest& manifest, const std::string& input,
                        std::string_view expected) {
  return run_buggy(manifest, input, expected);
}

std::size_t subject_runs() { return g_subject_runs.load(); }

Oracle differential_oracle(const SubjectManifest& manifest) {
  return [manifest](const std::string& input) {
    OracleCall call = run_differential(manifest, input);
    return OracleVerdict{call.outcome, std::move(call.trace), std::move(call.buggy_output)};
  };
}

}  // namespace ddmin_loc
