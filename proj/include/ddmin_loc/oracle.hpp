#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ddmin_loc/core.hpp"
#include "ddmin_loc/ddmin.hpp"

namespace ddmin_loc {

/// Environment variable carrying the absolute trace output path.
inline constexpr std::string_view kTraceEnvVar = "DDMIN_LOC_TRACE";

/// Manifest argv entries equal to this token are replaced by the path of
/// the ddmin-loc executable (see set_self_executable).
inline constexpr std::string_view kSelfToken = "${DDMIN_LOC}";

enum class InputMode { Stdin, ArgvLast };

struct SubjectManifest {
  std::vector<std::string> buggy_cmd;
  std::vector<std::string> golden_cmd;
  InputMode input_mode = InputMode::Stdin;
  std::filesystem::path element_map_path;
  std::chrono::milliseconds per_run_timeout{5000};
  std::filesystem::path workdir;

  void validate() const;
};

/// Relative paths are resolved against the manifest's directory.
SubjectManifest load_manifest(const std::filesystem::path& path);
SubjectManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json manifest_to_json(const SubjectManifest& manifest);

nlohmann::json element_map_to_json(const ElementMap& map);
ElementMap element_map_from_json(const nlohmann::json& j);
ElementMap load_element_map(const std::filesystem::path& path);

std::string trace_to_json(const Trace& trace);
/// Accepts duplicate entries. Throws ValidationError on malformed input.
Trace trace_from_json(std::string_view text);

void set_self_executable(std::filesystem::path path);
std::filesystem::path self_executable();

/// Trailing-newline normalization used for output comparison.
std::string_view normalize_output(std::string_view output);

struct OracleCall {
  Outcome outcome = Outcome::Unresolved;
  std::optional<Trace> trace;
  std::string buggy_output;
};

/// Runs golden then buggy. Fail iff normalized outputs differ. Unresolved
/// when either run times out, the buggy run ends abnormally, or its trace
/// is missing or malformed. Throws ConfigurationError if a command cannot
/// be executed.
OracleCall run_differential(const SubjectManifest& manifest, const std::string& input);

/// As run_differential with `expected` standing in for the golden output.
OracleCall run_expected(const SubjectManifest& manifest, const std::string& input,
                        std::string_view expected);

/// Shared, thread-safe count of subject process launches.
std::size_t subject_runs();

/// Adapts run_differential to the ddmin Oracle signature.
Oracle differential_oracle(const SubjectManifest& manifest);

}  // namespace ddmin_loc
