#pragma once
// Shared helpers for the test binaries.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ddmin_loc/ddmin.hpp"
#include "ddmin_loc/minilang.hpp"
#include "ddmin_loc/oracle.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return DDMIN_LOC_SOURCE_DIR; }
inline std::filesystem::path subjects_dir() { return source_dir() / "subjects"; }
inline std::filesystem::path cli_binary() { return DDMIN_LOC_BINARY; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ddmin_loc::minilang::Program load_program(const std::filesystem::path& path) {
  return ddmin_loc::minilang::parse(read_text(path));
}

/// Buggy/golden MiniLang pair evaluated in-process: a second route to the
/// labels produced by the subprocess oracle.
struct InProcessSubject {
  ddmin_loc::minilang::Program buggy;
  ddmin_loc::minilang::Program golden;

  explicit InProcessSubject(const std::string& name)
      : buggy(load_program(subjects_dir() / name / "buggy.ml")),
        golden(load_program(subjects_dir() / name / "golden.ml")) {}

  ddmin_loc::OracleVerdict operator()(const std::string& input) const {
    const auto g = ddmin_loc::minilang::run(golden, input);
    const auto b = ddmin_loc::minilang::run(buggy, input);
    ddmin_loc::OracleVerdict v;
    v.output = b.output;
    if (!g.ok() || !b.ok()) return v;
    v.trace = b.trace;
    v.outcome = ddmin_loc::normalize_output(g.output) == ddmin_loc::normalize_output(b.output)
                    ? ddmin_loc::Outcome::Pass
                    : ddmin_loc::Outcome::Fail;
    return v;
  }
};

inline std::string walkthrough_source() {
  return read_text(subjects_dir() / "count_as_and_es" / "buggy.ml");
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20261014);
  return engine;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

}  // namespace testing_support
