#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddmin_loc/ddmin.hpp"
#include "ddmin_loc/locfusion.hpp"
#include "ddmin_loc/metrics.hpp"
#include "ddmin_loc/oracle.hpp"

namespace ddmin_loc {

using Seconds = std::chrono::duration<double>;

inline constexpr Seconds kDefaultSessionTimeout{15 * 60};

struct SessionConfig {
  std::filesystem::path manifest;
  std::string failing_input;
  Formula formula = Formula::jaccard();
  Mode mode = Mode::hybrid(0.5);
  bool alpha_given = false;  // set when the caller passed alpha explicitly
  Seconds timeout = kDefaultSessionTimeout;
  std::optional<std::filesystem::path> output;

  void validate() const;
};

struct DdminSummary {
  std::string minimal_input;
  std::vector<std::string> t_pass;
  std::vector<std::string> t_fail;
  std::size_t n_unresolved = 0;
  std::size_t executions = 0;
  std::size_t cache_hits = 0;
  bool minimal = true;

  bool operator==(const DdminSummary&) const = default;
};

struct ReportEntry {
  int line = 0;
  Score score = 0;
  double position = 0;
  bool operator==(const ReportEntry&) const = default;
};

struct Report {
  std::string status = "ok";  // ok | timeout
  std::string formula;
  std::string mode;
  double alpha = 0.5;
  std::string manifest;
  std::string started_at;
  std::string finished_at;
  std::string initial_input;
  DdminSummary ddmin;
  std::vector<ReportEntry> ranking;
  std::optional<LocalizationResult> localization;
  std::vector<std::string> warnings;

  bool operator==(const Report&) const = default;
};

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// One ddmin run over a subject plus its spectrum. Scoring under any
/// formula/mode reuses the same session.
struct Session {
  DdminResult ddmin;
  ElementMap map;
  std::optional<Spectrum> spectrum;  // absent on timeout
  bool timed_out = false;
};

/// Throws Error("not a failing input") when `input` does not fail.
Session run_session(const SubjectManifest& manifest, const ElementMap& map, const std::string& input,
                    Seconds timeout);

DdminSummary summarize(const DdminResult& result);
Ranking session_ranking(const Session& session, const Formula& formula, const Mode& mode);

/// ddmin, then spectrum, scores and ranking; metrics when the element map
/// has fault lines. A session that passes its deadline yields a report
/// with status "timeout" and no ranking.
Report localize(const SessionConfig& config);

struct CsvRow {
  std::string subject;
  std::string failing_input_id;
  std::string formula;
  std::string mode;
  double alpha = 0;
  std::optional<double> exam;
  std::optional<double> expected_rank;
  std::array<std::optional<double>, 4> inspect;  // @1, @3, @5, @10
  std::optional<std::size_t> n_pass;
  std::optional<std::size_t> n_fail;
  std::optional<std::size_t> executions;
  std::string status;
  long long wall_ms = 0;
};

inline constexpr const char* kCsvHeader =
    "subject,failing_input_id,formula,mode,alpha,exam,expected_rank,inspect1,inspect3,inspect5,"
    "inspect10,n_pass,n_fail,executions,status,wall_ms";

struct BenchmarkOptions {
  std::vector<Formula> formulas = all_formulas();
  std::vector<Mode> modes = {Mode::statement(), Mode::predicate(), Mode::hybrid(0.5)};
  Seconds session_timeout = kDefaultSessionTimeout;
  unsigned jobs = 1;
};

struct BenchmarkResult {
  std::vector<CsvRow> detail;
  std::vector<CsvRow> aggregate;  // one per (subject, formula, mode)
  std::vector<std::string> warnings;
};

/// Every subdirectory of `bench_dir` holding a manifest.json is a subject;
/// failing_inputs.txt lists one input per non-empty line.
BenchmarkResult evaluate_benchmark(const std::filesystem::path& bench_dir,
                                   const BenchmarkOptions& options);

std::string format_csv_row(const CsvRow& row);
void write_csv(std::ostream& out, const BenchmarkResult& result);

/// Reads failing inputs: one per line, blank lines skipped, '\r' stripped.
std::vector<std::string> read_failing_inputs(const std::filesystem::path& path);

}  // namespace ddmin_loc
