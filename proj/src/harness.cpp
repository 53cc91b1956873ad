#include "ddmin_loc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace ddmin_loc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json score_to_json(Score s) {
  if (std::isinf(s)) return s > 0 ? "inf" : "-inf";
  return s;
}

Score score_from_json(const json& j) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "inf") return std::numeric_limits<Score>::infinity();
    if (text == "-inf") return -std::numeric_limits<Score>::infinity();
    throw ValidationError(fmt::format("bad score '{}'", text));
  }
  return j.get<Score>();
}

std::string exception_message(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

void SessionConfig::validate() const {
  if (!(timeout.count() > 0)) throw ContractError("session timeout must be positive");
  if (mode.kind == ModeKind::Hybrid && !(mode.alpha >= 0.0 && mode.alpha <= 1.0)) {
    throw ContractError(fmt::format("alpha {} outside [0, 1]", mode.alpha));
  }
}

json report_to_json(const Report& r) {
  json ranking = json::array();
  for (const auto& e : r.ranking) {
    ranking.push_back({{"line", e.line}, {"score", score_to_json(e.score)}, {"position", e.position}});
  }
  json j{
      {"schema", 1},
      {"status", r.status},
      {"provenance",
       {{"formula", r.formula},
        {"mode", r.mode},
        {"alpha", r.alpha},
        {"manifest", r.manifest},
        {"started_at", r.started_at},
        {"finished_at", r.finished_at}}},
      {"initial_input", r.initial_input},
      {"ddmin",
       {{"minimal_input", r.ddmin.minimal_input},
        {"n_pass", r.ddmin.t_pass.size()},
        {"n_fail", r.ddmin.t_fail.size()},
        {"n_unresolved", r.ddmin.n_unresolved},
        {"executions", r.ddmin.executions},
        {"cache_hits", r.ddmin.cache_hits},
        {"minimal", r.ddmin.minimal},
        {"t_pass", r.ddmin.t_pass},
        {"t_fail", r.ddmin.t_fail}}},
      {"ranking", ranking},
      {"warnings", r.warnings},
  };
  if (r.localization) {
    json inspect = json::object();
    for (const auto& [n, hit] : r.localization->inspect_at) inspect[std::to_string(n)] = hit;
    j["localization"] = {{"exam", r.localization->exam},
                         {"expected_rank", r.localization->expected_rank},
                         {"inspect", inspect},
                         {"faulty_line", r.localization->faulty_line_used}};
  }
  return j;
}

Report report_from_json(const json& j) {
  try {
    if (j.at("schema") != 1) throw ValidationError("report schema must be 1");
    Report r;
    r.status = j.at("status").get<std::string>();
    const auto& p = j.at("provenance");
    r.formula = p.at("formula").get<std::string>();
    r.mode = p.at("mode").get<std::string>();
    r.alpha = p.at("alpha").get<double>();
    r.manifest = p.at("manifest").get<std::string>();
    r.started_at = p.at("started_at").get<std::string>();
    r.finished_at = p.at("finished_at").get<std::string>();
    r.initial_input = j.at("initial_input").get<std::string>();
    const auto& d = j.at("ddmin");
    r.ddmin.minimal_input = d.at("minimal_input").get<std::string>();
    r.ddmin.t_pass = d.at("t_pass").get<std::vector<std::string>>();
    r.ddmin.t_fail = d.at("t_fail").get<std::vector<std::string>>();
    r.ddmin.n_unresolved = d.at("n_unresolved").get<std::size_t>();
    r.ddmin.executions = d.at("executions").get<std::size_t>();
    r.ddmin.cache_hits = d.at("cache_hits").get<std::size_t>();
    r.ddmin.minimal = d.at("minimal").get<bool>();
    for (const auto& e : j.at("ranking")) {
      r.ranking.push_back({e.at("line").get<int>(), score_from_json(e.at("score")),
                           e.at("position").get<double>()});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("localization")) {
      const auto& l = j.at("localization");
      LocalizationResult loc;
      loc.exam = l.at("exam").get<double>();
      loc.expected_rank = l.at("expected_rank").get<double>();
      for (const auto& [n, hit] : l.at("inspect").items()) loc.inspect_at[std::stoi(n)] = hit.get<bool>();
      loc.faulty_line_used = l.at("faulty_line").get<int>();
      r.localization = loc;
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed report: {}", e.what()));
  }
}

Session run_session(const SubjectManifest& manifest, const ElementMap& map, const std::string& input,
                    Seconds timeout) {
  DdminBudget budget;
  budget.deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
  Session session{.ddmin = {}, .map = map, .spectrum = std::nullopt, .timed_out = false};
  try {
    session.ddmin = ddmin(input, differential_oracle(manifest), budget);
  } catch (const ContractError& e) {
    throw Error(fmt::format("not a failing input: {}", e.what()));
  }
  session.timed_out = session.ddmin.stop == DdminStop::DeadlineReached;
  if (!session.timed_out) {
    const auto cases = session.ddmin.all_cases();
    session.spectrum = build_spectrum(cases, map);
  }
  return session;
}

DdminSummary summarize(const DdminResult& result) {
  DdminSummary s;
  s.minimal_input = result.minimal_input;
  for (const auto& tc : result.t_pass) s.t_pass.push_back(tc.input);
  for (const auto& tc : result.t_fail) s.t_fail.push_back(tc.input);
  s.n_unresolved = result.unresolved.size();
  s.executions = result.executions;
  s.cache_hits = result.cache_hits;
  s.minimal = result.minimal();
  return s;
}

Ranking session_ranking(const Session& session, const Formula& formula, const Mode& mode) {
  if (!session.spectrum) throw ContractError("session has no spectrum");
  return rank(mode_scores(*session.spectrum, session.map, formula, mode), session.map);
}

Report localize(const SessionConfig& config) {
  config.validate();
  Report report;
  report.started_at = timestamp_now();
  report.formula = std::string(formula_name(config.formula.kind));
  report.mode = std::string(mode_name(config.mode.kind));
  report.alpha = config.mode.effective_alpha();
  report.manifest = config.manifest.string();
  report.initial_input = config.failing_input;
  if (config.alpha_given && config.mode.kind != ModeKind::Hybrid) {
    report.warnings.push_back(
        fmt::format("alpha ignored in {} mode", mode_name(config.mode.kind)));
  }

  const SubjectManifest manifest = load_manifest(config.manifest);
  const ElementMap map = load_element_map(manifest.element_map_path);
  const Session session = run_session(manifest, map, config.failing_input, config.timeout);
  report.ddmin = summarize(session.ddmin);

  if (session.timed_out) {
    report.status = "timeout";
  } else {
    const Ranking ranking = session_ranking(session, config.formula, config.mode);
    for (const auto& e : ranking.entries) {
      report.ranking.push_back({e.line, e.score, ranking.position_of(e.line)});
    }
    if (map.fault_lines() && !map.fault_lines()->empty()) {
      report.localization = evaluate(ranking, *map.fault_lines());
    }
  }
  report.finished_at = timestamp_now();

  if (config.output) {
    std::ofstream out(*config.output);
    if (!out) throw ConfigurationError(fmt::format("cannot write '{}'", config.output->string()));
    out << report_to_json(report).dump(2) << '\n';
  }
  return report;
}

std::vector<std::string> read_failing_inputs(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(fmt::format("cannot read '{}'", path.string()));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

namespace {

struct WorkItem {
  std::string subject;
  std::size_t input_index = 0;  // 1-based id
  std::string input;
  const SubjectManifest* manifest = nullptr;
  const ElementMap* map = nullptr;
};

struct Subject {
  std::string name;
  SubjectManifest manifest;
  ElementMap map;
  std::vector<std::string> inputs;
};

std::vector<CsvRow> run_item(const WorkItem& item, const BenchmarkOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CsvRow base;
  base.subject = item.subject;
  base.failing_input_id = std::to_string(item.input_index);

  std::optional<Session> session;
  std::string status = "ok";
  try {
    session = run_session(*item.manifest, *item.map, item.input, options.session_timeout);
    if (session->timed_out) status = "timeout";
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error&) {
    status = "not_failing";
  }
  const bool have_faults = item.map->fault_lines() && !item.map->fault_lines()->empty();
  if (status == "ok" && !have_faults) status = "no_fault_lines";

  std::vector<CsvRow> rows;
  for (const auto& formula : options.formulas) {
    for (const auto& mode : options.modes) {
      CsvRow row = base;
      row.formula = std::string(formula_name(formula.kind));
      row.mode = std::string(mode_name(mode.kind));
      row.alpha = mode.effective_alpha();
      row.status = status;
      if (session) {
        row.n_pass = session->ddmin.t_pass.size();
        row.n_fail = session->ddmin.t_fail.size();
        row.executions = session->ddmin.executions;
      }
      if (status == "ok") {
        const LocalizationResult loc =
            evaluate(session_ranking(*session, formula, mode), *item.map->fault_lines());
        row.exam = loc.exam;
        row.expected_rank = loc.expected_rank;
        for (std::size_t i = 0; i < kInspectDepths.size(); ++i) {
          row.inspect[i] = loc.inspect_at.at(kInspectDepths[i]) ? 1.0 : 0.0;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  for (auto& row : rows) row.wall_ms = wall.count();
  return rows;
}

std::vector<CsvRow> aggregate_rows(const std::vector<CsvRow>& detail) {
  std::vector<CsvRow> out;
  for (std::size_t i = 0; i < detail.size(); ++i) {
    const CsvRow& row = detail[i];
    auto existing = std::find_if(out.begin(), out.end(), [&](const CsvRow& a) {
      return a.subject == row.subject && a.formula == row.formula && a.mode == row.mode;
    });
    if (existing != out.end()) continue;

    CsvRow agg;
    agg.subject = row.subject;
    agg.failing_input_id = "*";
    agg.formula = row.formula;
    agg.mode = row.mode;
    agg.alpha = row.alpha;
    agg.status = "aggregate";
    double exam_sum = 0, rank_sum = 0;
    std::size_t evaluated = 0, total = 0;
    std::array<double, 4> hits{};
    std::size_t n_pass = 0, n_fail = 0, executions = 0;
    for (const auto& r : detail) {
      if (r.subject != row.subject || r.formula != row.formula || r.mode != row.mode) continue;
      ++total;
      agg.wall_ms += r.wall_ms;
      n_pass += r.n_pass.value_or(0);
      n_fail += r.n_fail.value_or(0);
      executions += r.executions.value_or(0);
      if (!r.exam) continue;
      ++evaluated;
      exam_sum += *r.exam;
      rank_sum += *r.expected_rank;
      for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += r.inspect[k].value_or(0.0);
    }
    if (evaluated > 0) {
      agg.exam = exam_sum / static_cast<double>(evaluated);
      agg.expected_rank = rank_sum / static_cast<double>(evaluated);
    }
    for (std::size_t k = 0; k < hits.size(); ++k) {
      agg.inspect[k] = hits[k] / static_cast<double>(total);
    }
    agg.n_pass = n_pass;
    agg.n_fail = n_fail;
    agg.executions = executions;
    out.push_back(std::move(agg));
  }
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename T>
std::string optional_field(const std::optional<T>& value) {
  return value ? fmt::format("{}", *value) : std::string();
}

}  // namespace

BenchmarkResult evaluate_benchmark(const fs::path& bench_dir, const BenchmarkOptions& options) {
  if (!fs::is_directory(bench_dir)) {
    throw ConfigurationError(fmt::format("'{}' is not a directory", bench_dir.string()));
  }
  BenchmarkResult result;

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(bench_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<Subject> subjects;
  subjects.reserve(dirs.size());
  for (const auto& dir : dirs) {
    Subject s;
    s.name = dir.filename().string();
    s.manifest = load_manifest(dir / "manifest.json");
    s.map = load_element_map(s.manifest.element_map_path);
    const fs::path inputs = dir / "failing_inputs.txt";
    if (fs::exists(inputs)) s.inputs = read_failing_inputs(inputs);
    if (s.inputs.empty()) {
      result.warnings.push_back(fmt::format("subject '{}' has no failing inputs; skipped", s.name));
      continue;
    }
    subjects.push_back(std::move(s));
  }

  std::vector<WorkItem> items;
  for (const auto& s : subjects) {
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
      items.push_back({s.name, i + 1, s.inputs[i], &s.manifest, &s.map});
    }
  }

  std::vector<std::vector<CsvRow>> slots(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
      try {
        slots[i] = run_item(items[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(items.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (errors[i]) {
      throw ConfigurationError(fmt::format("subject '{}' input {}: {}", items[i].subject,
                                           items[i].input_index, exception_message(errors[i])));
    }
    result.detail.insert(result.detail.end(), slots[i].begin(), slots[i].end());
  }
  result.aggregate = aggregate_rows(result.detail);
  return result;
}

std::string format_csv_row(const CsvRow& row) {
  std::string out;
  out += csv_field(row.subject) + ',';
  out += csv_field(row.failing_input_id) + ',';
  out += row.formula + ',';
  out += row.mode + ',';
  out += fmt::format("{},", row.alpha);
  out += optional_field(row.exam) + ',';
  out += optional_field(row.expected_rank) + ',';
  for (const auto& v : row.inspect) out += optional_field(v) + ',';
  out += optional_field(row.n_pass) + ',';
  out += optional_field(row.n_fail) + ',';
  out += optional_field(row.executions) + ',';
  out += row.status + ',';
  out += std::to_string(row.wall_ms);
  return out;
}

void write_csv(std::ostream& out, const BenchmarkResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& row : result.detail) out << format_csv_row(row) << '\n';
  for (const auto& row : result.aggregate) out << format_csv_row(row) << '\n';
}

}  // namespace ddmin_loc
