// ddmin-loc command line: localize, eval, minilang run/map.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"

#include "ddmin_loc/harness.hpp"
#include "ddmin_loc/minilang.hpp"
#include "ddmin_loc/oracle.hpp"

namespace fs = std::filesystem;
using namespace ddmin_loc;

namespace {

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string slurp_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(fmt::format("cannot read '{}'", path.string()));
  return slurp(in);
}

minilang::Program load_program(const fs::path& path) {
  return minilang::parse(slurp_file(path));
}

Formula formula_option(const std::string& name, int exponent, bool printed_dstar) {
  const auto kind = parse_formula(name);
  if (!kind) throw ContractError(fmt::format("unknown formula '{}'", name));
  Formula f{*kind};
  f.exponent = exponent;
  f.printed_dstar = printed_dstar;
  return f;
}

int minilang_run(const fs::path& program_path, const std::optional<std::string>& argv_input) {
  minilang::Program program;
  try {
    program = load_program(program_path);
  } catch (const minilang::SyntaxError& e) {
    fmt::print(stderr, "{}:{}\n", program_path.string(), e.what());
    return 2;
  }
  std::cin.tie(nullptr);
  const std::string input = argv_input ? *argv_input : slurp(std::cin);
  const minilang::RunResult result = minilang::run(program, input);
  std::cout << result.output << std::flush;

  if (const char* trace_path = std::getenv(std::string(kTraceEnvVar).c_str())) {
    std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
    trace << trace_to_json(result.trace);
    if (!trace) {
      fmt::print(stderr, "cannot write trace to '{}'\n", trace_path);
      return 3;
    }
  }
  if (result.error) {
    fmt::print(stderr, "runtime error: {}\n", *result.error);
    return 1;
  }
  return 0;
}

int minilang_map(const fs::path& program_path, const std::vector<int>& fault_lines,
                 const std::optional<fs::path>& out_path) {
  const minilang::Program program = load_program(program_path);
  ElementMap map = minilang::element_map(program);
  if (!fault_lines.empty()) map = map.with_fault_lines({fault_lines.begin(), fault_lines.end()});
  const std::string text = element_map_to_json(map).dump(2) + "\n";
  if (out_path) {
    std::ofstream out(*out_path);
    out << text;
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault localization from a single failing input: delta debugging + SBFL"};
  app.require_subcommand(1);

  // localize
  auto* localize_cmd = app.add_subcommand("localize", "Rank statements for one failing input");
  std::string manifest;
  std::optional<std::string> inline_input;
  std::optional<std::string> input_file;
  std::string formula_name_opt = "jaccard";
  std::string mode_name_opt = "hybrid";
  double alpha = 0.5;
  double timeout_secs = kDefaultSessionTimeout.count();
  std::optional<std::string> out_path;
  int dstar_exponent = 2;
  bool dstar_minus = false;
  localize_cmd->add_option("--manifest", manifest, "Subject manifest.json")->required();
  auto* input_opt = localize_cmd->add_option("--input", inline_input, "Failing input string");
  localize_cmd->add_option("--input-file", input_file, "File holding the failing input")
      ->excludes(input_opt);
  localize_cmd->add_option("--formula", formula_name_opt, "tarantula|ochiai|genprog|jaccard|dstar")
      ->check(CLI::IsMember({"tarantula", "ochiai", "genprog", "jaccard", "dstar"}));
  localize_cmd->add_option("--mode", mode_name_opt, "statement|predicate|hybrid")
      ->check(CLI::IsMember({"statement", "predicate", "hybrid"}));
  auto* alpha_opt = localize_cmd->add_option("--alpha", alpha, "Hybrid weight in [0,1]")
                        ->check(CLI::Range(0.0, 1.0));
  localize_cmd->add_option("--timeout-secs", timeout_secs, "Session deadline")
      ->check(CLI::PositiveNumber);
  localize_cmd->add_option("--out", out_path, "Write the JSON report here");
  localize_cmd->add_option("--dstar-exponent", dstar_exponent)->check(CLI::PositiveNumber);
  localize_cmd->add_flag("--dstar-minus", dstar_minus,
                         "DStar with passed - (totalfailed - failed) denominator");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Sweep a benchmark directory and emit CSV");
  std::string bench;
  std::string formulas = "all";
  std::string modes = "all";
  double eval_alpha = 0.5;
  std::optional<std::string> eval_out;
  unsigned jobs = 1;
  double eval_timeout = kDefaultSessionTimeout.count();
  eval_cmd->add_option("--bench", bench, "Benchmark directory")->required();
  eval_cmd->add_option("--formulas", formulas, "Comma list or 'all'");
  eval_cmd->add_option("--modes", modes, "Comma list or 'all'");
  eval_cmd->add_option("--alpha", eval_alpha)->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--out", eval_out, "CSV output path (stdout if absent)");
  eval_cmd->add_option("--jobs", jobs, "Concurrent sessions")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--timeout-secs", eval_timeout, "Per-session deadline")
      ->check(CLI::PositiveNumber);

  // minilang
  auto* ml_cmd = app.add_subcommand("minilang", "MiniLang subject tools");
  ml_cmd->require_subcommand(1);
  auto* ml_run = ml_cmd->add_subcommand("run", "Run a program (input from stdin or argv)");
  std::string program_path;
  std::optional<std::string> argv_input;
  ml_run->add_option("program", program_path)->required();
  ml_run->add_option("input", argv_input, "Input string (default: stdin)");
  auto* ml_map = ml_cmd->add_subcommand("map", "Emit the element map of a program");
  std::string map_program;
  std::vector<int> fault_lines;
  std::optional<std::string> map_out;
  ml_map->add_option("program", map_program)->required();
  ml_map->add_option("--fault-lines", fault_lines)->delimiter(',');
  ml_map->add_option("-o,--out", map_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ml_run) return minilang_run(program_path, argv_input);
    if (*ml_map) {
      return minilang_map(map_program, fault_lines,
                          map_out ? std::optional<fs::path>(*map_out) : std::nullopt);
    }

    if (*localize_cmd) {
      SessionConfig config;
      config.manifest = manifest;
      if (input_file) {
        config.failing_input = slurp_file(*input_file);
        if (!config.failing_input.empty() && config.failing_input.back() == '\n') {
          config.failing_input.pop_back();
        }
      } else if (inline_input) {
        config.failing_input = *inline_input;
      } else {
        fmt::print(stderr, "one of --input or --input-file is required\n");
        return 2;
      }
      config.formula = formula_option(formula_name_opt, dstar_exponent, dstar_minus);
      const ModeKind kind = *parse_mode(mode_name_opt);
      config.mode = kind == ModeKind::Hybrid     ? Mode::hybrid(alpha)
                    : kind == ModeKind::Statement ? Mode::statement()
                                                  : Mode::predicate();
      config.alpha_given = alpha_opt->count() > 0;
      config.timeout = Seconds(timeout_secs);
      if (out_path) config.output = *out_path;

      const Report report = localize(config);
      for (const auto& w : report.warnings) fmt::print(stderr, "warning: {}\n", w);
      if (!out_path) std::cout << report_to_json(report).dump(2) << '\n';
      return report.status == "ok" ? 0 : 4;
    }

    if (*eval_cmd) {
      BenchmarkOptions options;
      options.formulas = parse_formula_list(formulas);
      options.modes = parse_mode_list(modes, eval_alpha);
      options.jobs = jobs;
      options.session_timeout = Seconds(eval_timeout);
      const BenchmarkResult result = evaluate_benchmark(bench, options);
      for (const auto& w : result.warnings) fmt::print(stderr, "warning: {}\n", w);
      if (eval_out) {
        std::ofstream out(*eval_out);
        if (!out) throw ConfigurationError(fmt::format("cannot write '{}'", *eval_out));
        write_csv(out, result);
      } else {
        write_csv(std::cout, result);
      }
      return 0;
    }
  } catch (const ConfigurationError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
