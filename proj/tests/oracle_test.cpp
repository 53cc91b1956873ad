#include "doctest.h"

#include <future>
#include "json.hpp"

#include "ddmin_loc/oracle.hpp"
#include "ddmin_loc/subprocess.hpp"
#include "support.hpp"

using namespace ddmin_loc;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

SubjectManifest walkthrough() { return load_manifest(subjects_dir() / "count_as_and_es" / "manifest.json"); }

// Manifest whose buggy side is a shell snippet and whose golden side
// prints `golden_out`.
SubjectManifest shell_subject(const std::string& buggy_script, const std::string& golden_out = "ok",
                              std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
  SubjectManifest m;
  m.buggy_cmd = {"/bin/sh", "-c", buggy_script};
  m.golden_cmd = {"/bin/sh", "-c", "echo " + golden_out};
  m.element_map_path = subjects_dir() / "count_as_and_es" / "map.json";
  m.per_run_timeout = timeout;
  m.workdir = fs::temp_directory_path();
  return m;
}

const std::string kWriteTrace =
    R"(printf '{"schema":1,"lines":[1],"predicates":[]}' > "$DDMIN_LOC_TRACE"; )";

std::size_t leftover_traces() {
  const std::string prefix = "ddmin-loc-" + std::to_string(::getpid()) + "-";
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(fs::temp_directory_path())) {
    if (e.path().filename().string().starts_with(prefix)) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("walkthrough labels through the subprocess route") {
  const auto m = walkthrough();
  const auto fail = run_differential(m, "accurate");
  CHECK(fail.outcome == Outcome::Fail);
  CHECK(fail.buggy_output == "2\n");
  REQUIRE(fail.trace.has_value());
  CHECK(fail.trace->lines_hit == std::set<int>{1, 2, 3, 5, 7, 10});

  CHECK(run_differential(m, "").outcome == Outcome::Pass);
  CHECK(run_differential(m, "t").outcome == Outcome::Pass);
  CHECK(run_differential(m, "e").outcome == Outcome::Fail);
}

TEST_CASE("subprocess and in-process routes agree") {
  const auto m = walkthrough();
  const InProcessSubject in_process("count_as_and_es");
  for (const char* input : {"accurate", "accu", "rate", "ra", "te", "t", "e", "déjà", "xyz"}) {
    INFO(input);
    const auto sub = run_differential(m, input);
    const auto local = in_process(input);
    CHECK(sub.outcome == local.outcome);
    CHECK(sub.trace == local.trace);
  }
}

TEST_CASE("expected-output comparison ignores one trailing newline") {
  const auto m = walkthrough();
  CHECK(run_expected(m, "accurate", "3").outcome == Outcome::Fail);
  CHECK(run_expected(m, "accurate", "2").outcome == Outcome::Pass);
  CHECK(run_expected(m, "t", "0\n").outcome == Outcome::Pass);
  CHECK(run_expected(m, "t", "0\n\n").outcome == Outcome::Fail);
  CHECK(normalize_output("a\n") == "a");
  CHECK(normalize_output("a\n\n") == "a\n");
  CHECK(normalize_output("") == "");
}

TEST_CASE("unresolved verdicts") {
  SUBCASE("buggy timeout") {
    const auto m = shell_subject("exec sleep 5", "ok", std::chrono::milliseconds(200));
    const auto start = std::chrono::steady_clock::now();
    CHECK(run_differential(m, "x").outcome == Outcome::Unresolved);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));
  }
  SUBCASE("non-terminating MiniLang subject stops on its step budget") {
    const fs::path prog = fs::temp_directory_path() / "ddmin-loc-oracle-loop.ml";
    std::ofstream(prog) << "while true\n{\nx = 1\n}\n";
    SubjectManifest m = walkthrough();
    m.buggy_cmd = {std::string(kSelfToken), "minilang", "run", prog.string()};
    CHECK(run_differential(m, "x").outcome == Outcome::Unresolved);
    fs::remove(prog);
  }
  SUBCASE("missing trace") {
    CHECK(run_differential(shell_subject("echo bad"), "x").outcome == Outcome::Unresolved);
  }
  SUBCASE("malformed trace") {
    const auto m = shell_subject(R"(echo '{"lines":' > "$DDMIN_LOC_TRACE"; echo bad)");
    CHECK(run_differential(m, "x").outcome == Outcome::Unresolved);
  }
  SUBCASE("abnormal buggy exit") {
    CHECK(run_differential(shell_subject(kWriteTrace + "echo bad; exit 3"), "x").outcome ==
          Outcome::Unresolved);
    CHECK(run_differential(shell_subject(kWriteTrace + "kill -SEGV $$"), "x").outcome ==
          Outcome::Unresolved);
  }
  SUBCASE("abnormal golden exit") {
    SubjectManifest m = shell_subject(kWriteTrace + "echo bad");
    m.golden_cmd = {"/bin/sh", "-c", "exit 1"};
    CHECK(run_differential(m, "x").outcome == Outcome::Unresolved);
  }
  CHECK(leftover_traces() == 0);
}

TEST_CASE("shell subjects with traces give pass and fail") {
  CHECK(run_differential(shell_subject(kWriteTrace + "echo ok"), "x").outcome == Outcome::Pass);
  CHECK(run_differential(shell_subject(kWriteTrace + "echo bad"), "x").outcome == Outcome::Fail);
}

TEST_CASE("golden runs without the trace variable; argv input mode") {
  SubjectManifest m = shell_subject(kWriteTrace + "echo \"$1\"");
  m.input_mode = InputMode::ArgvLast;
  m.buggy_cmd = {"/bin/sh", "-c", kWriteTrace + "echo \"$1\"", "sh"};
  m.golden_cmd = {"/bin/sh", "-c", "echo \"${DDMIN_LOC_TRACE:-unset}-$1\"", "sh"};
  const auto call = run_differential(m, "hi");
  CHECK(call.buggy_output == "hi\n");
  CHECK(run_expected(m, "hi", "hi").outcome == Outcome::Pass);

  ProcessRequest probe;
  probe.argv = m.golden_cmd;
  probe.argv.push_back("x");
  probe.env["DDMIN_LOC_TRACE"] = std::nullopt;
  CHECK(run_process(probe).stdout_data == "unset-x\n");
}

TEST_CASE("missing executables are configuration errors") {
  SubjectManifest m = shell_subject(kWriteTrace + "echo ok");
  m.golden_cmd = {"/nonexistent/ddmin-loc-golden"};
  CHECK_THROWS_AS(run_differential(m, "x"), ConfigurationError);
  m.golden_cmd = {"/bin/sh", "-c", "echo ok"};
  m.buggy_cmd = {"no-such-program-ddmin-loc"};
  CHECK_THROWS_AS(run_differential(m, "x"), ConfigurationError);
}

TEST_CASE("repeated calls are idempotent") {
  const auto m = walkthrough();
  const auto a = run_differential(m, "rate");
  const auto b = run_differential(m, "rate");
  CHECK(a.outcome == b.outcome);
  CHECK(a.trace == b.trace);
  CHECK(a.buggy_output == b.buggy_output);
}

TEST_CASE("concurrent calls use distinct trace files") {
  const auto m = walkthrough();
  const InProcessSubject in_process("count_as_and_es");
  const std::vector<std::string> inputs = {"accurate", "accu", "rate", "ra", "te", "t", "e",
                                           "aaaa", "dddd", "eeee", "zz", "a"};
  std::vector<std::future<OracleCall>> futures;
  for (const auto& in : inputs) {
    futures.push_back(std::async(std::launch::async, [&m, in] { return run_differential(m, in); }));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto call = futures[i].get();
    const auto want = in_process(inputs[i]);
    INFO(inputs[i]);
    CHECK(call.outcome == want.outcome);
    CHECK(call.trace == want.trace);
  }
  CHECK(leftover_traces() == 0);
}

TEST_CASE("subject run counter counts both sides") {
  const auto before = subject_runs();
  run_differential(walkthrough(), "abc");
  CHECK(subject_runs() - before == 2);
}

TEST_CASE("trace json") {
  const Trace t = trace_from_json(R"({"schema":1,"lines":[3,1,3],"predicates":[{"site":0,"outcome":true},{"site":0,"outcome":true}]})");
  CHECK(t.lines_hit == std::set<int>{1, 3});
  CHECK(t.predicate_hits == std::set<std::pair<int, bool>>{{0, true}});
  CHECK(trace_from_json(trace_to_json(t)) == t);
  CHECK_THROWS_AS(trace_from_json(R"({"schema":2,"lines":[],"predicates":[]})"), ValidationError);
  CHECK_THROWS_AS(trace_from_json(R"({"schema":1,"lines":["x"],"predicates":[]})"), ValidationError);
  CHECK_THROWS_AS(trace_from_json("[1,2"), ValidationError);
  CHECK_THROWS_AS(trace_from_json(R"({"schema":1,"lines":[1],"predicates":[{"site":0}]})"),
                  ValidationError);
}

TEST_CASE("element map json round trip") {
  const ElementMap map({1, 2, 5}, {{0, 2, "x > 1"}, {1, 5, "y"}}, std::set<int>{5});
  CHECK(element_map_from_json(element_map_to_json(map)) == map);
  const ElementMap committed = load_element_map(subjects_dir() / "count_as_and_es" / "map.json");
  CHECK(committed.fault_lines() == std::set<int>{5});
  CHECK(committed.executable_lines() == std::set<int>{1, 2, 3, 5, 7, 10});

  nlohmann::json bad = element_map_to_json(map);
  bad["predicates"][0]["line"] = 4;
  CHECK_THROWS_AS(element_map_from_json(bad), ValidationError);
  bad = element_map_to_json(map);
  bad.erase("schema");
  CHECK_THROWS_AS(element_map_from_json(bad), ValidationError);
}

TEST_CASE("manifest loading") {
  const auto m = walkthrough();
  const fs::path dir = fs::weakly_canonical(subjects_dir() / "count_as_and_es");
  CHECK(m.buggy_cmd.front() == kSelfToken);
  CHECK(m.per_run_timeout == std::chrono::milliseconds(5000));
  CHECK(fs::weakly_canonical(m.element_map_path) == dir / "map.json");
  CHECK(fs::weakly_canonical(m.workdir) == dir);
  CHECK(m.input_mode == InputMode::Stdin);

  const auto back = manifest_from_json(manifest_to_json(m), "/");
  CHECK(back.buggy_cmd == m.buggy_cmd);
  CHECK(back.per_run_timeout == m.per_run_timeout);

  nlohmann::json j = manifest_to_json(m);
  j["input_mode"] = "file";
  CHECK_THROWS_AS(manifest_from_json(j, "/"), ConfigurationError);
  j = manifest_to_json(m);
  j["buggy_cmd"] = nlohmann::json::array();
  CHECK_THROWS_AS(manifest_from_json(j, "/"), ConfigurationError);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.json"), ConfigurationError);
}
