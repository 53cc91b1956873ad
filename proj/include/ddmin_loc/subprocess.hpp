#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddmin_loc {

struct ProcessRequest {
  std::vector<std::string> argv;
  std::string stdin_data;
  std::filesystem::path workdir;
  std::chrono::milliseconds timeout{5000};
  // nullopt value removes the variable from the child's environment.
  std::map<std::string, std::optional<std::string>> env;
};

struct ProcessResult {
  std::string stdout_data;
  bool timed_out = false;
  bool exited = false;  // normal termination via exit()
  int exit_code = -1;
  int signal = 0;

  bool clean_exit() const { return exited && exit_code == 0 && !timed_out; }
};

/// Runs argv[0] (PATH lookup) with piped stdin/stdout and stderr discarded.
/// The child gets its own process group, which is killed on timeout.
/// Throws ConfigurationError when the program cannot be executed.
ProcessResult run_process(const ProcessRequest& request);

}  // namespace ddmin_loc
