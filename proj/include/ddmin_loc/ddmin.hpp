#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddmin_loc/core.hpp"

namespace ddmin_loc {

struct OracleVerdict {
  Outcome outcome = Outcome::Unresolved;
  std::optional<Trace> trace;
  std::string output;
};

/// Labels one candidate input (UTF-8). May throw ExecutionFault, which marks
/// the input Unresolved; any other exception aborts the search.
using Oracle = std::function<OracleVerdict(const std::string& input)>;

struct DdminBudget {
  std::optional<std::size_t> max_executions;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class DdminStop { Minimal, BudgetExhausted, DeadlineReached };

struct DdminResult {
  std::string minimal_input;
  std::vector<TestCase> t_fail;      // execution order, initial input first
  std::vector<TestCase> t_pass;      // execution order
  std::vector<TestCase> unresolved;  // execution order
  std::size_t executions = 0;
  std::size_t cache_hits = 0;
  DdminStop stop = DdminStop::Minimal;

  bool minimal() const { return stop == DdminStop::Minimal; }
  /// Every recorded case, in execution order.
  std::vector<TestCase> all_cases() const;
};

/// Splits `length` atoms into `n` contiguous chunks; earlier chunks take the
/// remainder so sizes differ by at most one. Returns (offset, size) pairs.
std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t length, std::size_t n);

/// Minimizing delta debugging (ddmin2) over the Unicode scalar values of
/// `initial`, with an input-keyed cache.
///
/// Chunks are tested before complements, both in ascending index order.
/// A failing chunk resets granularity to 2; a failing complement lowers it
/// to max(n - 1, 2); otherwise granularity doubles until it reaches the
/// input length. Every distinct executed input is recorded with its
/// outcome. Throws ContractError if `initial` is empty or does not fail.
/// When the budget runs out the best input so far is returned with `stop`
/// set accordingly.
DdminResult ddmin(const std::string& initial, const Oracle& oracle, const DdminBudget& budget = {});

}  // namespace ddmin_loc
