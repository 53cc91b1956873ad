#include "ddmin_loc/ddmin.hpp"

#include <algorithm>
#include <map>

namespace ddmin_loc {

std::vector<TestCase> DdminResult::all_cases() const {
  std::vector<TestCase> out;
  out.reserve(t_fail.size() + t_pass.size() + unresolved.size());
  out.insert(out.end(), t_fail.begin(), t_fail.end());
  out.insert(out.end(), t_pass.begin(), t_pass.end());
  out.insert(out.end(), unresolved.begin(), unresolved.end());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t length, std::size_t n) {
  if (n == 0 || n > length) throw ContractError("partition granularity out of range");
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  chunks.reserve(n);
  const std::size_t base = length / n;
  const std::size_t extra = length % n;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = base + (i < extra ? 1 : 0);
    chunks.emplace_back(offset, size);
    offset += size;
  }
  return chunks;
}

namespace {

struct BudgetExceeded {
  DdminStop reason;
};

class Search {
public:
  Search(const Oracle& oracle, const DdminBudget& budget, DdminResult& result)
      : oracle_(oracle), budget_(budget), result_(result) {}

  Outcome test(const std::u32string& atoms) {
    if (auto it = cache_.find(atoms); it != cache_.end()) {
      ++result_.cache_hits;
      return it->second;
    }
    if (budget_.max_executions && result_.executions >= *budget_.max_executions) {
      throw BudgetExceeded{DdminStop::BudgetExhausted};
    }
    if (budget_.deadline && std::chrono::steady_clock::now() >= *budget_.deadline) {
      throw BudgetExceeded{DdminStop::DeadlineReached};
    }
    return execute(atoms);
  }

  Outcome execute(const std::u32string& atoms) {
    TestCase tc;
    tc.input = encode_utf8(atoms);
    try {
      OracleVerdict verdict = oracle_(tc.input);
      tc.outcome = verdict.outcome;
      tc.trace = std::move(verdict.trace);
      tc.buggy_output = std::move(verdict.output);
    } catch (const ExecutionFault&) {
      tc.outcome = Outcome::Unresolved;
      tc.trace.reset();
    }
    if (tc.outcome != Outcome::Unresolved && !tc.trace) tc.outcome = Outcome::Unresolved;
    ++result_.executions;
    cache_.emplace(atoms, tc.outcome);
    const Outcome outcome = tc.outcome;
    switch (outcome) {
      case Outcome::Fail: result_.t_fail.push_back(std::move(tc)); break;
      case Outcome::Pass: result_.t_pass.push_back(std::move(tc)); break;
      case Outcome::Unresolved: result_.unresolved.push_back(std::move(tc)); break;
    }
    return outcome;
  }

private:
  const Oracle& oracle_;
  const DdminBudget& budget_;
  DdminResult& result_;
  std::map<std::u32string, Outcome> cache_;
};

}  // namespace

DdminResult ddmin(const std::string& initial, const Oracle& oracle, const DdminBudget& budget) {
  std::u32string current = decode_utf8(initial);
  if (current.empty()) throw ContractError("initial input is empty");

  DdminResult result;
  Search search(oracle, budget, result);
  if (search.execute(current) != Outcome::Fail) {
    throw ContractError("initial input does not fail");
  }

  std::size_t n = 2;
  try {
    while (current.size() >= 2) {
      const auto chunks = partition(current.size(), n);
      bool reduced = false;

      for (const auto& [offset, size] : chunks) {
        std::u32string chunk = current.substr(offset, size);
        if (search.test(chunk) == Outcome::Fail) {
          current = std::move(chunk);
          n = 2;
          reduced = true;
          break;
        }
      }
      if (!reduced) {
        for (const auto& [offset, size] : chunks) {
          std::u32string complement = current.substr(0, offset) + current.substr(offset + size);
          if (search.test(complement) == Outcome::Fail) {
            current = std::move(complement);
            n = std::max<std::size_t>(n - 1, 2);
            reduced = true;
            break;
          }
        }
      }
      if (reduced) {
        n = std::min(n, current.size());
        continue;
      }
      if (n >= current.size()) break;
      n = std::min(current.size(), 2 * n);
    }
  } catch (const BudgetExceeded& e) {
    result.stop = e.reason;
  }

  result.minimal_input = encode_utf8(current);
  return result;
}

}  // namespace ddmin_loc
