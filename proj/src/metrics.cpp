#include "ddmin_loc/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ddmin_loc {

LocalizationResult evaluate(const Ranking& ranking, const std::set<int>& fault_lines) {
  if (fault_lines.empty()) throw ValidationError("no fault lines to evaluate against");
  if (ranking.universe_size == 0) throw ValidationError("empty ranking");

  LocalizationResult result;
  bool found = false;
  for (int line : fault_lines) {
    const bool ranked = std::any_of(ranking.entries.begin(), ranking.entries.end(),
                                    [line](const RankEntry& e) { return e.line == line; });
    if (!ranked) {
      throw ValidationError(fmt::format("fault line {} is not an executable line", line));
    }
    const double position = ranking.position_of(line);
    if (!found || position < result.expected_rank) {
      result.expected_rank = position;
      result.faulty_line_used = line;
      found = true;
    }
  }
  result.exam = result.expected_rank / static_cast<double>(ranking.universe_size);
  for (int n : kInspectDepths) result.inspect_at[n] = result.expected_rank <= n;
  return result;
}

}  // namespace ddmin_loc
