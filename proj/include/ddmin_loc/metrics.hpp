#pragma once

#include <array>
#include <map>
#include <set>

#include "ddmin_loc/locfusion.hpp"

namespace ddmin_loc {

inline constexpr std::array<int, 4> kInspectDepths = {1, 3, 5, 10};

struct LocalizationResult {
  double exam = 1.0;           // position / universe_size
  double expected_rank = 1.0;  // tie-group mid-point position
  std::map<int, bool> inspect_at;
  int faulty_line_used = 0;

  bool operator==(const LocalizationResult&) const = default;
};

/// Locates the best-placed faulty line in `ranking`. Any fault line counts;
/// ties in position go to the lowest line number. Throws ValidationError if
/// `fault_lines` is empty or names a line outside the ranking.
LocalizationResult evaluate(const Ranking& ranking, const std::set<int>& fault_lines);

}  // namespace ddmin_loc
