#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "ddmin_loc/core.hpp"
#include "ddmin_loc/sbfl.hpp"

namespace ddmin_loc {

enum class ModeKind { Statement, Predicate, Hybrid };

struct Mode {
  ModeKind kind = ModeKind::Hybrid;
  double alpha = 0.5;  // Hybrid only

  static Mode statement() { return {ModeKind::Statement, 0.0}; }
  static Mode predicate() { return {ModeKind::Predicate, 1.0}; }
  static Mode hybrid(double alpha = 0.5) { return {ModeKind::Hybrid, alpha}; }

  /// Weight of the predicate term: 0 for Statement, 1 for Predicate.
  double effective_alpha() const;
  bool operator==(const Mode&) const = default;
};

std::string_view mode_name(ModeKind kind);
std::optional<ModeKind> parse_mode(std::string_view name);
/// Comma list or "all"; hybrid entries take `alpha`.
std::vector<Mode> parse_mode_list(std::string_view list, double alpha);

using LineScores = std::map<int, Score>;

struct RankEntry {
  int line = 0;
  Score score = 0;
  bool operator==(const RankEntry&) const = default;
};

/// Executable lines ordered by descending score, ascending line within a tie.
struct Ranking {
  std::vector<RankEntry> entries;
  std::size_t universe_size = 0;

  /// Mid-point position of the tie group holding `line`: h + (k + 1) / 2.
  double position_of(int line) const;
  Score score_of(int line) const;
  bool operator==(const Ranking&) const = default;
};

LineScores statement_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula);

/// Each line's score is the maximum over both polarities of every predicate
/// site on that line; lines without sites score 0.
LineScores predicate_scores_mapped(const Spectrum& spectrum, const ElementMap& map,
                                   const Formula& formula);

/// alpha * max(predicate scores on line) + (1 - alpha) * statement score.
/// alpha = 0 and alpha = 1 return the statement and predicate scores
/// unchanged. Throws ContractError for alpha outside [0, 1].
LineScores hybrid_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula,
                         double alpha);

LineScores mode_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula,
                       const Mode& mode);

/// Throws ContractError if an executable line has no score.
Ranking rank(const LineScores& scores, const ElementMap& map);

}  // namespace ddmin_loc
