#include "ddmin_loc/locfusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ddmin_loc {

namespace {

constexpr std::array kAllModes = {ModeKind::Statement, ModeKind::Predicate, ModeKind::Hybrid};

Score element_score(const Formula& formula, const Counts& c, const Spectrum& spectrum) {
  return score(formula, c.failed, c.passed, spectrum.total_failed(), spectrum.total_passed());
}

// Avoids 0 * inf.
Score weighted(double weight, Score value) {
  if (weight == 0.0) return 0.0;
  return weight * value;
}

}  // namespace

double Mode::effective_alpha() const {
  switch (kind) {
    case ModeKind::Statement: return 0.0;
    case ModeKind::Predicate: return 1.0;
    case ModeKind::Hybrid: return alpha;
  }
  return alpha;
}

std::string_view mode_name(ModeKind kind) {
  switch (kind) {
    case ModeKind::Statement: return "statement";
    case ModeKind::Predicate: return "predicate";
    case ModeKind::Hybrid: return "hybrid";
  }
  return "?";
}

std::optional<ModeKind> parse_mode(std::string_view name) {
  for (auto kind : kAllModes) {
    if (mode_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<Mode> parse_mode_list(std::string_view list, double alpha) {
  std::array<bool, kAllModes.size()> wanted{};
  if (list == "all") {
    wanted.fill(true);
  } else {
    std::size_t start = 0;
    while (true) {
      const auto comma = list.find(',', start);
      const auto token =
          list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
      const auto kind = parse_mode(token);
      if (!kind) throw ContractError(fmt::format("unknown mode '{}'", token));
      wanted[static_cast<std::size_t>(*kind)] = true;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  std::vector<Mode> out;
  for (auto kind : kAllModes) {
    if (!wanted[static_cast<std::size_t>(kind)]) continue;
    switch (kind) {
      case ModeKind::Statement: out.push_back(Mode::statement()); break;
      case ModeKind::Predicate: out.push_back(Mode::predicate()); break;
      case ModeKind::Hybrid: out.push_back(Mode::hybrid(alpha)); break;
    }
  }
  return out;
}

LineScores statement_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula) {
  LineScores out;
  for (int line : map.executable_lines()) {
    out.emplace(line, element_score(formula, spectrum.statement(line), spectrum));
  }
  return out;
}

LineScores predicate_scores_mapped(const Spectrum& spectrum, const ElementMap& map,
                                   const Formula& formula) {
  LineScores out;
  for (int line : map.executable_lines()) out.emplace(line, 0.0);
  for (const auto& site : map.predicate_sites()) {
    Score& best = out.at(site.line);
    for (bool polarity : {false, true}) {
      best = std::max(best, element_score(formula, spectrum.predicate(site.site, polarity), spectrum));
    }
  }
  return out;
}

LineScores hybrid_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula,
                         double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ContractError(fmt::format("alpha {} outside [0, 1]", alpha));
  }
  if (alpha == 0.0) return statement_scores(spectrum, map, formula);
  if (alpha == 1.0) return predicate_scores_mapped(spectrum, map, formula);
  const LineScores stmt = statement_scores(spectrum, map, formula);
  const LineScores pred = predicate_scores_mapped(spectrum, map, formula);
  LineScores out;
  for (const auto& [line, s] : stmt) {
    out.emplace(line, weighted(alpha, pred.at(line)) + weighted(1.0 - alpha, s));
  }
  return out;
}

LineScores mode_scores(const Spectrum& spectrum, const ElementMap& map, const Formula& formula,
                       const Mode& mode) {
  switch (mode.kind) {
    case ModeKind::Statement: return statement_scores(spectrum, map, formula);
    case ModeKind::Predicate: return predicate_scores_mapped(spectrum, map, formula);
    case ModeKind::Hybrid: return hybrid_scores(spectrum, map, formula, mode.alpha);
  }
  throw ContractError("unknown mode");
}

Ranking rank(const LineScores& scores, const ElementMap& map) {
  Ranking ranking;
  ranking.entries.reserve(map.executable_lines().size());
  for (int line : map.executable_lines()) {
    auto it = scores.find(line);
    if (it == scores.end()) throw ContractError(fmt::format("line {} has no score", line));
    ranking.entries.push_back({line, it->second});
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.score > b.score; });
  ranking.universe_size = ranking.entries.size();
  return ranking;
}

Score Ranking::score_of(int line) const {
  for (const auto& e : entries) {
    if (e.line == line) return e.score;
  }
  throw ContractError(fmt::format("line {} is not ranked", line));
}

double Ranking::position_of(int line) const {
  const Score s = score_of(line);
  std::size_t higher = 0;
  std::size_t tied = 0;
  for (const auto& e : entries) {
    if (e.score > s) {
      ++higher;
    } else if (e.score == s) {
      ++tied;
    }
  }
  return static_cast<double>(higher) + static_cast<double>(tied + 1) / 2.0;
}

}  // namespace ddmin_loc
