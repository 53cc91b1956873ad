#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddmin_loc {

/// Suspiciousness values are doubles; +infinity is a legitimate score.
using Score = double;

enum class FormulaKind { Tarantula, Ochiai, GenProg, Jaccard, DStar };

struct Formula {
  FormulaKind kind = FormulaKind::Jaccard;
  int exponent = 2;  // DStar only
  // DStar only: use passed - (totalfailed - failed) as the denominator
  // instead of passed + (totalfailed - failed). Scores may go negative.
  bool printed_dstar = false;

  static Formula tarantula() { return {FormulaKind::Tarantula}; }
  static Formula ochiai() { return {FormulaKind::Ochiai}; }
  static Formula genprog() { return {FormulaKind::GenProg}; }
  static Formula jaccard() { return {FormulaKind::Jaccard}; }
  static Formula dstar(int exponent = 2) { return {FormulaKind::DStar, exponent}; }

  bool operator==(const Formula&) const = default;
};

/// CLI spelling: tarantula|ochiai|genprog|jaccard|dstar.
std::string_view formula_name(FormulaKind kind);
std::optional<FormulaKind> parse_formula(std::string_view name);
/// Parses a comma list or "all" into formulas in canonical order.
std::vector<Formula> parse_formula_list(std::string_view list);
std::vector<Formula> all_formulas();

/// Scores one element from its counters. Throws ContractError when
/// 0 <= failed <= total_failed, 0 <= passed <= total_passed or
/// total_failed >= 1 does not hold, or a DStar exponent is below 1.
Score score(const Formula& formula, int failed, int passed, int total_failed, int total_passed);

}  // namespace ddmin_loc
