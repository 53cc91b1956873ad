#include "ddmin_loc/sbfl.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ddmin_loc/errors.hpp"

namespace ddmin_loc {

namespace {

constexpr std::array kAllKinds = {FormulaKind::Tarantula, FormulaKind::Ochiai,
                                  FormulaKind::GenProg, FormulaKind::Jaccard, FormulaKind::DStar};

constexpr Score kInfinity = std::numeric_limits<Score>::infinity();

// Each score is one rounded division of exact integers (plus a sqrt for
// Ochiai), so counters with equal exact scores give equal doubles.
Score tarantula(long long failed, long long passed, long long total_failed, long long total_passed) {
  if (failed == 0) return 0.0;
  if (total_passed == 0) return 1.0;
  const long long num = failed * total_passed;
  return static_cast<double>(num) / static_cast<double>(num + passed * total_failed);
}

Score ochiai(long long failed, long long passed, long long total_failed) {
  if (failed == 0) return 0.0;
  return std::sqrt(static_cast<double>(failed * failed) /
                   static_cast<double>(total_failed * (failed + passed)));
}

Score genprog(int failed, int passed) {
  if (failed == 0) return 0.0;
  if (passed == 0) return 1.0;
  return 0.1;
}

Score jaccard(long long failed, long long passed, long long total_failed) {
  return static_cast<double>(failed) / static_cast<double>(total_failed + passed);
}

Score dstar(const Formula& f, int failed, int passed, int total_failed) {
  if (failed == 0) return 0.0;
  const int missed = total_failed - failed;
  const int denominator = f.printed_dstar ? passed - missed : passed + missed;
  if (denominator == 0) return kInfinity;
  if (f.exponent == 2) {
    return static_cast<double>(static_cast<long long>(failed) * failed) / denominator;
  }
  return std::pow(static_cast<double>(failed), f.exponent) / denominator;
}

}  // namespace

std::string_view formula_name(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Tarantula: return "tarantula";
    case FormulaKind::Ochiai: return "ochiai";
    case FormulaKind::GenProg: return "genprog";
    case FormulaKind::Jaccard: return "jaccard";
    case FormulaKind::DStar: return "dstar";
  }
  return "?";
}

std::optional<FormulaKind> parse_formula(std::string_view name) {
  for (auto kind : kAllKinds) {
    if (formula_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<Formula> all_formulas() {
  std::vector<Formula> out;
  for (auto kind : kAllKinds) out.push_back(Formula{kind});
  return out;
}

std::vector<Formula> parse_formula_list(std::string_view list) {
  if (list == "all") return all_formulas();
  std::array<bool, kAllKinds.size()> wanted{};
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto token = list.substr(start, comma == std::string_view::npos ? list.npos : comma - start);
    const auto kind = parse_formula(token);
    if (!kind) throw ContractError(fmt::format("unknown formula '{}'", token));
    wanted[static_cast<std::size_t>(*kind)] = true;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  std::vector<Formula> out;
  for (auto kind : kAllKinds) {
    if (wanted[static_cast<std::size_t>(kind)]) out.push_back(Formula{kind});
  }
  return out;
}

Score score(const Formula& formula, int failed, int passed, int total_failed, int total_passed) {
  if (total_failed < 1 || failed < 0 || failed > total_failed || passed < 0 ||
      passed > total_passed) {
    throw ContractError(fmt::format("invalid counters: failed={} passed={} totalfailed={} totalpassed={}",
                                    failed, passed, total_failed, total_passed));
  }
  switch (formula.kind) {
    case FormulaKind::Tarantula: return tarantula(failed, passed, total_failed, total_passed);
    case FormulaKind::Ochiai: return ochiai(failed, passed, total_failed);
    case FormulaKind::GenProg: return genprog(failed, passed);
    case FormulaKind::Jaccard: return jaccard(failed, passed, total_failed);
    case FormulaKind::DStar:
      if (formula.exponent < 1) throw ContractError("DStar exponent must be >= 1");
      return dstar(formula, failed, passed, total_failed);
  }
  throw ContractError("unknown formula");
}

}  // namespace ddmin_loc
