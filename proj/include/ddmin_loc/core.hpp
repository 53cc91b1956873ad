#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ddmin_loc/errors.hpp"

namespace ddmin_loc {

enum class Outcome { Pass, Fail, Unresolved };

std::string_view to_string(Outcome outcome);

struct StatementId {
  int line = 0;
  auto operator<=>(const StatementId&) const = default;
};

struct PredicateId {
  int site = 0;
  bool polarity = false;
  auto operator<=>(const PredicateId&) const = default;
};

using ElementId = std::variant<StatementId, PredicateId>;

std::string describe(const ElementId& element);

struct PredicateSite {
  int site = 0;
  int line = 0;
  std::string expr;
  bool operator==(const PredicateSite&) const = default;
};

/// The universe of rankable elements for one subject program.
///
/// Construction validates: sites are dense from 0 and in id order, every
/// site line is executable, and fault lines (when present) are executable.
class ElementMap {
public:
  ElementMap() = default;
  ElementMap(std::set<int> executable_lines, std::vector<PredicateSite> sites,
             std::optional<std::set<int>> fault_lines = std::nullopt);

  const std::set<int>& executable_lines() const { return executable_lines_; }
  const std::vector<PredicateSite>& predicate_sites() const { return sites_; }
  const std::optional<std::set<int>>& fault_lines() const { return fault_lines_; }

  bool is_executable(int line) const { return executable_lines_.contains(line); }
  bool has_site(int site) const {
    return site >= 0 && static_cast<std::size_t>(site) < sites_.size();
  }
  int site_line(int site) const { return sites_.at(static_cast<std::size_t>(site)).line; }

  /// Site ids whose source line is `line`, ascending.
  std::vector<int> sites_on_line(int line) const;

  ElementMap with_fault_lines(std::set<int> fault_lines) const;

  bool operator==(const ElementMap&) const = default;

private:
  std::set<int> executable_lines_;
  std::vector<PredicateSite> sites_;
  std::optional<std::set<int>> fault_lines_;
};

struct Trace {
  std::set<int> lines_hit;
  std::set<std::pair<int, bool>> predicate_hits;  // (site, polarity)

  bool covers(const ElementId& element) const;
  bool operator==(const Trace&) const = default;
};

/// Throws ValidationError naming the first element that does not belong to
/// `map`, or a predicate hit whose line was not executed.
void validate_trace(const Trace& trace, const ElementMap& map);

struct TestCase {
  std::string input;  // UTF-8
  Outcome outcome = Outcome::Unresolved;
  std::optional<Trace> trace;
  std::string buggy_output;

  bool operator==(const TestCase&) const = default;
};

struct Counts {
  int failed = 0;
  int passed = 0;
  int executed() const { return failed + passed; }
  bool operator==(const Counts&) const = default;
};

/// Per-element coverage counters over a labeled suite.
class Spectrum {
public:
  Spectrum() = default;
  explicit Spectrum(const ElementMap& map);

  int total_failed() const { return total_failed_; }
  int total_passed() const { return total_passed_; }

  const Counts& statement(int line) const;
  const Counts& predicate(int site, bool polarity) const;
  const Counts& at(const ElementId& element) const;

  const std::map<int, Counts>& statements() const { return statements_; }
  std::size_t site_count() const { return predicates_.size(); }

  /// Count one Pass/Fail execution. Unresolved cases are ignored.
  void add(Outcome outcome, const Trace& trace);

  Spectrum& operator+=(const Spectrum& other);
  friend Spectrum operator+(Spectrum lhs, const Spectrum& rhs) { return lhs += rhs; }
  bool operator==(const Spectrum&) const = default;

private:
  int total_failed_ = 0;
  int total_passed_ = 0;
  std::map<int, Counts> statements_;
  std::vector<std::pair<Counts, Counts>> predicates_;  // (false, true)
};

/// Counts Pass/Fail cases into a spectrum over every element of `map`.
/// Cases sharing an input string are counted once. Throws ValidationError
/// for a trace that does not fit `map`, or when no Fail case is present.
Spectrum build_spectrum(std::span<const TestCase> cases, const ElementMap& map);

/// Same counting without the totalfailed >= 1 requirement; used to compose
/// partial spectra.
Spectrum count_spectrum(std::span<const TestCase> cases, const ElementMap& map);

// Inputs are sequences of Unicode scalar values. Bytes that are not valid
// UTF-8 are kept as lone surrogates U+DC80..U+DCFF so that decoding and
// re-encoding is lossless.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view atoms);

}  // namespace ddmin_loc
