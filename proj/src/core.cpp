#include "ddmin_loc/core.hpp"

#include <unordered_set>

#include <fmt/format.h>

namespace ddmin_loc {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Unresolved: return "unresolved";
  }
  return "unresolved";
}

std::string describe(const ElementId& element) {
  if (const auto* s = std::get_if<StatementId>(&element)) {
    return fmt::format("line {}", s->line);
  }
  const auto& p = std::get<PredicateId>(element);
  return fmt::format("predicate site {} ({})", p.site, p.polarity ? "true" : "false");
}

ElementMap::ElementMap(std::set<int> executable_lines, std::vector<PredicateSite> sites,
                       std::optional<std::set<int>> fault_lines)
    : executable_lines_(std::move(executable_lines)),
      sites_(std::move(sites)),
      fault_lines_(std::move(fault_lines)) {
  if (!executable_lines_.empty() && *executable_lines_.begin() < 1) {
    throw ValidationError(
        fmt::format("executable line {} is not positive", *executable_lines_.begin()));
  }
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& site = sites_[i];
    if (site.site != static_cast<int>(i)) {
      throw ValidationError(
          fmt::format("predicate site ids must be dense from 0: expected {}, got {}", i, site.site));
    }
    if (!executable_lines_.contains(site.line)) {
      throw ValidationError(fmt::format("predicate site {} is on non-executable line {}",
                                        site.site, site.line));
    }
  }
  if (fault_lines_) {
    for (int line : *fault_lines_) {
      if (!executable_lines_.contains(line)) {
        throw ValidationError(fmt::format("fault line {} is not executable", line));
      }
    }
  }
}

std::vector<int> ElementMap::sites_on_line(int line) const {
  std::vector<int> out;
  for (const auto& site : sites_) {
    if (site.line == line) out.push_back(site.site);
  }
  return out;
}

ElementMap ElementMap::with_fault_lines(std::set<int> fault_lines) const {
  return ElementMap(executable_lines_, sites_, std::move(fault_lines));
}

bool Trace::covers(const ElementId& element) const {
  if (const auto* s = std::get_if<StatementId>(&element)) {
    return lines_hit.contains(s->line);
  }
  const auto& p = std::get<PredicateId>(element);
  return predicate_hits.contains({p.site, p.polarity});
}

void validate_trace(const Trace& trace, const ElementMap& map) {
  for (int line : trace.lines_hit) {
    if (!map.is_executable(line)) {
      throw ValidationError(
          fmt::format("trace references unknown element: {}", describe(StatementId{line})));
    }
  }
  for (const auto& [site, polarity] : trace.predicate_hits) {
    if (!map.has_site(site)) {
      throw ValidationError(fmt::format("trace references unknown element: {}",
                                        describe(PredicateId{site, polarity})));
    }
    if (!trace.lines_hit.contains(map.site_line(site))) {
      throw ValidationError(fmt::format("trace covers {} but not its line {}",
                                        describe(PredicateId{site, polarity}),
                                        map.site_line(site)));
    }
  }
}

Spectrum::Spectrum(const ElementMap& map) : predicates_(map.predicate_sites().size()) {
  for (int line : map.executable_lines()) statements_.emplace(line, Counts{});
}

const Counts& Spectrum::statement(int line) const {
  auto it = statements_.find(line);
  if (it == statements_.end()) {
    throw ValidationError(fmt::format("spectrum has no element {}", describe(StatementId{line})));
  }
  return it->second;
}

const Counts& Spectrum::predicate(int site, bool polarity) const {
  if (site < 0 || static_cast<std::size_t>(site) >= predicates_.size()) {
    throw ValidationError(
        fmt::format("spectrum has no element {}", describe(PredicateId{site, polarity})));
  }
  const auto& pair = predicates_[static_cast<std::size_t>(site)];
  return polarity ? pair.second : pair.first;
}

const Counts& Spectrum::at(const ElementId& element) const {
  if (const auto* s = std::get_if<StatementId>(&element)) return statement(s->line);
  const auto& p = std::get<PredicateId>(element);
  return predicate(p.site, p.polarity);
}

void Spectrum::add(Outcome outcome, const Trace& trace) {
  if (outcome == Outcome::Unresolved) return;
  const bool failed = outcome == Outcome::Fail;
  auto bump = [failed](Counts& c) { ++(failed ? c.failed : c.passed); };
  ++(failed ? total_failed_ : total_passed_);
  for (int line : trace.lines_hit) bump(statements_.at(line));
  for (const auto& [site, polarity] : trace.predicate_hits) {
    auto& pair = predicates_.at(static_cast<std::size_t>(site));
    bump(polarity ? pair.second : pair.first);
  }
}

Spectrum& Spectrum::operator+=(const Spectrum& other) {
  if (statements_.size() != other.statements_.size() ||
      predicates_.size() != other.predicates_.size()) {
    throw ContractError("cannot add spectra over different element maps");
  }
  total_failed_ += other.total_failed_;
  total_passed_ += other.total_passed_;
  for (auto& [line, counts] : statements_) {
    const auto& rhs = other.statement(line);
    counts.failed += rhs.failed;
    counts.passed += rhs.passed;
  }
  for (std::size_t i = 0; i < predicates_.size(); ++i) {
    predicates_[i].first.failed += other.predicates_[i].first.failed;
    predicates_[i].first.passed += other.predicates_[i].first.passed;
    predicates_[i].second.failed += other.predicates_[i].second.failed;
    predicates_[i].second.passed += other.predicates_[i].second.passed;
  }
  return *this;
}

Spectrum count_spectrum(std::span<const TestCase> cases, const ElementMap& map) {
  Spectrum spectrum(map);
  std::unordered_set<std::string> seen;
  for (const auto& tc : cases) {
    if (tc.outcome == Outcome::Unresolved) continue;
    if (!tc.trace) {
      throw ValidationError(fmt::format("{} case has no trace", to_string(tc.outcome)));
    }
    validate_trace(*tc.trace, map);
    if (!seen.insert(tc.input).second) continue;
    spectrum.add(tc.outcome, *tc.trace);
  }
  return spectrum;
}

Spectrum build_spectrum(std::span<const TestCase> cases, const ElementMap& map) {
  Spectrum spectrum = count_spectrum(cases, map);
  if (spectrum.total_failed() == 0) {
    throw ValidationError("spectrum undefined: no failing test case");
  }
  return spectrum;
}

namespace {

constexpr char32_t kEscapeBase = 0xDC00;

void append_utf8(std::string& out, char32_t cp) {
  if (cp >= 0xDC80 && cp <= 0xDCFF) {
    out.push_back(static_cast<char>(cp - kEscapeBase));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    }
    bool ok = len != 0 && i + len <= bytes.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    ok = ok && cp >= min && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.push_back(cp);
      i += len;
    } else {
      out.push_back(kEscapeBase + b0);
      ++i;
    }
  }
  return out;
}

std::string encode_utf8(std::u32string_view atoms) {
  std::string out;
  out.reserve(atoms.size());
  for (char32_t cp : atoms) append_utf8(out, cp);
  return out;
}

}  // namespace ddmin_loc
