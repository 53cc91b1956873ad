#include "doctest.h"

#include <algorithm>

#include "ddmin_loc/core.hpp"
#include "support.hpp"

using namespace ddmin_loc;
using namespace testing_support;

namespace {

// The seven labeled inputs of the count_as_and_es walkthrough.
std::vector<TestCase> walkthrough_cases() {
  const auto program = minilang::parse(walkthrough_source());
  const std::vector<std::pair<std::string, Outcome>> labeled = {
      {"accurate", Outcome::Fail}, {"rate", Outcome::Fail}, {"te", Outcome::Fail},
      {"e", Outcome::Fail},        {"accu", Outcome::Pass}, {"ra", Outcome::Pass},
      {"t", Outcome::Pass}};
  std::vector<TestCase> out;
  for (const auto& [input, outcome] : labeled) {
    const auto r = minilang::run(program, input);
    out.push_back({input, outcome, r.trace, r.output});
  }
  return out;
}

ElementMap walkthrough_map() { return minilang::element_map(minilang::parse(walkthrough_source())); }

ElementMap small_map() {
  return ElementMap({1, 2, 3, 4}, {{0, 2, "a"}, {1, 3, "b"}});
}

Trace random_trace(const ElementMap& map) {
  Trace t;
  for (int line : map.executable_lines()) {
    if (uniform(0, 1)) t.lines_hit.insert(line);
  }
  for (const auto& s : map.predicate_sites()) {
    if (!t.lines_hit.contains(s.line)) continue;
    if (uniform(0, 1)) t.predicate_hits.insert({s.site, true});
    if (uniform(0, 1)) t.predicate_hits.insert({s.site, false});
  }
  return t;
}

std::vector<TestCase> random_cases(const ElementMap& map, int n, int salt) {
  std::vector<TestCase> out;
  for (int i = 0; i < n; ++i) {
    const int kind = uniform(0, 4);
    const Outcome o = kind == 0 ? Outcome::Unresolved : kind <= 2 ? Outcome::Fail : Outcome::Pass;
    TestCase tc{"in" + std::to_string(salt) + "_" + std::to_string(i), o, random_trace(map), ""};
    if (o == Outcome::Unresolved && uniform(0, 1)) tc.trace.reset();
    out.push_back(tc);
  }
  return out;
}

}  // namespace

TEST_CASE("walkthrough spectrum matches the independent oracle") {
  const auto map = walkthrough_map();
  const auto cases = walkthrough_cases();
  const Spectrum s = build_spectrum(cases, map);
  CHECK(s.total_failed() == 4);
  CHECK(s.total_passed() == 3);
  // if-condition line, increment line, predicate (if-site, false/true)
  CHECK(s.statement(5) == Counts{4, 3});
  CHECK(s.statement(7) == Counts{2, 2});
  CHECK(s.predicate(1, false) == Counts{4, 3});
  CHECK(s.predicate(1, true) == Counts{2, 2});
  for (int line : {1, 2, 3, 10}) CHECK(s.statement(line) == Counts{4, 3});
  CHECK(s.predicate(0, true) == Counts{4, 3});
  CHECK(s.predicate(0, false) == Counts{4, 3});
}

TEST_CASE("single failing case covering every line") {
  const auto map = small_map();
  Trace t{{1, 2, 3, 4}, {{0, true}, {1, false}}};
  const std::vector<TestCase> cases = {{"x", Outcome::Fail, t, ""}};
  const Spectrum s = build_spectrum(cases, map);
  CHECK(s.total_passed() == 0);
  for (int line : map.executable_lines()) CHECK(s.statement(line) == Counts{1, 0});
  CHECK(s.predicate(0, true) == Counts{1, 0});
  CHECK(s.predicate(0, false) == Counts{0, 0});
}

TEST_CASE("unresolved cases are ignored") {
  const auto map = walkthrough_map();
  auto cases = walkthrough_cases();
  const Spectrum base = build_spectrum(cases, map);
  cases.push_back({"zzz", Outcome::Unresolved, std::nullopt, ""});
  cases.push_back({"aaa", Outcome::Unresolved, Trace{{1}, {}}, ""});
  CHECK(build_spectrum(cases, map) == base);
}

TEST_CASE("duplicate inputs count once") {
  const auto map = walkthrough_map();
  auto cases = walkthrough_cases();
  const Spectrum base = build_spectrum(cases, map);
  cases.push_back(cases.front());
  CHECK(build_spectrum(cases, map) == base);
}

TEST_CASE("uncovered elements stay in the spectrum with zero counters") {
  const auto map = small_map();
  const std::vector<TestCase> cases = {{"x", Outcome::Fail, Trace{{1}, {}}, ""}};
  const Spectrum s = build_spectrum(cases, map);
  CHECK(s.statements().size() == 4);
  CHECK(s.statement(4) == Counts{0, 0});
  CHECK(s.predicate(1, true) == Counts{0, 0});
}

TEST_CASE("build_spectrum errors") {
  const auto map = small_map();
  SUBCASE("unknown line") {
    const std::vector<TestCase> cases = {{"x", Outcome::Fail, Trace{{9}, {}}, ""}};
    CHECK_THROWS_WITH_AS(build_spectrum(cases, map), doctest::Contains("line 9"), ValidationError);
  }
  SUBCASE("unknown site") {
    const std::vector<TestCase> cases = {{"x", Outcome::Fail, Trace{{1, 2}, {{7, true}}}, ""}};
    CHECK_THROWS_WITH_AS(build_spectrum(cases, map), doctest::Contains("site 7"), ValidationError);
  }
  SUBCASE("predicate without its line") {
    const std::vector<TestCase> cases = {{"x", Outcome::Fail, Trace{{1}, {{0, true}}}, ""}};
    CHECK_THROWS_AS(build_spectrum(cases, map), ValidationError);
  }
  SUBCASE("no failing case") {
    const std::vector<TestCase> cases = {{"x", Outcome::Pass, Trace{{1}, {}}, ""}};
    CHECK_THROWS_WITH_AS(build_spectrum(cases, map), doctest::Contains("no failing"), ValidationError);
  }
  SUBCASE("pass case without trace") {
    const std::vector<TestCase> cases = {{"x", Outcome::Fail, Trace{{1}, {}}, ""},
                                         {"y", Outcome::Pass, std::nullopt, ""}};
    CHECK_THROWS_AS(build_spectrum(cases, map), ValidationError);
  }
}

TEST_CASE("element map invariants are enforced") {
  CHECK_THROWS_AS(ElementMap({1, 2}, {{1, 1, "x"}}), ValidationError);   // not dense
  CHECK_THROWS_AS(ElementMap({1, 2}, {{0, 5, "x"}}), ValidationError);   // line not executable
  CHECK_THROWS_AS(ElementMap({1, 2}, {}, std::set<int>{3}), ValidationError);
  CHECK_THROWS_AS(ElementMap({0, 2}, {}), ValidationError);
  const ElementMap ok({1, 2, 3}, {{0, 2, "c"}, {1, 2, "d"}}, std::set<int>{3});
  CHECK(ok.sites_on_line(2) == std::vector<int>{0, 1});
  CHECK(ok.sites_on_line(3).empty());
}

TEST_CASE("spectrum properties over random traces") {
  const auto map = small_map();
  for (int round = 0; round < 200; ++round) {
    auto a = random_cases(map, uniform(1, 12), round);
    a.push_back({"seed" + std::to_string(round), Outcome::Fail, random_trace(map), ""});
    const auto b = random_cases(map, uniform(0, 12), round + 1000);

    auto joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    const Spectrum whole = build_spectrum(joined, map);

    // additivity over disjoint case lists
    CHECK(whole == count_spectrum(a, map) + count_spectrum(b, map));

    // permutation invariance
    auto shuffled = joined;
    std::shuffle(shuffled.begin(), shuffled.end(), rng());
    CHECK(build_spectrum(shuffled, map) == whole);

    // bounds
    for (const auto& [line, c] : whole.statements()) {
      CHECK(c.failed <= whole.total_failed());
      CHECK(c.passed <= whole.total_passed());
      CHECK(c.failed >= 0);
      CHECK(c.passed >= 0);
    }
    for (const auto& s : map.predicate_sites()) {
      for (bool p : {false, true}) {
        CHECK(whole.predicate(s.site, p).failed <= whole.total_failed());
        CHECK(whole.predicate(s.site, p).passed <= whole.total_passed());
      }
    }
  }
}

TEST_CASE("utf8 decoding is lossless") {
  CHECK(decode_utf8("héllo") == U"héllo");
  CHECK(decode_utf8("日本").size() == 2);
  CHECK(encode_utf8(U"€x") == "€x");
  for (int round = 0; round < 500; ++round) {
    std::string bytes;
    const int n = uniform(0, 24);
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<char>(uniform(0, 255)));
    CHECK(encode_utf8(decode_utf8(bytes)) == bytes);
  }
}
