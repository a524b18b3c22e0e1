#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "banachforge/families.hpp"

using namespace banachforge;

namespace {

FiniteSet fs(std::vector<int> v) { return FiniteSet(std::move(v)); }

}  // namespace

TEST_CASE("schreier membership: size bounded by the minimum") {
  FamilySpec s = parse_family("schreier");
  REQUIRE(member(s, fs({})));
  REQUIRE(member(s, fs({1})));
  REQUIRE(member(s, fs({2, 3})));
  REQUIRE(!member(s, fs({1, 2})));
  REQUIRE(member(s, fs({3, 5, 9})));
  REQUIRE(!member(s, fs({3, 5, 9, 11})));
}

TEST_CASE("bounded and fine families cap the size") {
  FamilySpec b = parse_family("bounded:3");
  REQUIRE(member(b, fs({1, 2, 3})));
  REQUIRE(!member(b, fs({1, 2, 3, 4})));
  FamilySpec f = parse_family("fine:2");
  REQUIRE(member(f, fs({7, 9})));
  REQUIRE(!member(f, fs({7, 9, 11})));
}

TEST_CASE("finite sets validate their elements") {
  REQUIRE_THROWS(fs({0, 1}));
  REQUIRE_THROWS(fs({2, 2}));
  REQUIRE_THROWS(fs({3, 1}));
}

TEST_CASE("windowed family: blocks must fit the mark gaps") {
  // Marks 1, 3, 7: window 1 is {2,3} (width 2), window 2 is {4..7} (width 4).
  FamilySpec w = parse_family("osz:1,3,7");
  REQUIRE(member(w, fs({})));
  REQUIRE(member(w, fs({2, 3})));
  REQUIRE(member(w, fs({4, 5, 6, 7})));
  // {2,3} in window 1 then {4,5,6,7} in window 2 is two successive blocks.
  REQUIRE(member(w, fs({2, 3, 4, 5, 6, 7})));
  REQUIRE(member(w, fs({3, 4, 5, 6, 7})));  // splits as {3} | {4,5,6,7}
  // Three elements at or below mark 3 only fit window 1, whose width is 2.
  REQUIRE(!member(w, fs({1, 2, 3})));
  REQUIRE_THROWS_AS(member(w, fs({8})), CapError);
}

TEST_CASE("windowed family with a base family on the window indices") {
  // Base bounded:1 allows only one block, so no set may straddle windows.
  FamilySpec w = parse_family("osz:1,3,7;base=bounded:1");
  REQUIRE(member(w, fs({2, 3})));
  REQUIRE(member(w, fs({4, 5, 6, 7})));
  REQUIRE(!member(w, fs({2, 3, 4, 5, 6, 7})));
}

TEST_CASE("explicit families come from JSON") {
  FamilySpec e = parse_family("explicit:[[1],[2,3]]");
  REQUIRE(member(e, fs({1})));
  REQUIRE(member(e, fs({2, 3})));
  REQUIRE(!member(e, fs({2})));
  REQUIRE_THROWS_AS(parse_family("explicit:{\"a\":1}"), ParseError);
}

TEST_CASE("admissibility: blocks must be successive and interleaved") {
  FamilySpec s = parse_family("schreier");
  // {2,3} admits two successive blocks starting at 2 and 3.
  REQUIRE(is_admissible(s, {fs({2}), fs({3, 4})}));
  // Three blocks need a member {m1<m2<m3} with m1 <= first block: size-3
  // Schreier sets start at 3.
  REQUIRE(is_admissible(s, {fs({3}), fs({5}), fs({7})}));
  REQUIRE(!is_admissible(s, {fs({2}), fs({5}), fs({7})}));
  REQUIRE_THROWS(is_admissible(s, {fs({3, 4}), fs({4})}));   // not successive
  REQUIRE_THROWS(is_admissible(s, {fs({}), fs({4})}));       // empty block
}

TEST_CASE("greedy admissibility equals the exhaustive interleaving search") {
  std::mt19937_64 rng(99);
  std::vector<FamilySpec> specs = {parse_family("schreier"), parse_family("bounded:2"),
                                   parse_family("fine:3")};
  std::uniform_int_distribution<int> gap(1, 3), len(1, 3), nblocks(1, 4);
  for (int t = 0; t < 300; ++t) {
    const FamilySpec& spec = specs[t % specs.size()];
    std::vector<FiniteSet> Es;
    int cursor = gap(rng);
    int nb = nblocks(rng);
    for (int b = 0; b < nb; ++b) {
      std::vector<int> e;
      int l = len(rng);
      for (int i = 0; i < l; ++i) {
        e.push_back(cursor);
        cursor += gap(rng);
      }
      Es.push_back(fs(e));
      cursor += gap(rng);
    }
    REQUIRE(is_admissible(spec, Es) == is_admissible_exhaustive(spec, Es));
  }
}

TEST_CASE("regularity: spreading and hereditary up to a cap") {
  REQUIRE(is_regular(parse_family("schreier"), 12));
  REQUIRE(is_regular(parse_family("bounded:3"), 12));
  REQUIRE(is_regular(parse_family("fine:2"), 10));
  // {1} present but {2} missing: not spreading.
  REQUIRE(!is_regular(parse_family("explicit:[[],[1]]"), 6));
  REQUIRE_THROWS_AS(is_regular(parse_family("schreier"), 25), CapError);
}

TEST_CASE("family spec parse errors") {
  REQUIRE_THROWS_AS(parse_family("nosuch"), ParseError);
  REQUIRE_THROWS_AS(parse_family("osz:2,3"), ParseError);   // marks must start at 1
  REQUIRE_THROWS_AS(parse_family("bounded:-1"), ParseError);
}
