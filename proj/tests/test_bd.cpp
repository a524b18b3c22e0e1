#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "banachforge/bd.hpp"

using namespace banachforge;

namespace {

// A small model with one age-2 even chain: zero handle at p_1 = 2, then a
// K handle on block 4 at p_2 = 5. Node ids: 1 (Even0, rank 3), 2 (Even1,
// rank 6).
BDModel small_model(int cap = 20) {
  BDModel m(toy_bd_params(cap));
  int h0 = m.add_zero_handle();
  Coeffs c;
  c.set(1, Scalar::rat(parse_rat("1/2")));
  int h1 = m.add_K_handle(4, c);
  construct_gamma(m, 1, {{2, h0}, {5, h1}});
  return m;
}

}  // namespace

TEST_CASE("toy parameters: growth, extension constant, validation") {
  BDParams p = toy_bd_params(30);
  REQUIRE(p.cap == 30);
  REQUIRE(to_string(p.A0) == "1");
  // beta_0 = 2/m_1 = 1/2 at m_1 = 4, so C_0 = (1 + 1/2)/(1 - 1/2) ... = 5/3.
  REQUIRE(to_string(p.C0()) == "5/3");
  REQUIRE_NOTHROW(p.validate());
}

TEST_CASE("a fresh model carries only the rank-1 base layer") {
  BDModel m(toy_bd_params(10));
  REQUIRE(m.nodes.size() == 1);
  REQUIRE(m.nodes[0].kind == NodeKind::Base);
  REQUIRE(m.nodes[0].rank == 1);
}

TEST_CASE("chain construction guards") {
  BDModel m(toy_bd_params(20));
  int h = m.add_zero_handle();
  REQUIRE_THROWS_AS(construct_gamma(m, 1, {}), ConstructionError);
  // 2j <= p_1 violated.
  REQUIRE_THROWS_AS(construct_gamma(m, 2, {{3, h}}), ConstructionError);
  // Ranks must strictly increase.
  REQUIRE_THROWS_AS(construct_gamma(m, 1, {{5, h}, {5, h}}), ConstructionError);
  // Handle stage must stay below the attachment rank.
  Coeffs c;
  c.set(1, Scalar(1));
  int hk = m.add_K_handle(9, c);
  REQUIRE_THROWS_AS(construct_gamma(m, 1, {{2, h}, {6, hk}}), ConstructionError);
  // Cap: p_a + 1 must stay within the level cap.
  REQUIRE_THROWS_AS(construct_gamma(m, 1, {{2, h}, {20, h}}), ConstructionError);
}

TEST_CASE("registration packs upward: ranks below the frontier are rejected") {
  BDModel m(toy_bd_params(30));
  int h = m.add_zero_handle();
  construct_gamma(m, 1, {{2, h}, {8, h}});  // frontier moves past rank 9
  REQUIRE(m.frontier >= 9);
  REQUIRE_THROWS_AS(construct_gamma(m, 1, {{2, h}}), ConstructionError);
  REQUIRE_NOTHROW(construct_gamma(m, 1, {{m.frontier + 1, h}}));
}

TEST_CASE("K handles certify their inner dual norm") {
  BDModel m(toy_bd_params(20));
  Coeffs heavy;
  heavy.set(1, Scalar(1));
  heavy.set(2, Scalar(1));  // l_1 mass 2 > A0 = 1 against the l_inf stand-in
  REQUIRE_THROWS_AS(m.add_K_handle(3, heavy), PoolError);
  REQUIRE_THROWS_AS(m.add_K_handle(0, Coeffs::unit(1)), PoolError);
  Coeffs ok;
  ok.set(1, Scalar::rat(parse_rat("1/2")));
  ok.set(2, Scalar::rat(parse_rat("1/2")));
  REQUIRE_NOTHROW(m.add_K_handle(3, ok));
}

TEST_CASE("evaluation analysis lists the chain in age order") {
  BDModel m = small_model();
  EvalAnalysis a = evaluation_analysis(m, 2);
  REQUIRE(a.entries.size() == 2);
  REQUIRE(a.entries[0].rank == 3);
  REQUIRE(a.entries[0].node == 1);
  REQUIRE(a.entries[1].rank == 6);
  REQUIRE(a.entries[1].node == 2);
  EvalAnalysis a1 = evaluation_analysis(m, 1);
  REQUIRE(a1.entries.size() == 1);
  REQUIRE_THROWS_AS(evaluation_analysis(m, 0), ConstructionError);
}

TEST_CASE("reconstruction identity holds on random vectors") {
  BDModel m = small_model();
  std::mt19937_64 rng(42);
  for (int t = 0; t < 40; ++t) {
    YVec u = random_yvec(m, rng, 10, 3, 2);
    ExtCtx ctx(m, u);
    for (int gamma : {1, 2}) {
      EvalAnalysis a = evaluation_analysis(m, gamma);
      REQUIRE(scmp(ctx.e(gamma), analysis_rhs(m, ctx, a)) == 0);
    }
  }
}

TEST_CASE("canonical extension fills coordinates above the vector stage") {
  BDModel m = small_model();
  YVec u = make_column(m, 4, 1, Scalar(1));  // block 4, coordinate 1, stage 4
  ExtCtx ctx(m, u);
  // Node 2 (rank 6 > stage 4): e = c through the K handle, (1/m_2)(1/2).
  REQUIRE(scmp(ctx.e(2), ctx.c(2)) == 0);
  REQUIRE(ctx.d(2).is_zero());
  REQUIRE(!ctx.e(2).is_zero());
  // At stage >= rank the coordinate is literal: no y entry means e = 0.
  YVec v = u;
  v.stage = 10;
  ExtCtx ctx2(m, v);
  REQUIRE(ctx2.e(2).is_zero());
  REQUIRE(scmp(ctx2.d(2), Scalar(0) - ctx2.c(2)) == 0);
}

TEST_CASE("projection algebra: nested projections collapse") {
  BDModel m = small_model();
  std::mt19937_64 rng(7);
  for (int t = 0; t < 25; ++t) {
    YVec u = random_yvec(m, rng, 12, 3, 2);
    for (int lo = 1; lo <= 8; lo += 3)
      for (int hi = lo; hi <= 10; hi += 3) {
        YVec a = project(m, project(m, u, hi), lo);
        YVec b = project(m, u, lo);
        REQUIRE(a.stage == b.stage);
        for (auto& [id, v] : a.y) REQUIRE(scmp(v, b.y.count(id) ? b.y.at(id) : Scalar(0)) == 0);
        for (auto& [id, v] : b.y) REQUIRE(scmp(v, a.y.count(id) ? a.y.at(id) : Scalar(0)) == 0);
      }
  }
}

TEST_CASE("truncate and extend are mutually consistent") {
  BDModel m = small_model();
  std::mt19937_64 rng(11);
  YVec u = random_yvec(m, rng, 8, 2, 2);
  YVec up = extend(m, u, 15);
  REQUIRE(up.stage == 15);
  // Truncating the extension back to the original stage recovers u's rows.
  YVec back = truncate(m, up, 8);
  ExtCtx cu(m, u), cb(m, back);
  for (const auto& g : m.nodes) REQUIRE(scmp(cu.e(g.id), cb.e(g.id)) == 0);
  REQUIRE_THROWS_AS(extend(m, u, 4), CapError);
  REQUIRE_THROWS_AS(extend(m, u, 99), CapError);
}

TEST_CASE("stage-limited norms are monotone and bounded by the extension constant") {
  BDModel m = small_model();
  std::mt19937_64 rng(99);
  Scalar c0 = m.params.C0();
  for (int t = 0; t < 30; ++t) {
    YVec u = random_yvec(m, rng, 6, 2, 2);
    Scalar base = norm_Y_upto(m, u, u.stage);
    if (base.is_zero()) continue;
    Scalar prev = base;
    for (int s = u.stage + 1; s <= 12; ++s) {
      Scalar cur = norm_Y_upto(m, u, s);
      REQUIRE(scmp(cur, prev) >= 0);  // more functionals, larger sup
      prev = cur;
    }
    REQUIRE(le_slack(norm_Y(m, u) / base, c0));
  }
}

TEST_CASE("model JSON round trip preserves evaluations") {
  BDModel m = small_model();
  // Add a B handle referencing the built nodes to exercise the id map.
  m.add_B_handle({{1, Rat(1, 2)}, {2, Rat(1, 2)}});
  BDModel back = model_from_json(model_to_json(m));
  REQUIRE(back.nodes.size() == m.nodes.size());
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    YVec u = random_yvec(m, rng, 10, 3, 2);
    REQUIRE(scmp(norm_Y(m, u), norm_Y(back, u)) == 0);
    ExtCtx ca(m, u), cb(back, u);
    for (const auto& g : m.nodes) REQUIRE(scmp(ca.e(g.id), cb.e(g.id)) == 0);
  }
}

TEST_CASE("yvec JSON round trip") {
  BDModel m = small_model();
  std::mt19937_64 rng(3);
  YVec u = random_yvec(m, rng, 9, 2, 2);
  YVec back = yvec_from_json(yvec_to_json(u));
  REQUIRE(back.stage == u.stage);
  ExtCtx ca(m, u), cb(m, back);
  for (const auto& g : m.nodes) REQUIRE(scmp(ca.e(g.id), cb.e(g.id)) == 0);
}

TEST_CASE("columns evaluate to their placed coefficient") {
  BDModel m = small_model();
  YVec col = make_column(m, 5, 3, Scalar::rat(parse_rat("2/3")));
  REQUIRE(col.stage == 5);
  REQUIRE(scmp(col.x.part(5).at(3), Scalar::rat(parse_rat("2/3"))) == 0);
  REQUIRE_THROWS_AS(make_column(m, 99, 1, Scalar(1)), CapError);
  REQUIRE_THROWS_AS(make_column(m, 5, 0, Scalar(1)), ParseError);
}
