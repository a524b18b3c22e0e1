#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "banachforge/diagalg.hpp"

using namespace banachforge;

namespace {

DiagOp op_from(const std::string& a0, std::vector<std::pair<int, std::string>> lam,
               std::string basis = "james(lp:2)") {
  DiagOp op;
  op.a0 = Scalar::rat(parse_rat(a0));
  for (auto& [i, s] : lam) op.lambda.set(i, Scalar::rat(parse_rat(s)));
  op.basis = std::move(basis);
  return op;
}

}  // namespace

TEST_CASE("applying a diagonal perturbation of the identity") {
  DiagOp op = op_from("2", {{1, "-1"}, {3, "1/2"}});
  Coeffs x = coeffs_from_csv("1,1,2");
  Coeffs y = diag_apply(op, x);
  REQUIRE(to_string(y.at(1)) == "1");   // (2 - 1) * 1
  REQUIRE(to_string(y.at(2)) == "2");   // 2 * 1
  REQUIRE(to_string(y.at(3)) == "5");   // (2 + 1/2) * 2
  // a0 + lambda_1 = 0 wipes the coordinate.
  DiagOp z = op_from("1", {{1, "-1"}});
  REQUIRE(diag_apply(z, Coeffs::unit(1)).empty());
}

TEST_CASE("multiplication follows the scalar-plus-diagonal product rule") {
  DiagOp s = op_from("2", {{1, "1"}, {2, "-1/2"}});
  DiagOp t = op_from("1/2", {{2, "3"}, {4, "1"}});
  DiagOp p = diag_multiply(s, t);
  REQUIRE(to_string(p.a0) == "1");
  // lambda_1: a0^S lam_1^T + a0^T lam_1^S + lam^S lam^T = 0 + 1/2 + 0.
  REQUIRE(to_string(p.lambda.at(1)) == "1/2");
  // lambda_2: 2*3 + 1/2*(-1/2) + (-1/2)*3 = 6 - 1/4 - 3/2.
  REQUIRE(to_string(p.lambda.at(2)) == "17/4");
  REQUIRE(to_string(p.lambda.at(4)) == "2");
}

TEST_CASE("multiplication is commutative with unit (1, 0)") {
  std::mt19937_64 rng(17);
  DiagOp I = diag_identity("james(lp:2)");
  for (int t = 0; t < 30; ++t) {
    DiagOp a, b;
    a.basis = b.basis = "james(lp:2)";
    a.lambda = random_rational_coeffs(rng, 8, 5);
    b.lambda = random_rational_coeffs(rng, 8, 5);
    a.a0 = Scalar::rat(parse_rat("1/3"));
    b.a0 = Scalar(2);
    DiagOp ab = diag_multiply(a, b);
    DiagOp ba = diag_multiply(b, a);
    REQUIRE(scmp(ab.a0, ba.a0) == 0);
    for (int i : ab.lambda.support()) REQUIRE(scmp(ab.lambda.at(i), ba.lambda.at(i)) == 0);
    DiagOp aI = diag_multiply(a, I);
    REQUIRE(scmp(aI.a0, a.a0) == 0);
    for (int i : a.lambda.support()) REQUIRE(scmp(aI.lambda.at(i), a.lambda.at(i)) == 0);
  }
  DiagOp other = diag_identity("lp:1");
  REQUIRE_THROWS_AS(diag_multiply(I, other), ParseError);
}

TEST_CASE("multiplication composes with application") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    DiagOp a, b;
    a.a0 = Scalar::rat(parse_rat("1/2"));
    b.a0 = Scalar(-1);
    a.lambda = random_rational_coeffs(rng, 8, 5);
    b.lambda = random_rational_coeffs(rng, 8, 5);
    Coeffs x = random_rational_coeffs(rng, 8, 6);
    Coeffs lhs = diag_apply(diag_multiply(a, b), x);
    Coeffs rhs = diag_apply(a, diag_apply(b, x));
    for (int i = 1; i <= 8; ++i) REQUIRE(scmp(lhs.at(i), rhs.at(i)) == 0);
  }
}

TEST_CASE("compactness defect: pinned examples") {
  // Constant lambda: the windowed differences vanish.
  DiagOp c = op_from("0", {}, "lp:2");
  for (int i = 1; i <= 6; ++i) c.lambda.set(i, Scalar::rat(parse_rat("1/3")));
  DefectReport r0 = sp_compact_defect(c, 2, 5);
  REQUIRE(r0.exact);
  REQUIRE(r0.lower.is_zero());
  REQUIRE(r0.upper.is_zero());
  // lambda = e_1 on an unconditional base: the window [1,3] sees a unit jump,
  // windows starting past 1 see nothing.
  DiagOp e1 = op_from("0", {{1, "1"}}, "lp:2");
  DefectReport r1 = sp_compact_defect(e1, 1, 3);
  REQUIRE(r1.exact);
  REQUIRE(to_string(r1.lower) == "1");
  DefectReport r2 = sp_compact_defect(e1, 2, 5);
  REQUIRE(r2.upper.is_zero());
  // Finitely supported lambda: defect vanishes once the window clears it.
  DiagOp fin = op_from("1", {{2, "5"}, {3, "-1"}}, "lp:2");
  REQUIRE(sp_compact_defect(fin, 4, 9).upper.is_zero());
  REQUIRE_THROWS_AS(sp_compact_defect(fin, 3, 2), ParseError);
}

TEST_CASE("compactness defect brackets on a conditional base") {
  // On james(lp:2) only the bracket is guaranteed: lower <= upper.
  DiagOp op = op_from("1", {{1, "1"}, {2, "1/2"}, {4, "-1/3"}});
  DefectReport r = sp_compact_defect(op, 1, 5);
  REQUIRE(le_slack(r.lower, r.upper));
  REQUIRE(scmp(r.lower, Scalar(0)) >= 0);
}

TEST_CASE("ideal membership over closed loci") {
  IdealSpec empty;                       // L = {}: no conditions
  IdealSpec one = ideal_from_text("1");  // a0 + lambda_1 = 0
  IdealSpec full = ideal_from_text("1,2,3,4,5,omega");
  DiagOp I = diag_identity("james(lp:2)");
  REQUIRE(ideal_membership(I, empty));
  REQUIRE(!ideal_membership(I, one));
  // e_1* (x) e_1 = lambda = e_1 with a0 = 0: vanishes at every kappa != 1.
  DiagOp P1 = op_from("0", {{1, "1"}});
  REQUIRE(ideal_membership(P1, empty));
  REQUIRE(!ideal_membership(P1, one));
  REQUIRE(ideal_membership(P1, ideal_from_text("2")));
  // The full locus on a window admits only the zero operator.
  DiagOp zero = op_from("0", {});
  REQUIRE(ideal_membership(zero, full));
  REQUIRE(!ideal_membership(P1, full));
  REQUIRE(!ideal_membership(I, full));
}

TEST_CASE("ideal loci order by reverse inclusion and membership scales") {
  IdealSpec a = ideal_from_text("1,2");
  IdealSpec b = ideal_from_text("1");
  // More conditions cut the ideal down: A_{1,2} sits inside A_{1}, which the
  // helper expresses as "b's conditions are among a's".
  REQUIRE(ideal_spec_subset(b, a));
  REQUIRE(!ideal_spec_subset(a, b));
  DiagOp op = op_from("1", {{1, "-1"}, {2, "-1"}});
  REQUIRE(ideal_membership(op, a));
  DiagOp scaled = op;
  scaled.a0 = op.a0 * Scalar(3);
  scaled.lambda = op.lambda.scaled(Scalar(3));
  REQUIRE(ideal_membership(scaled, a));
  REQUIRE_THROWS_AS(ideal_from_text("0"), ParseError);
  REQUIRE_THROWS_AS(ideal_from_text("x"), ParseError);
}

TEST_CASE("ideal product stays in the ideal") {
  std::mt19937_64 rng(31);
  IdealSpec L = ideal_from_text("2,3,omega");
  for (int t = 0; t < 40; ++t) {
    // Member: a0 = 0 (omega in L), lambda vanishing on {2,3}.
    DiagOp mem;
    mem.a0 = Scalar(0);
    mem.lambda = random_rational_coeffs(rng, 8, 5);
    mem.lambda.set(2, Scalar(0));
    mem.lambda.set(3, Scalar(0));
    DiagOp any;
    any.a0 = Scalar::rat(parse_rat("5/2"));
    any.lambda = random_rational_coeffs(rng, 8, 5);
    REQUIRE(ideal_membership(mem, L));
    REQUIRE(ideal_membership(diag_multiply(any, mem), L));
  }
}

TEST_CASE("operator-vs-dual correspondence on pinned operators") {
  NormOracle l2 = make_lp(2.0);
  // Identity: both readings are the summing functional, norm 1.
  AdtReport rI = check_adt_correspondence(l2, diag_identity("james(lp:2)"), 150);
  REQUIRE(rI.within_factor2);
  REQUIRE(approx_eq(rI.op_lower, Scalar(1)));
  REQUIRE(approx_eq(rI.dual_upper, Scalar(1)));
  // Zero operator: everything is zero.
  DiagOp zero = op_from("0", {});
  AdtReport rz = check_adt_correspondence(l2, zero, 50);
  REQUIRE(rz.op_lower.is_zero());
  REQUIRE(rz.dual_upper.is_zero());
  // Rank-one coordinate projection stays within the factor-2 bracket.
  AdtReport rp = check_adt_correspondence(l2, op_from("0", {{1, "1"}}), 150);
  REQUIRE(rp.within_factor2);
  REQUIRE(le_slack(rp.dual_lower, rp.dual_upper));
}

TEST_CASE("correspondence requires an unconditional reference space") {
  NormOracle cond = make_bv1();
  REQUIRE_THROWS_AS(check_adt_correspondence(cond, diag_identity("james(lp:2)"), 20),
                    ParseError);
}

TEST_CASE("diagonal operator JSON round trip") {
  DiagOp op = op_from("1", {{2, "-1/3"}});
  ordered_json j = diagop_to_json(op);
  DiagOp back = diagop_from_json(j);
  REQUIRE(scmp(back.a0, op.a0) == 0);
  REQUIRE(scmp(back.lambda.at(2), op.lambda.at(2)) == 0);
  REQUIRE(back.basis == op.basis);
  REQUIRE_THROWS_AS(diagop_from_json(json::parse("{\"lambda\":{}}")), ParseError);
  REQUIRE_THROWS_AS(diagop_from_json(json::parse("{\"a0\":\"1\",\"lambda\":{\"0\":\"1\"}}")),
                    ParseError);
}
