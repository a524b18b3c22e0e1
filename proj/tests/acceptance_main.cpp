// Acceptance gate: one line per criterion, nonzero exit if any line fails.
//
// Every criterion is either an oracle comparison (two independent evaluators
// must agree) or a falsification run (random search for a counterexample to a
// pinned bound).  Time budgets are enforced; a slow pass is a failure.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "banachforge/verify.hpp"

using namespace banachforge;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int idx, const std::string& what, bool ok, long trials, long failures, double secs,
            double budget) {
  bool in_budget = secs <= budget;
  if (!ok || !in_budget) ++g_failures;
  std::printf("%s  %2d  %-68s  trials=%-6ld failures=%-3ld %6.2fs (budget %gs)\n",
              (ok && in_budget) ? "PASS" : "FAIL", idx, what.c_str(), trials, failures, secs,
              budget);
  if (ok && !in_budget) std::printf("      %2d  over time budget\n", idx);
  std::fflush(stdout);
}

// Runs a named falsification suite and folds its verdict into one line.
void suite_criterion(int idx, const std::string& what, const std::string& suite, long trials,
                     double budget, unsigned long long seed = 1) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteReport r = run_suite(suite, trials, seed, false);
  report(idx, what, r.pass, r.trials, r.failures, seconds_since(t0), budget);
}

}  // namespace

int main() {
  // 1. Interval-family dynamic programming vs exhaustive enumeration.
  suite_criterion(1, "square-function DP norm equals exhaustive interval enumeration",
                  "jp-dp-vs-bruteforce", 200, 10.0);

  // 2. Memoized admissible recursion vs brute force, including two pinned
  //    closed-form values on the Schreier family at theta = 1/2.
  suite_criterion(2, "admissible recursion equals brute force (pinned values included)",
                  "tsirelson-recursion", 100, 30.0);

  // 3. Ladder truncation: once every weight that can act is present, adding
  //    three more ladder levels does not move the norm.
  {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260814u);
    long failures = 0;
    const long trials = 200;
    for (long t = 0; t < trials; ++t) {
      Coeffs a = detail::nonzero_random(rng, 14, 10);
      size_t jstar = 1;
      {
        MixedParams probe = toy_mixed_params();
        probe.ensure(8);
        int N = static_cast<int>(a.support().size());
        while (probe.m[jstar - 1] < N) ++jstar;
      }
      MixedParams p1 = toy_mixed_params(), p2 = toy_mixed_params();
      if (scmp(norm_mixed(p1, a, 0, jstar), norm_mixed(p2, a, 0, jstar + 3)) != 0) ++failures;
    }
    report(3, "mixed-family norm is stable under ladder-cap extension (+3 levels)",
           failures == 0, trials, failures, seconds_since(t0), 30.0);
  }

  // 4. Weight-constrained exhaustive averages stay under the two pinned
  //    auxiliary bounds on the toy ladder.
  suite_criterion(4, "flat-average weight estimates never exceed the pinned bounds",
                  "aux-estimates", 0, 60.0);

  // 5. Pointwise-product submultiplicativity with constant 2 over the
  //    variation norms of l_1 and an l_2 grid.
  suite_criterion(5, "variation norms are submultiplicative with constant 2", "submult-2", 1000,
                  60.0);

  // 6. Right-dominance with constant C, and constant 5C after doubling.
  suite_criterion(6, "right dominance holds at C and survives doubling at 5C", "dominance-5C",
                  1000, 60.0);

  // 7. Even-coordinate projection bound 1 + 2C on a jamesified l_2 grid.
  suite_criterion(7, "even-part projection norm stays within 1 + 2C", "complemented-1p2C", 500,
                  60.0);

  // 8. Tower sums: single-column vectors carry exactly the outer norm, and
  //    disjointly staggered summands obey the max rule.
  {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport col = run_suite("utc-column", 500, 1, false);
    SuiteReport max = run_suite("c0-maxrule", 200, 1, false);
    report(8, "tower-sum column equality and disjoint max rule are exact", col.pass && max.pass,
           col.trials + max.trials, col.failures + max.failures, seconds_since(t0), 60.0);
  }

  // 9. Finite-stage extension models: stage-extension ratios stay within the
  //    pinned constant, the projection algebra is exact, and every node's
  //    evaluation analysis reproduces its functional (100 nodes x 50 vectors).
  {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport ext = run_suite("C0-extension", 100, 1, false);
    SuiteReport ana = run_suite("eval-analysis", 5000, 1, false);
    report(9, "extension-bound, projection-algebra, and analysis-identity checks",
           ext.pass && ana.pass, ext.trials + ana.trials, ext.failures + ana.failures,
           seconds_since(t0), 120.0);
  }

  // 10. Toy-parameter quantitative estimates: five witness suites with their
  //     lower bounds never exceeding their upper bounds.
  {
    auto t0 = std::chrono::steady_clock::now();
    const char* names[] = {"ris-average", "exact-pair-7C", "dependent-33", "lowerbound-3m2j",
                           "calkin-sandwich"};
    bool ok = true;
    long trials = 0, failures = 0;
    for (const char* n : names) {
      SuiteReport r = run_suite(n, 0, 1, false);
      ok = ok && r.pass;
      trials += r.trials;
      failures += r.failures;
    }
    report(10, "toy-parameter witness suites are internally consistent", ok, trials, failures,
           seconds_since(t0), 300.0);
  }

  // 11. Diagonal-operator ideals: multiplicative closure and the antitone
  //     lattice order, exhaustively over all loci with finite part in {1..5}.
  suite_criterion(11, "diagonal ideals: multiplicative closure and antitone order",
                  "ideal-lattice", 0, 60.0);

  if (g_failures == 0) {
    std::printf("acceptance: all 11 criteria green\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
