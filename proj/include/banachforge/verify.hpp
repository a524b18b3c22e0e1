#pragma once

// Named verification suites: each one drives a quantitative claim of the
// library against an independent oracle or an explicit bound, over seeded
// randomized corpora, and returns a deterministic machine-readable report.
// Suites over toy parameter ladders are labeled falsification evidence: a
// failure there refutes the implementation, a pass does not prove the
// full-growth statement.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "banachforge/bd.hpp"
#include "banachforge/coeffs.hpp"
#include "banachforge/diagalg.hpp"
#include "banachforge/james.hpp"
#include "banachforge/oracle.hpp"
#include "banachforge/scalar.hpp"
#include "banachforge/specparse.hpp"
#include "banachforge/tsirelson.hpp"
#include "banachforge/utcsum.hpp"

namespace banachforge {

struct SuiteReport {
  std::string suite;
  std::string anchor;  // what claim the suite exercises
  long trials = 0;
  long failures = 0;
  ordered_json failure_list = ordered_json::array();
  Scalar max_ratio{0};  // largest observed value/bound (or lhs/rhs) quotient
  bool have_ratio = false;
  ordered_json details = ordered_json::object();
  std::string scalar_mode = "exact";
  std::string param_mode = "n/a";  // "toy" | "compliant" | "n/a"
  bool falsification_evidence = false;
  bool pass = true;

  ordered_json to_json() const {
    ordered_json j;
    j["suite"] = suite;
    j["anchor"] = anchor;
    j["trials"] = trials;
    j["failures"] = failures;
    j["failure_list"] = failure_list;
    j["max_ratio"] = have_ratio ? ordered_json(to_string(max_ratio)) : ordered_json(nullptr);
    ordered_json mode;
    mode["scalar"] = scalar_mode;
    mode["params"] = param_mode;
    mode["falsification_evidence"] = falsification_evidence;
    j["mode"] = mode;
    j["details"] = details;
    j["pass"] = pass;
    return j;
  }
};

namespace detail {

inline unsigned long long mix_seed(unsigned long long seed, unsigned long long t) {
  unsigned long long z = seed + 0x9e3779b97f4a7c15ull * (t + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline void track_ratio(SuiteReport& r, const Scalar& num, const Scalar& den) {
  if (den.is_zero()) return;
  Scalar q = num / den;
  if (!r.have_ratio || scmp(q, r.max_ratio) > 0) r.max_ratio = q;
  r.have_ratio = true;
}

inline void record_failure(SuiteReport& r, unsigned long long seed, ordered_json witness) {
  r.failures += 1;
  r.pass = false;
  if (r.failure_list.size() < 20) {
    ordered_json f;
    f["seed"] = seed;
    f["witness"] = std::move(witness);
    r.failure_list.push_back(std::move(f));
  }
}

inline Coeffs nonzero_random(std::mt19937_64& rng, int max_index, int max_support) {
  for (int guard = 0; guard < 64; ++guard) {
    Coeffs c = random_rational_coeffs(rng, max_index, max_support);
    if (!c.empty()) return c;
  }
  Coeffs c;
  c.set(1, Scalar(1));
  return c;
}

}  // namespace detail

// --- J_p norms: segment recursion vs exhaustive interval families ---------
inline SuiteReport suite_jp_dp(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "jp-dp-vs-bruteforce";
  r.anchor = "p-variation norm: segment recursion equals exhaustive enumeration";
  r.scalar_mode = fm ? "float" : "exact";
  const double ps[4] = {1.0, 1.5, 2.0, 3.0};
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    double p = ps[t % 4];
    Coeffs a = detail::nonzero_random(rng, 12, 10);
    if (fm) a = a.to_float();
    Scalar fast = norm_jp(p, a);
    Scalar brute = norm_jp_brute(p, a);
    detail::track_ratio(r, fast, brute);
    bool ok = (p == 1.0 && !fm) ? scmp(fast, brute) == 0 : approx_eq(fast, brute);
    if (!ok) {
      ordered_json w;
      w["p"] = p;
      w["vector"] = coeffs_to_json(a);
      w["fast"] = to_string(fast);
      w["brute"] = to_string(brute);
      detail::record_failure(r, s, std::move(w));
    }
  }
  r.trials = trials;
  return r;
}

// --- Tsirelson norm: memoized interval recursion vs subset brute force ----
inline SuiteReport suite_tsirelson(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "tsirelson-recursion";
  r.anchor = "admissible-family recursion equals subset brute force";
  r.scalar_mode = fm ? "float" : "exact";
  TsirelsonSpec spec = parse_tsirelson_args("schreier,1/2");
  auto run_case = [&](const Coeffs& a, unsigned long long s, const char* label) {
    Scalar fast = norm_tsirelson(spec, a);
    Scalar brute = norm_tsirelson_brute(spec, a);
    detail::track_ratio(r, fast, brute);
    bool ok = fm ? approx_eq(fast, brute) : scmp(fast, brute) == 0;
    if (!ok) {
      ordered_json w;
      w["case"] = label;
      w["vector"] = coeffs_to_json(a);
      w["fast"] = to_string(fast);
      w["brute"] = to_string(brute);
      detail::record_failure(r, s, std::move(w));
    }
    r.trials += 1;
  };
  {
    Coeffs a;
    a.set(2, Scalar(1));
    a.set(3, Scalar(1));
    if (fm) a = a.to_float();
    run_case(a, seed, "pinned e2+e3");
    Scalar v = norm_tsirelson(spec, a);
    if (fm ? !approx_eq(v, Scalar(1)) : scmp(v, Scalar(1)) != 0)
      detail::record_failure(r, seed, ordered_json{{"case", "pinned e2+e3 value"},
                                                   {"got", to_string(v)},
                                                   {"want", "1"}});
  }
  {
    Coeffs a;
    for (int i = 2; i <= 5; ++i) a.set(i, Scalar(1));
    if (fm) a = a.to_float();
    run_case(a, seed + 1, "pinned e2..e5");
    Scalar v = norm_tsirelson(spec, a);
    Scalar want = Scalar::rat(Rat(3, 2));
    if (fm ? !approx_eq(v, want) : scmp(v, want) != 0)
      detail::record_failure(r, seed, ordered_json{{"case", "pinned e2..e5 value"},
                                                   {"got", to_string(v)},
                                                   {"want", "3/2"}});
  }
  for (long t = r.trials; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    Coeffs a = detail::nonzero_random(rng, 9, 7);
    if (fm) a = a.to_float();
    run_case(a, s, "random");
  }
  return r;
}

// --- Pointwise-product submultiplicativity at constant 2 ------------------
inline SuiteReport suite_submult(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "submult-2";
  r.anchor = "variation norm of a pointwise product vs 2 ||a|| ||b||";
  r.scalar_mode = fm ? "float" : "exact";
  NormOracle X1 = make_lp(1.0);
  NormOracle X2 = make_lp(2.0);
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    const NormOracle& X = (t % 2 == 0) ? X1 : X2;
    Coeffs a = detail::nonzero_random(rng, 10, 8);
    Coeffs b = detail::nonzero_random(rng, 10, 8);
    if (fm) {
      a = a.to_float();
      b = b.to_float();
    }
    CheckResult c = check_submultiplicative(X, a, b);
    detail::track_ratio(r, c.lhs, c.rhs);
    if (!c.pass) {
      ordered_json w;
      w["space"] = X.name;
      w["a"] = coeffs_to_json(a);
      w["b"] = coeffs_to_json(b);
      w["lhs"] = to_string(c.lhs);
      w["rhs"] = to_string(c.rhs);
      detail::record_failure(r, s, std::move(w));
    }
  }
  r.trials = trials;
  return r;
}

// --- Right dominance: constant 1 on the base space, 5C after doubling -----
inline SuiteReport suite_dominance(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "dominance-5C";
  r.anchor = "right dominance survives the interleaved double with constant 5C";
  r.scalar_mode = fm ? "float" : "exact";
  NormOracle T = make_oracle("tsirelson(schreier,1/2)");
  NormOracle W = make_double(T);
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    bool doubled = (t % 2 == 1);
    int limit = doubled ? 14 : 13;
    std::uniform_int_distribution<int> step(0, 2);
    std::uniform_int_distribution<int> pairs_d(1, 4);
    int npairs = pairs_d(rng);
    std::vector<int> ks, ms;
    int idx = 1 + step(rng);
    for (int i = 0; i < npairs && idx <= limit; ++i) {
      int k = idx;
      int mval = std::min(limit, k + step(rng));
      ks.push_back(k);
      ms.push_back(mval);
      idx = mval + 1 + step(rng);
    }
    Coeffs a;
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    for (int mv : ms) {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      a.set(mv, Scalar::rat(q));
    }
    if (fm) a = a.to_float();
    const NormOracle& X = doubled ? W : T;
    Scalar C = doubled ? Scalar(5) : Scalar(1);
    CheckResult c = check_right_dominant(X, ks, ms, a, C);
    detail::track_ratio(r, c.lhs, c.rhs);
    if (!c.pass) {
      ordered_json w;
      w["space"] = X.name;
      w["ks"] = ks;
      w["ms"] = ms;
      w["a"] = coeffs_to_json(a);
      w["lhs"] = to_string(c.lhs);
      w["rhs"] = to_string(c.rhs);
      detail::record_failure(r, s, std::move(w));
    }
  }
  r.trials = trials;
  return r;
}

// --- Complemented half-difference projection at 1 + 2C --------------------
inline SuiteReport suite_complemented(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "complemented-1p2C";
  r.anchor = "half-difference projection ratio vs 1 + 2C";
  r.scalar_mode = fm ? "float" : "exact";
  NormOracle X = make_lp(2.0);
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    Coeffs a = detail::nonzero_random(rng, 12, 8);
    if (fm) a = a.to_float();
    ProjectionResult p = check_complemented_projection(X, a, Scalar(1));
    detail::track_ratio(r, p.ratio, p.bound);
    if (!p.pass) {
      ordered_json w;
      w["a"] = coeffs_to_json(a);
      w["ratio"] = to_string(p.ratio);
      w["bound"] = to_string(p.bound);
      detail::record_failure(r, s, std::move(w));
    }
  }
  r.trials = trials;
  return r;
}

// --- Tower sums: column vectors are isometric to the outer space ----------
inline SuiteReport suite_utc_column(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "utc-column";
  r.anchor = "tower-sum column vectors carry exactly the outer norm";
  r.scalar_mode = fm ? "float" : "exact";
  std::vector<NormOracle> outers = {make_oracle("james(lp:2)"), make_oracle("bv1"),
                                    make_oracle("tsirelson(schreier,1/2)")};
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    UtcConfig cfg = default_utc_config(outers[t % 3], Scalar(1));
    Coeffs a = detail::nonzero_random(rng, 10, 8);
    if (fm) a = a.to_float();
    std::uniform_int_distribution<int> col(a.max_support(), 12);
    int i0 = col(rng);
    BlockVec x;
    for (int k : a.support()) {
      Coeffs part;
      part.set(i0, a.at(k));
      x.set_part(k, part);
    }
    Scalar got = norm_utc(cfg, x);
    Scalar want = cfg.outer(a);
    detail::track_ratio(r, got, want);
    bool ok = fm ? approx_eq(got, want) : scmp(got, want) == 0;
    if (!ok) {
      ordered_json w;
      w["outer"] = cfg.outer.name;
      w["column"] = i0;
      w["a"] = coeffs_to_json(a);
      w["got"] = to_string(got);
      w["want"] = to_string(want);
      detail::record_failure(r, s, std::move(w));
    }
  }
  r.trials = trials;
  return r;
}

// --- Tower sums: disjointly supported summands obey the max rule ----------
inline SuiteReport suite_c0_maxrule(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "c0-maxrule";
  r.anchor = "staggered summands: norm of the sum equals the max of the norms";
  r.scalar_mode = fm ? "float" : "exact";
  std::vector<NormOracle> outers = {make_oracle("james(lp:2)"), make_oracle("bv1"),
                                    make_oracle("tsirelson(schreier,1/2)")};
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    UtcConfig cfg = default_utc_config(outers[t % 3], Scalar(1));
    BlockVec y, w;
    std::uniform_int_distribution<int> nparts(1, 3);
    int yparts = nparts(rng);
    for (int k = 1; k <= yparts; ++k) {
      Coeffs c = random_rational_coeffs(rng, 4, 3);
      if (fm) c = c.to_float();
      if (!c.empty()) y.set_part(k, c);
    }
    if (y.empty()) {
      Coeffs c;
      c.set(1, Scalar(1));
      y.set_part(1, fm ? c.to_float() : c);
    }
    int wparts = nparts(rng);
    for (int k = 5; k < 5 + wparts; ++k) {
      Coeffs c = random_rational_coeffs(rng, 12, 3);
      if (fm) c = c.to_float();
      if (!c.empty()) w.set_part(k, c);
    }
    if (w.empty()) {
      Coeffs c;
      c.set(6, Scalar(1));
      w.set_part(5, fm ? c.to_float() : c);
    }
    MaxRuleReport rep = check_disjoint_max(cfg, y, w);
    detail::track_ratio(r, rep.lhs, rep.rhs);
    if (!rep.pass) {
      ordered_json wj;
      wj["outer"] = cfg.outer.name;
      wj["y"] = blockvec_to_json(y);
      wj["w"] = blockvec_to_json(w);
      wj["lhs"] = to_string(rep.lhs);
      wj["rhs"] = to_string(rep.rhs);
      detail::record_failure(r, s, std::move(wj));
    }
  }
  r.trials = trials;
  return r;
}

namespace detail {

// A model populated with random even chains (ages up to 4, mixed zero and
// inner-dual handles) so that extensions and analyses have genuine recursion
// content. Chains are packed from the registration frontier upward until the
// node target or the level cap is reached.
inline BDModel seeded_model(unsigned long long seed, int cap, int target_nodes) {
  BDModel model(toy_bd_params(cap));
  std::mt19937_64 rng(mix_seed(seed, 0xb0d));
  std::uniform_int_distribution<int> age_d(1, 4);
  std::uniform_int_distribution<int> gap_d(1, 2);
  int made = 0, guard = 0;
  while (made < target_nodes && ++guard < 4 * target_nodes + 64) {
    long j = (guard % 2 == 0) ? 1 : 2;
    int age = age_d(rng);
    std::vector<std::pair<int, int>> triples;
    int p = std::max(static_cast<int>(2 * j), model.frontier + gap_d(rng) - 1);
    bool ok = true;
    for (int i = 0; i < age; ++i) {
      if (p + 1 > model.params.cap) {
        ok = false;
        break;
      }
      int h;
      if (i % 2 == 1 && p >= 2) {
        Coeffs c;
        c.set(1, Scalar::rat(Rat(1, 2)));
        h = model.add_K_handle(std::max(1, p - 2), c);
      } else {
        h = model.add_zero_handle();
      }
      triples.push_back({p, h});
      p += gap_d(rng);
    }
    if (!ok || triples.empty()) break;
    try {
      construct_gamma(model, j, triples);
      made += static_cast<int>(triples.size());
    } catch (const ConstructionError&) {
      // skip chains the side conditions reject; enough survive
    }
    if (model.frontier + 2 >= cap) break;
  }
  return model;
}

}  // namespace detail

// --- Extension operators stay below C0; projections form an algebra -------
inline SuiteReport suite_c0_extension(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "C0-extension";
  r.anchor = "stage extension ratio vs the extension constant; P_l P_m = P_min";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  BDModel model = detail::seeded_model(seed, 24, 12);
  Scalar C0 = model.params.C0();
  r.details["C0"] = to_string(C0);
  r.details["registered_nodes"] = model.nodes.size();
  long proj_checks = 0;
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t) + 1);
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<int> stage_d(2, model.params.cap - 1);
    int l = stage_d(rng);
    std::uniform_int_distribution<int> to_d(l + 1, model.params.cap);
    int mstage = to_d(rng);
    YVec u = random_yvec(model, rng, l, 3, 2);
    if (fm) {
      for (auto& [id, v] : u.y) v = Scalar::flt(v.d);
      for (auto& [k, c] : u.x.parts) c = c.to_float();
    }
    Scalar base = norm_Y_upto(model, u, l);
    if (base.is_zero()) continue;
    Scalar extended = norm_Y_upto(model, u, mstage);
    Scalar ratio = extended / base;
    detail::track_ratio(r, ratio, C0);
    if (!le_slack(ratio, C0)) {
      ordered_json w;
      w["stage_from"] = l;
      w["stage_to"] = mstage;
      w["ratio"] = to_string(ratio);
      w["C0"] = to_string(C0);
      detail::record_failure(r, s, std::move(w));
    }
    // Projection algebra on the same draw: truncate-extend at l1 then l2
    // equals truncate-extend at min(l1, l2), coordinatewise.
    if (t % 5 == 0) {
      YVec full = random_yvec(model, rng, model.params.cap, 3, 2);
      int l1 = stage_d(rng), l2 = stage_d(rng);
      YVec two = project(model, project(model, full, std::max(l1, l2)), std::min(l1, l2));
      YVec one = project(model, full, std::min(l1, l2));
      bool eq = true;
      std::set<int> blocks;
      for (auto& [k, c] : two.x.parts) blocks.insert(k);
      for (auto& [k, c] : one.x.parts) blocks.insert(k);
      for (int k : blocks)
        if (!approx_eq(two.x.part(k), one.x.part(k))) eq = false;
      std::set<int> ids;
      for (auto& [id, v] : two.y) ids.insert(id);
      for (auto& [id, v] : one.y) ids.insert(id);
      for (int id : ids) {
        Scalar va = two.y.count(id) ? two.y.at(id) : Scalar(0);
        Scalar vb = one.y.count(id) ? one.y.at(id) : Scalar(0);
        if (!approx_eq(va, vb)) eq = false;
      }
      ++proj_checks;
      if (!eq) {
        ordered_json w;
        w["kind"] = "projection-algebra";
        w["l1"] = l1;
        w["l2"] = l2;
        detail::record_failure(r, s, std::move(w));
      }
    }
  }
  r.details["projection_checks"] = proj_checks;
  r.trials = trials;
  return r;
}

// --- Evaluation analysis reconstructs the coordinate functional -----------
inline SuiteReport suite_eval_analysis(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "eval-analysis";
  r.anchor = "coordinate functional equals its analysis expansion";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  long nodes_target = std::max(4L, std::min(100L, trials / 5));
  long vectors = std::max(2L, std::min(50L, trials / nodes_target));
  BDModel model = detail::seeded_model(seed, static_cast<int>(3 * nodes_target + 20),
                                       static_cast<int>(nodes_target));
  std::vector<int> gammas;
  for (const auto& g : model.nodes)
    if (g.kind != NodeKind::Base) gammas.push_back(g.id);
  r.details["nodes_checked"] = gammas.size();
  r.details["vectors_per_node"] = vectors;
  Scalar worst(0);
  long done = 0;
  for (long v = 0; v < vectors; ++v) {
    unsigned long long s = detail::mix_seed(seed, 0x1000 + static_cast<unsigned long long>(v));
    std::mt19937_64 vr(s);
    YVec u = random_yvec(model, vr, model.params.cap, 4, 3);
    if (fm) {
      for (auto& [id, val] : u.y) val = Scalar::flt(val.d);
      for (auto& [k, c] : u.x.parts) c = c.to_float();
    }
    ExtCtx ctx(model, u);
    for (int gid : gammas) {
      EvalAnalysis an = evaluation_analysis(model, gid);
      Scalar lhs = ctx.e(gid);
      Scalar rhs = analysis_rhs(model, ctx, an);
      Scalar diff = sabs(lhs - rhs);
      worst = smax(worst, diff);
      ++done;
      if (!le_slack(diff, Scalar::flt(1e-10))) {
        ordered_json w;
        w["gamma"] = gid;
        w["lhs"] = to_string(lhs);
        w["rhs"] = to_string(rhs);
        detail::record_failure(r, s, std::move(w));
      }
    }
  }
  r.details["worst_abs_gap"] = to_string(worst);
  detail::track_ratio(r, worst, Scalar::flt(1e-10));
  r.trials = done;
  return r;
}

// --- Weight-constrained flat averages against their closed-form bounds ----
inline SuiteReport suite_aux_estimates(long trials, unsigned long long seed, bool fm) {
  (void)trials;
  (void)seed;
  SuiteReport r;
  r.suite = "aux-estimates";
  r.anchor = "weight-filtered flat averages vs 2/(m_h m_j0) and 1/m_h";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  MixedParams toy = toy_mixed_params();
  ordered_json arms = ordered_json::array();
  long done = 0;
  auto run_arm = [&](size_t j0, size_t h, bool omit) {
    AuxReport a = check_aux_estimate(toy, j0, h, omit);
    ordered_json arm;
    arm["j0"] = j0;
    arm["h"] = h;
    arm["omit_j0"] = omit;
    arm["value"] = to_string(a.value);
    arm["bound"] = to_string(a.bound);
    arm["equality_arm"] = a.equality_arm;
    arm["pass"] = a.pass;
    arms.push_back(arm);
    detail::track_ratio(r, a.value, a.bound);
    ++done;
    if (!a.pass)
      detail::record_failure(
          r, seed,
          ordered_json{
              {"j0", j0}, {"h", h}, {"omit", omit}, {"value", to_string(a.value)},
              {"bound", to_string(a.bound)}});
  };
  for (size_t h = 1; h <= 3; ++h) run_arm(1, h, false);
  run_arm(1, 2, true);
  run_arm(1, 3, true);
  r.details["arms"] = arms;
  // The crossed arm h < j0 needs the compliant growth regime; on the toy
  // ladder it is expected to overshoot, so it is recorded for transparency
  // but excluded from the pass/fail verdict.
  {
    AuxReport ex = check_aux_estimate(toy, 2, 1, false);
    ordered_json note;
    note["j0"] = 2;
    note["h"] = 1;
    note["value"] = to_string(ex.value);
    note["bound"] = to_string(ex.bound);
    note["holds_on_toy_ladder"] = ex.pass;
    note["counted"] = false;
    r.details["excluded_crossed_arm"] = note;
  }
  r.trials = done;
  return r;
}

// --- Averages of rapidly increasing sequences -----------------------------
inline SuiteReport suite_ris_average(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "ris-average";
  r.anchor = "average of a rapidly increasing sequence vs A0 C0 C (3/n_j + 4/m_j)";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    BDModel model(toy_bd_params(64));
    std::uniform_int_distribution<int> num(1, 2);
    std::uniform_int_distribution<int> sgn(0, 1);
    std::vector<YVec> ris;
    std::vector<long> js;
    Scalar C(0);
    for (int k = 1; k <= 16; ++k) {
      Rat q(num(rng) * (sgn(rng) ? 1 : -1), 1);
      Scalar coeff = fm ? Scalar::flt(Rat(q).get_d()) : Scalar::rat(q);
      ris.push_back(make_column(model, 3 * k, 3 * k, coeff));
      js.push_back(3 * k);
      C = smax(C, sabs(coeff));
    }
    RisReport rep = check_ris(model, ris, js, C);
    if (!rep.pass) {
      ordered_json w;
      w["kind"] = "ris-clauses";
      w["failures"] = rep.failures;
      detail::record_failure(r, s, std::move(w));
    }
    BoundReport avg = ris_average_bound(model, ris, 1);
    detail::track_ratio(r, avg.value, avg.bound);
    if (!avg.pass) {
      ordered_json w;
      w["kind"] = "average-bound";
      w["value"] = to_string(avg.value);
      w["bound"] = to_string(avg.bound);
      detail::record_failure(r, s, std::move(w));
    }
    // Other-norming arm on alternate trials: averages against an inner
    // stream weight obey 11 A0 C0 C / m-tilde.
    if (t % 2 == 1) {
      BDModel m4(toy_bd_params(110));
      std::vector<YVec> zs4;
      for (int k = 1; k <= 32; ++k) zs4.push_back(make_column(m4, 3 * k, 3 * k, Scalar(1)));
      BoundReport on = other_norming_bound(m4, zs4, 2);
      detail::track_ratio(r, on.value, on.bound);
      if (!on.pass) {
        ordered_json w;
        w["kind"] = "other-norming";
        w["value"] = to_string(on.value);
        w["bound"] = to_string(on.bound);
        detail::record_failure(r, s, std::move(w));
      }
    }
  }
  r.trials = trials;
  return r;
}

// --- Exact pairs at the constant the construction actually yields ---------
inline SuiteReport suite_exact_pair(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "exact-pair-7C";
  r.anchor = "constructed exact pairs satisfy every clause at 7 A0 C0 C";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    BDModel model(toy_bd_params(140));
    // Uniform scaling keeps every clause relation homogeneous; vary it per
    // trial to exercise the constants away from the unit normalization.
    const Rat scales[3] = {Rat(1), Rat(1, 2), Rat(2)};
    Scalar coeff = Scalar::rat(scales[t % 3]);
    if (fm) coeff = Scalar::flt(coeff.d);
    std::vector<YVec> zs;
    std::vector<int> bs;
    for (int k = 1; k <= 64; ++k) {
      zs.push_back(make_column(model, 2 * k + 1, 2 * k + 1, coeff));
      bs.push_back(model.add_zero_handle());
    }
    BuiltExactPair pair = build_exact_pair(model, zs, 1, bs);
    detail::track_ratio(r, pair.report.norm_z, pair.norm_bound_5);
    if (!pair.report.pass || !pair.norm_within_5) {
      ordered_json w;
      w["norm_z"] = to_string(pair.report.norm_z);
      w["checked_constant"] = to_string(pair.checked_constant);
      w["norm_bound_5"] = to_string(pair.norm_bound_5);
      w["failures"] = pair.report.failures;
      detail::record_failure(r, s, std::move(w));
    }
    if (t == 0) {
      r.details["checked_constant"] = to_string(pair.checked_constant);
      r.details["norm_z"] = to_string(pair.report.norm_z);
    }
  }
  r.trials = trials;
  return r;
}

// --- Dependent sequences and the same-weight dispersion clauses -----------
inline SuiteReport suite_dependent(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "dependent-33";
  r.anchor = "dependent-sequence average vs 33 A0 C0 C / m^2 and dispersion 3C";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    BDModel model(toy_bd_params(150));
    BuiltDependent dep = build_dependent(model, 1);
    DependentReport rep = check_dependent(model, dep.zs, dep.comps, Scalar(1), 1, Scalar(0));
    detail::track_ratio(r, rep.avg_value, rep.avg_bound);
    detail::track_ratio(r, rep.die_max, rep.die_bound);
    if (!rep.pass || !rep.avg_pass) {
      ordered_json w;
      w["die_max"] = to_string(rep.die_max);
      w["die_bound"] = to_string(rep.die_bound);
      w["avg_value"] = to_string(rep.avg_value);
      w["avg_bound"] = to_string(rep.avg_bound);
      w["failures"] = rep.failures;
      detail::record_failure(r, s, std::move(w));
    }
    if (t == 0) {
      r.details["terms"] = dep.zs.size();
      r.details["avg_value"] = to_string(rep.avg_value);
      r.details["avg_bound"] = to_string(rep.avg_bound);
    }
  }
  r.trials = trials;
  return r;
}

// --- Lower-bound witness chains --------------------------------------------
inline SuiteReport suite_lowerbound(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "lowerbound-3m2j";
  r.anchor = "witness chain values vs (1/(3 m_2j)) sum of block norms";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<int> num(1, 3);
    BDModel model(toy_bd_params(200));
    std::vector<YVec> ws;
    for (int d = 1; d <= 64; ++d) {
      Scalar coeff = Scalar(num(rng));
      if (fm) coeff = Scalar::flt(coeff.d);
      ws.push_back(make_column(model, 3 * d - 1, 3 * d - 1, coeff));
    }
    LowerBoundReport lb = lower_bound_witness(model, ws, 1);
    detail::track_ratio(r, lb.bound, lb.value);  // bound <= value, so quotient <= 1
    if (!lb.pass) {
      ordered_json w;
      w["value"] = to_string(lb.value);
      w["bound"] = to_string(lb.bound);
      detail::record_failure(r, s, std::move(w));
    }
    if (t == 0) {
      r.details["value"] = to_string(lb.value);
      r.details["bound"] = to_string(lb.bound);
    }
  }
  r.trials = trials;
  return r;
}

// --- Two-sided distance sandwich for diagonal perturbations ----------------
inline SuiteReport suite_calkin(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "calkin-sandwich";
  r.anchor = "witness lower estimate stays below the surrogate upper estimate";
  r.scalar_mode = fm ? "float" : "exact";
  r.param_mode = "toy";
  r.falsification_evidence = true;
  BDModel model(toy_bd_params(20));
  for (long t = 0; t < trials; ++t) {
    unsigned long long s = detail::mix_seed(seed, static_cast<unsigned long long>(t));
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> kpick(1, 5);
    auto draw = [&]() {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      return fm ? Scalar::flt(Rat(q).get_d()) : Scalar::rat(q);
    };
    std::vector<Scalar> a = {draw(), draw()};
    Coeffs b;
    Rat q(1, den(rng));
    b.set(kpick(rng), fm ? Scalar::flt(Rat(q).get_d()) : Scalar::rat(q));
    CalkinReport ck = calkin_witness(model, a, 5, b);
    detail::track_ratio(r, ck.lower, ck.upper.is_zero() ? Scalar(1) : ck.upper);
    if (!ck.consistent) {
      ordered_json w;
      w["a0"] = to_string(a[0]);
      w["a1"] = to_string(a[1]);
      w["b"] = coeffs_to_json(b);
      w["lower"] = to_string(ck.lower);
      w["upper"] = to_string(ck.upper);
      detail::record_failure(r, s, std::move(w));
    }
    if (t == 0) r.details["theorem_constant"] = to_string(ck.theorem_constant);
  }
  r.trials = trials;
  return r;
}

// --- The lattice of diagonal ideals ----------------------------------------
inline SuiteReport suite_ideal_lattice(long trials, unsigned long long seed, bool fm) {
  SuiteReport r;
  r.suite = "ideal-lattice";
  r.anchor = "vanishing-locus ideals: multiplicative closure and antitone order";
  r.scalar_mode = fm ? "float" : "exact";
  const std::string basis = "james(lp:2)";
  // All loci with finite part inside {1..5}, with and without the point at
  // infinity.
  std::vector<IdealSpec> specs;
  for (int mask = 0; mask < 32; ++mask)
    for (int om = 0; om < 2; ++om) {
      IdealSpec L;
      for (int k = 1; k <= 5; ++k)
        if (mask & (1 << (k - 1))) L.finite.insert(k);
      L.include_omega = om == 1;
      specs.push_back(L);
    }
  std::mt19937_64 rng(detail::mix_seed(seed, 0x1de));
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> idx(1, 8);
  auto draw_scalar = [&]() {
    Rat q(num(rng), den(rng));
    q.canonicalize();
    return fm ? Scalar::flt(Rat(q).get_d()) : Scalar::rat(q);
  };
  // A canonical or randomized member of the ideal cut out by L.
  auto member_of = [&](const IdealSpec& L, bool randomize) {
    DiagOp op;
    op.basis = basis;
    op.a0 = L.include_omega ? Scalar(0) : (randomize ? draw_scalar() : Scalar(1));
    for (int k : L.finite) op.lambda.set(k, Scalar(0) - op.a0);
    if (randomize)
      for (int extra = 0; extra < 2; ++extra) {
        int i = idx(rng);
        if (!L.finite.count(i)) op.lambda.set(i, draw_scalar());
      }
    return op;
  };
  auto arbitrary_op = [&]() {
    DiagOp op;
    op.basis = basis;
    op.a0 = draw_scalar();
    for (int extra = 0; extra < 3; ++extra) op.lambda.set(idx(rng), draw_scalar());
    return op;
  };
  long done = 0;
  // Antitone order, exhaustively over ordered pairs of loci.
  for (const IdealSpec& L : specs)
    for (const IdealSpec& Lp : specs) {
      bool expected = ideal_spec_subset(Lp, L);  // A_L subset of A_L' iff L' subset of L
      bool ok = true;
      ordered_json why;
      if (expected) {
        for (int rep = 0; rep < 2; ++rep) {
          DiagOp op = member_of(L, rep == 1);
          if (!ideal_membership(op, L) || !ideal_membership(op, Lp)) {
            ok = false;
            why = diagop_to_json(op);
            break;
          }
        }
      } else {
        // Exhibit a separating operator: annihilate L but not L'.
        DiagOp op;
        op.basis = basis;
        if (L.include_omega) {
          op.a0 = Scalar(0);
          for (int k : Lp.finite)
            if (!L.finite.count(k)) {
              op.lambda.set(k, Scalar(1));
              break;
            }
          if (op.lambda.empty()) op.a0 = Scalar(0);  // separation must come from omega: impossible
        } else {
          op.a0 = Scalar(1);
          for (int k : L.finite) op.lambda.set(k, Scalar(-1));
        }
        if (!ideal_membership(op, L) || ideal_membership(op, Lp)) {
          ok = false;
          why = diagop_to_json(op);
        }
      }
      ++done;
      if (!ok) {
        ordered_json w;
        w["kind"] = "antitone";
        w["L"] = ideal_to_json(L);
        w["Lprime"] = ideal_to_json(Lp);
        w["op"] = why;
        detail::record_failure(r, seed, std::move(w));
      }
    }
  // Multiplicative closure and compatibility identities, randomized per locus.
  long rounds = std::max(1L, trials / static_cast<long>(specs.size()));
  for (const IdealSpec& L : specs)
    for (long rep = 0; rep < rounds; ++rep) {
      DiagOp op = member_of(L, true);
      DiagOp S = arbitrary_op();
      DiagOp prod = diag_multiply(S, op);
      ++done;
      if (!ideal_membership(op, L) || !ideal_membership(prod, L)) {
        ordered_json w;
        w["kind"] = "closure";
        w["L"] = ideal_to_json(L);
        w["op"] = diagop_to_json(op);
        w["S"] = diagop_to_json(S);
        detail::record_failure(r, seed, std::move(w));
        continue;
      }
      // apply respects multiply, exactly.
      Coeffs x;
      for (int e = 0; e < 3; ++e) x.set(idx(rng), draw_scalar());
      Coeffs lhs = diag_apply(prod, x);
      Coeffs rhs = diag_apply(S, diag_apply(op, x));
      if (!approx_eq(lhs, rhs)) {
        ordered_json w;
        w["kind"] = "apply-multiply";
        w["op"] = diagop_to_json(op);
        w["S"] = diagop_to_json(S);
        detail::record_failure(r, seed, std::move(w));
      }
      // Membership is a zero-set condition: invariant under positive scaling.
      DiagOp scaled;
      scaled.basis = op.basis;
      Scalar c = Scalar(1 + static_cast<long>(rep % 3));
      scaled.a0 = c * op.a0;
      for (auto& [i, v] : op.lambda.entries) scaled.lambda.set(i, c * v);
      if (ideal_membership(scaled, L) != ideal_membership(op, L)) {
        ordered_json w;
        w["kind"] = "scaling";
        w["L"] = ideal_to_json(L);
        w["op"] = diagop_to_json(op);
        detail::record_failure(r, seed, std::move(w));
      }
    }
  r.details["loci"] = specs.size();
  r.trials = done;
  return r;
}

// ---------------------------------------------------------------------------

inline std::vector<std::string> suite_names() {
  return {"jp-dp-vs-bruteforce", "tsirelson-recursion", "submult-2",    "dominance-5C",
          "complemented-1p2C",   "utc-column",          "c0-maxrule",   "C0-extension",
          "eval-analysis",       "aux-estimates",       "ris-average",  "exact-pair-7C",
          "dependent-33",        "lowerbound-3m2j",     "calkin-sandwich", "ideal-lattice"};
}

// Default trial counts sized so the full battery runs at desk scale.
inline long default_trials(const std::string& name) {
  if (name == "jp-dp-vs-bruteforce") return 200;
  if (name == "tsirelson-recursion") return 100;
  if (name == "submult-2") return 1000;
  if (name == "dominance-5C") return 1000;
  if (name == "complemented-1p2C") return 500;
  if (name == "utc-column") return 500;
  if (name == "c0-maxrule") return 200;
  if (name == "C0-extension") return 100;
  if (name == "eval-analysis") return 500;
  if (name == "aux-estimates") return 5;
  if (name == "ris-average") return 6;
  if (name == "exact-pair-7C") return 2;
  if (name == "dependent-33") return 1;
  if (name == "lowerbound-3m2j") return 3;
  if (name == "calkin-sandwich") return 10;
  if (name == "ideal-lattice") return 128;
  throw ParseError("unknown suite: " + name);
}

inline SuiteReport run_suite(const std::string& name, long trials, unsigned long long seed,
                             bool float_mode) {
  if (trials <= 0) trials = default_trials(name);
  if (name == "jp-dp-vs-bruteforce") return suite_jp_dp(trials, seed, float_mode);
  if (name == "tsirelson-recursion") return suite_tsirelson(trials, seed, float_mode);
  if (name == "submult-2") return suite_submult(trials, seed, float_mode);
  if (name == "dominance-5C") return suite_dominance(trials, seed, float_mode);
  if (name == "complemented-1p2C") return suite_complemented(trials, seed, float_mode);
  if (name == "utc-column") return suite_utc_column(trials, seed, float_mode);
  if (name == "c0-maxrule") return suite_c0_maxrule(trials, seed, float_mode);
  if (name == "C0-extension") return suite_c0_extension(trials, seed, float_mode);
  if (name == "eval-analysis") return suite_eval_analysis(trials, seed, float_mode);
  if (name == "aux-estimates") return suite_aux_estimates(trials, seed, float_mode);
  if (name == "ris-average") return suite_ris_average(trials, seed, float_mode);
  if (name == "exact-pair-7C") return suite_exact_pair(trials, seed, float_mode);
  if (name == "dependent-33") return suite_dependent(trials, seed, float_mode);
  if (name == "lowerbound-3m2j") return suite_lowerbound(trials, seed, float_mode);
  if (name == "calkin-sandwich") return suite_calkin(trials, seed, float_mode);
  if (name == "ideal-lattice") return suite_ideal_lattice(trials, seed, float_mode);
  throw ParseError("unknown suite: " + name);
}

}  // namespace banachforge
