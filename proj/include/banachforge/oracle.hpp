#pragma once

// The norm-oracle abstraction: a named norm on Coeffs with basis metadata,
// plus built-in base spaces (l_p, truncated l_inf, l_1-difference bv_1,
// c-with-summing-basis) and the randomized dual-witness lower-bound search.

#include <functional>
#include <memory>
#include <random>
#include <string>

#include "banachforge/coeffs.hpp"

namespace banachforge {

struct NormOracle {
  std::string name;
  std::function<Scalar(const Coeffs&)> eval;
  Scalar bimonotone_constant = Scalar(1);  // A_0: interval projections are bounded by A_0
  bool unconditional = true;               // invariant under sign flips
  bool normalized = true;                  // ||e_i|| = 1
  bool symmetric = false;                  // invariant under permutations (l_p family)
  bool coord_dual_le_1 = false;            // every coordinate functional has dual norm <= 1
  double lp_p = 0;                         // > 0 marks an l_p space (enables fast paths)
  int dim_cap = 0;                         // 0 = unbounded; >0 = finite-dimensional stand-in

  Scalar operator()(const Coeffs& c) const {
    if (dim_cap > 0 && c.max_support() > dim_cap)
      throw CapError("vector exceeds the " + std::to_string(dim_cap) + "-dimensional stand-in " + name);
    return eval(c);
  }
};

struct CheckResult {
  Scalar lhs, rhs;
  bool pass = false;
};

// l_p for p in [1, inf]; exact for p = 1; l_inf exact.
inline NormOracle make_lp(double p, int dim_cap = 0) {
  if (p < 1.0) throw ParseError("l_p requires p >= 1");
  NormOracle o;
  o.unconditional = true;
  o.normalized = true;
  o.symmetric = true;
  o.coord_dual_le_1 = true;
  o.lp_p = p;
  o.dim_cap = dim_cap;
  if (p == 1.0) {
    o.name = "lp:1";
    o.eval = [](const Coeffs& c) { return c.l1(); };
  } else {
    o.name = "lp:" + format_double(p);
    o.eval = [p](const Coeffs& c) {
      Scalar s(0);
      for (auto& [i, v] : c.entries) s += pow_abs(v, p);
      return root(s, p);
    };
  }
  return o;
}

inline NormOracle make_linf(int dim_cap = 0) {
  NormOracle o;
  o.name = dim_cap > 0 ? "linf:" + std::to_string(dim_cap) : "linf";
  o.unconditional = true;
  o.normalized = true;
  o.symmetric = true;
  o.coord_dual_le_1 = true;
  o.dim_cap = dim_cap;
  o.eval = [](const Coeffs& c) { return c.linf(); };
  return o;
}

// bv_1: ||a|| = sum_{i>=1} |a_i - a_{i+1}| with the zero tail (the final term
// is |a_N|). Conditional basis; interval projections are 2-bounded.
inline NormOracle make_bv1() {
  NormOracle o;
  o.name = "bv1";
  o.unconditional = false;
  o.normalized = true;
  // |a_k| = |sum_{i>=k} (a_i - a_{i+1})| <= ||a||, so coordinate functionals
  // are 1-bounded even though interval projections are only 2-bounded.
  o.coord_dual_le_1 = true;
  o.bimonotone_constant = Scalar(2);
  o.eval = [](const Coeffs& c) {
    Scalar s(0);
    if (c.empty()) return s;
    int n = c.max_support();
    for (int i = 1; i <= n; ++i) s += sabs(c.at(i) - c.at(i + 1));
    return s;
  };
  return o;
}

// c with the summing basis: ||a|| = max_k |sum_{i>=k} a_i|. Conditional;
// interval projections are 2-bounded.
inline NormOracle make_summing_c() {
  NormOracle o;
  o.name = "summing-c";
  o.unconditional = false;
  o.normalized = true;
  o.bimonotone_constant = Scalar(2);
  o.eval = [](const Coeffs& c) {
    Scalar best(0);
    Scalar tail(0);
    if (c.empty()) return best;
    for (int i = c.max_support(); i >= 1; --i) {
      tail += c.at(i);
      best = smax(best, sabs(tail));
    }
    return best;
  };
  return o;
}

// Exact l_q dual norm of a coefficient vector against l_p (q = p/(p-1)).
inline Scalar norm_lq_dual(const Coeffs& c, double p) {
  if (p <= 1.0) return c.linf();
  double q = p / (p - 1.0);
  Scalar s(0);
  for (auto& [i, v] : c.entries) s += pow_abs(v, q);
  return root(s, q);
}

// Certified lower bound for the dual norm ||f||* = sup{f(x)/||x||} by a
// seeded randomized ascent over sign patterns and small rational candidates.
// The result is always a true lower bound; never an upper bound.
inline Scalar norm_lower_search(const NormOracle& oracle, const Coeffs& functional, int budget,
                                unsigned long seed) {
  Scalar best(0);
  if (functional.empty()) return best;
  std::mt19937_64 rng(seed);
  auto consider = [&](const Coeffs& x) {
    if (x.empty()) return;
    Scalar nx = oracle(x);
    if (nx.is_zero()) throw std::runtime_error("oracle defect: zero norm on a nonzero candidate");
    Scalar val = sabs(functional.dot(x)) / nx;
    if (scmp(val, best) > 0) best = val;
  };

  std::vector<int> supp = functional.support();
  // Coordinate candidates.
  for (int i : supp) consider(Coeffs::unit(i));
  // Sign-matched indicator of the support.
  {
    Coeffs x;
    for (int i : supp) x.set(i, scmp(functional.at(i), Scalar(0)) >= 0 ? Scalar(1) : Scalar(-1));
    consider(x);
  }
  // Randomized candidates plus local coordinate tweaks around the incumbent.
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<size_t> pick(0, supp.empty() ? 0 : supp.size() - 1);
  Coeffs incumbent;
  for (int i : supp) incumbent.set(i, scmp(functional.at(i), Scalar(0)) >= 0 ? Scalar(1) : Scalar(-1));
  for (int t = 0; t < budget; ++t) {
    Coeffs x;
    if (t % 3 == 0) {
      x = incumbent;
      int i = supp[pick(rng)];
      Rat q(num(rng), den(rng));
      q.canonicalize();
      x.set(i, Scalar::rat(q));
    } else {
      for (int i : supp) {
        Rat q(num(rng), den(rng));
        q.canonicalize();
        x.set(i, Scalar::rat(q));
      }
    }
    if (x.empty()) continue;
    Scalar nx = oracle(x);
    if (nx.is_zero()) throw std::runtime_error("oracle defect: zero norm on a nonzero candidate");
    Scalar val = sabs(functional.dot(x)) / nx;
    if (scmp(val, best) > 0) {
      best = val;
      incumbent = x;
    }
  }
  return best;
}

}  // namespace banachforge
