#pragma once

// James-type norms and their algebra properties: J_p, jamesification J(X),
// the variation-form norm, dominance and complementation verifiers, and the
// interleaved doubling (X (+) X)_inf.

#include <functional>
#include <vector>

#include "banachforge/intervals.hpp"
#include "banachforge/oracle.hpp"

namespace banachforge {

// J_p norm: sup over families of disjoint intervals of
// (sum_k |sum_{i in E_k} a_i|^p)^(1/p), via an O(n^2) dynamic program over the
// last interval endpoint. Exact for p = 1.
inline Scalar norm_jp(double p, const Coeffs& a) {
  if (p < 1.0) throw ParseError("J_p requires p >= 1");
  if (a.empty()) return Scalar(0);
  int n = a.max_support();
  // prefix[i] = a_1 + ... + a_i
  std::vector<Scalar> prefix(n + 1, Scalar(0));
  for (int i = 1; i <= n; ++i) prefix[i] = prefix[i - 1] + a.at(i);
  // best[i] = max over interval families inside [1,i] of sum |block sum|^p
  std::vector<Scalar> best(n + 1, Scalar(0));
  for (int i = 1; i <= n; ++i) {
    best[i] = best[i - 1];
    for (int j = 1; j <= i; ++j) {
      Scalar cand = best[j - 1] + pow_abs(prefix[i] - prefix[j - 1], p);
      if (scmp(cand, best[i]) > 0) best[i] = cand;
    }
  }
  return root(best[n], p);
}

// Brute-force J_p over the exhaustive interval-family enumeration (oracle).
// Same family tree as visit_interval_families, with the power sum accumulated
// one appended interval at a time so each family costs one term.
inline Scalar norm_jp_brute(double p, const Coeffs& a) {
  if (p < 1.0) throw ParseError("J_p requires p >= 1");
  if (a.empty()) return Scalar(0);
  int n = a.max_support();
  if (n > 14) throw CapError("interval-family enumeration capped at n <= 14");
  std::vector<Scalar> prefix(n + 1, Scalar(0));
  for (int i = 1; i <= n; ++i) prefix[i] = prefix[i - 1] + a.at(i);
  Scalar best(0);
  std::function<void(int, const Scalar&)> rec = [&](int start, const Scalar& acc) {
    if (scmp(acc, best) > 0) best = acc;
    for (int lo = start; lo <= n; ++lo)
      for (int hi = lo; hi <= n; ++hi)
        rec(hi + 1, acc + pow_abs(prefix[hi] - prefix[lo - 1], p));
  };
  rec(1, Scalar(0));
  return root(best, p);
}

// Jamesification J(X): sup over 1 <= k_1 <= m_1 < k_2 <= m_2 < ... of
// || sum_n (sum_{i=k_n}^{m_n} a_i) x_{k_n} ||_X. Exhaustive over interval
// families, with a fast dynamic-programming path when X is an l_p space.
inline Scalar norm_jamesification(const NormOracle& X, const Coeffs& a, bool allow_fast = true) {
  if (!X.unconditional) throw std::runtime_error("jamesification requires an unconditional base");
  if (a.empty()) return Scalar(0);
  if (allow_fast && X.lp_p > 0) return norm_jp(X.lp_p, a);
  int n = a.max_support();
  if (n > 14) throw CapError("jamesification exhaustive path capped at position 14");
  std::vector<Scalar> prefix(n + 1, Scalar(0));
  for (int i = 1; i <= n; ++i) prefix[i] = prefix[i - 1] + a.at(i);
  Scalar best(0);
  visit_interval_families(n, [&](const IntervalFamily& f) {
    Coeffs placed;
    for (const auto& iv : f.intervals)
      placed.set(iv.lo, placed.at(iv.lo) + (prefix[iv.hi] - prefix[iv.lo - 1]));
    Scalar v = X(placed);
    if (scmp(v, best) > 0) best = v;
  });
  return best;
}

// Variation-form norm: sup over 1 <= k_1 < m_1 <= k_2 < m_2 <= ... of
// || sum_n (a_{k_n} - a_{m_n}) x_{k_n} ||_X, read against the zero tail
// (indices range up to max support + 1).
inline Scalar norm_variation(const NormOracle& X, const Coeffs& a) {
  if (!X.unconditional) throw std::runtime_error("variation norm requires an unconditional base");
  if (a.empty()) return Scalar(0);
  int top = a.max_support() + 1;
  if (top > 15) throw CapError("variation exhaustive path capped at position 14");
  Scalar best(0);
  Coeffs placed;
  // Choose pairs left to right: next k >= pos, then m in (k, top].
  std::function<void(int)> rec = [&](int pos) {
    Scalar v = placed.empty() ? Scalar(0) : X(placed);
    if (scmp(v, best) > 0) best = v;
    for (int k = pos; k <= top; ++k)
      for (int m = k + 1; m <= top; ++m) {
        Scalar diff = a.at(k) - a.at(m);
        // A zero difference adds nothing and dropping the pair only loosens
        // the interleaving constraint, so such pairs never matter.
        if (diff.is_zero()) continue;
        Scalar prev = placed.at(k);
        placed.set(k, prev + diff);
        rec(m);
        placed.set(k, prev);
      }
  };
  rec(1);
  return best;
}

// Pointwise-product submultiplicativity of the variation norm:
// ||a.b|| <= 2 ||a|| ||b||.
inline CheckResult check_submultiplicative(const NormOracle& X, const Coeffs& a, const Coeffs& b) {
  CheckResult r;
  r.lhs = norm_variation(X, a.pointwise(b));
  r.rhs = Scalar(2) * norm_variation(X, a) * norm_variation(X, b);
  r.pass = le_slack(r.lhs, r.rhs);
  return r;
}

// Right dominance: || sum a_{m_i} x_{k_i} || <= C || sum a_{m_i} x_{m_i} ||
// for 1 <= k_1 <= m_1 < k_2 <= m_2 < ... In the relaxed variant the
// interleaving is k_1 < m_1 <= k_2 < m_2 <= ... and the caller doubles C.
inline CheckResult check_right_dominant(const NormOracle& X, const std::vector<int>& ks,
                                        const std::vector<int>& ms, const Coeffs& a,
                                        const Scalar& C, bool relaxed = false) {
  if (ks.size() != ms.size()) throw std::runtime_error("index lists must have equal length");
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::runtime_error("indices must be >= 1");
    bool ok = relaxed ? (ks[i] < ms[i]) : (ks[i] <= ms[i]);
    if (i > 0) ok = ok && (relaxed ? ms[i - 1] <= ks[i] : ms[i - 1] < ks[i]);
    if (!ok) throw std::runtime_error("interleaving violated at position " + std::to_string(i + 1));
  }
  Coeffs left, right;
  for (size_t i = 0; i < ks.size(); ++i) {
    Scalar c = a.at(ms[i]);
    left.set(ks[i], left.at(ks[i]) + c);
    right.set(ms[i], right.at(ms[i]) + c);
  }
  CheckResult r;
  r.lhs = left.empty() ? Scalar(0) : X(left);
  r.rhs = C * (right.empty() ? Scalar(0) : X(right));
  r.pass = le_slack(r.lhs, r.rhs);
  return r;
}

// W = (X (+) X)_inf with the interleaved basis w_{2i-1} = (x_i, 0),
// w_{2i} = (0, x_i): || sum a_i w_i || = max(||odd part||_X, ||even part||_X).
inline NormOracle make_double(const NormOracle& X) {
  NormOracle o;
  o.name = "double(" + X.name + ")";
  o.unconditional = X.unconditional;
  o.normalized = X.normalized;
  o.symmetric = false;
  o.bimonotone_constant = X.bimonotone_constant;
  o.eval = [X](const Coeffs& c) {
    Coeffs odd, even;
    for (auto& [i, v] : c.entries) {
      if (i % 2 == 1)
        odd.set((i + 1) / 2, v);
      else
        even.set(i / 2, v);
    }
    Scalar no = odd.empty() ? Scalar(0) : X(odd);
    Scalar ne = even.empty() ? Scalar(0) : X(even);
    return smax(no, ne);
  };
  return o;
}

// Q a = sum e_{2i}*(a) (e_{2i} - e_{2i-1}) measured in J(X) norms; the ratio
// ||Qa|| / ||a|| is checked against 1 + 2C.
struct ProjectionResult {
  Scalar ratio, bound;
  bool pass = false;
};
inline ProjectionResult check_complemented_projection(const NormOracle& X, const Coeffs& a,
                                                      const Scalar& C) {
  Coeffs qa;
  for (auto& [i, v] : a.entries) {
    if (i % 2 == 0) {
      qa.set(i, qa.at(i) + v);
      qa.set(i - 1, qa.at(i - 1) - v);
    }
  }
  ProjectionResult r;
  r.bound = Scalar(1) + Scalar(2) * C;
  Scalar na = norm_jamesification(X, a);
  if (na.is_zero()) {
    r.ratio = Scalar(0);
    r.pass = true;
    return r;
  }
  r.ratio = norm_jamesification(X, qa) / na;
  r.pass = le_slack(r.ratio, r.bound);
  return r;
}

}  // namespace banachforge
