#pragma once

// Column-sum norm over an unconditional tower: blockwise vectors
// x = (x_1, x_2, ...) with x_k in the k-th stand-in space, normed by the
// closed form  max( sup_{i0} || sum_{k <= i0} x_k[i0] e_k ||_X ,
//                   max_k (1/A0) ||x_k||_{X_k} ).

#include <map>
#include <set>
#include <vector>

#include "banachforge/oracle.hpp"

namespace banachforge {

struct UtcConfig {
  NormOracle outer;
  Scalar A0 = Scalar(1);
  std::function<NormOracle(int)> inner_for;  // stand-in space for block k
  std::string inner_desc = "linf:16";
};

inline UtcConfig default_utc_config(NormOracle outer, Scalar A0 = Scalar(1)) {
  UtcConfig cfg;
  cfg.outer = std::move(outer);
  cfg.A0 = A0;
  cfg.inner_for = [](int) { return make_linf(16); };
  return cfg;
}

// Blockwise vector: block index -> coefficients in that stand-in space.
struct BlockVec {
  std::map<int, Coeffs> parts;

  bool empty() const {
    for (auto& [k, c] : parts)
      if (!c.empty()) return false;
    return true;
  }

  void set_part(int k, Coeffs c) {
    if (k < 1) throw ParseError("block indices start at 1");
    if (c.empty())
      parts.erase(k);
    else
      parts[k] = std::move(c);
  }
  const Coeffs& part(int k) const {
    static const Coeffs zero;
    auto it = parts.find(k);
    return it == parts.end() ? zero : it->second;
  }
  std::vector<int> blocks() const {
    std::vector<int> r;
    for (auto& [k, c] : parts)
      if (!c.empty()) r.push_back(k);
    return r;
  }
  int min_block() const {
    auto b = blocks();
    return b.empty() ? 0 : b.front();
  }
  int max_block() const {
    auto b = blocks();
    return b.empty() ? 0 : b.back();
  }
  // Largest / smallest coordinate index appearing in any part.
  int max_coord() const {
    int r = 0;
    for (auto& [k, c] : parts)
      if (!c.empty()) r = std::max(r, c.max_support());
    return r;
  }
  int min_coord() const {
    int r = 0;
    for (auto& [k, c] : parts)
      if (!c.empty()) r = (r == 0) ? c.min_support() : std::min(r, c.min_support());
    return r;
  }

  BlockVec scaled(const Scalar& s) const {
    BlockVec r;
    if (s.is_zero()) return r;
    for (auto& [k, c] : parts)
      if (!c.empty()) r.parts[k] = c.scaled(s);
    return r;
  }
  BlockVec plus(const BlockVec& o) const {
    BlockVec r = *this;
    for (auto& [k, c] : o.parts) {
      Coeffs merged = r.part(k).plus(c);
      r.set_part(k, merged);
    }
    return r;
  }
  // Restriction to the block range [lo, hi].
  BlockVec restrict_blocks(int lo, int hi) const {
    BlockVec r;
    for (auto& [k, c] : parts)
      if (k >= lo && k <= hi && !c.empty()) r.parts[k] = c;
    return r;
  }
};

inline BlockVec blockvec_from_json(const json& j, bool float_mode = false) {
  if (!j.is_object()) throw ParseError("block vector must be a JSON object");
  BlockVec v;
  for (auto it = j.begin(); it != j.end(); ++it) {
    int k = 0;
    try {
      k = std::stoi(it.key());
    } catch (...) {
      throw ParseError("block keys must be integers");
    }
    if (k < 1) throw ParseError("block indices start at 1");
    v.set_part(k, coeffs_from_json(it.value(), float_mode));
  }
  return v;
}

inline ordered_json blockvec_to_json(const BlockVec& v) {
  ordered_json j = ordered_json::object();
  for (auto& [k, c] : v.parts)
    if (!c.empty()) j[std::to_string(k)] = coeffs_to_json(c);
  return j;
}

// The closed-form norm. Every column i0 collects the i0-th coordinate of the
// blocks k <= i0 at position k of the outer space; coordinates x_k[i] with
// i < k are invisible to every column and enter only through the inner arm.
// The sup over dual-ball column functionals collapses to the outer norm by
// duality on finitely supported vectors, so no unconditionality is needed.
inline Scalar norm_utc(const UtcConfig& cfg, const BlockVec& x) {
  Scalar best(0);
  std::set<int> columns;
  for (auto& [k, c] : x.parts)
    for (int i : c.support())
      if (i >= k) columns.insert(i);
  for (int i0 : columns) {
    Coeffs col;
    for (auto& [k, c] : x.parts) {
      if (k > i0) break;
      Scalar v = c.at(i0);
      if (!v.is_zero()) col.set(k, v);
    }
    if (col.empty()) continue;
    best = smax(best, cfg.outer(col));
  }
  for (auto& [k, c] : x.parts) {
    if (c.empty()) continue;
    best = smax(best, cfg.inner_for(k)(c) / cfg.A0);
  }
  return best;
}

// Disjoint-support max rule: when every coordinate of y (both its block range
// and all coordinate indices inside its parts) lies strictly below the first
// block of w, columns of y + w split cleanly and ||y + w|| = max(||y||, ||w||)
// holds exactly.
struct MaxRuleReport {
  Scalar lhs, rhs;
  bool pass = false;
};

inline MaxRuleReport check_disjoint_max(const UtcConfig& cfg, const BlockVec& y,
                                        const BlockVec& w) {
  if (y.empty() || w.empty()) throw std::runtime_error("max rule needs nonzero summands");
  if (!(y.max_block() < w.min_block()))
    throw std::runtime_error("block ranges must be successive");
  if (!(y.max_coord() < w.min_block()))
    throw std::runtime_error("coordinate support of the left summand must precede the right block range");
  MaxRuleReport r;
  r.lhs = norm_utc(cfg, y.plus(w));
  r.rhs = smax(norm_utc(cfg, y), norm_utc(cfg, w));
  r.pass = approx_eq(r.lhs, r.rhs);
  return r;
}

// Interval block projection against the bimonotonicity constant:
// ||x|[lo,hi]|| <= A0 ||x||.
inline CheckResult check_block_bimonotone(const UtcConfig& cfg, const BlockVec& x, int lo, int hi) {
  CheckResult r;
  r.lhs = norm_utc(cfg, x.restrict_blocks(lo, hi));
  r.rhs = cfg.A0 * norm_utc(cfg, x);
  r.pass = le_slack(r.lhs, r.rhs);
  return r;
}

}  // namespace banachforge
