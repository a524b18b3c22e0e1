#pragma once

// Tsirelson-type norms: the implicit recursion over admissible restriction
// families, a brute-force oracle over arbitrary successive subsets, the
// mixed-family norm with its weight ladder, flat-average evaluators, and the
// auxiliary-estimate / subsequential-domination verifiers.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "banachforge/families.hpp"
#include "banachforge/oracle.hpp"

namespace banachforge {

struct TsirelsonSpec {
  FamilySpec family;
  Rat theta = Rat(1, 2);  // must satisfy 0 < theta < 1
};

namespace detail {

struct TsiCtx {
  const TsirelsonSpec* spec;
  const Coeffs* a;
  std::vector<int> supp;  // true coordinates, increasing
  // memo over support-index intervals [si, sj], 0-based
  std::vector<std::vector<std::optional<Scalar>>> memo;

  Scalar value(int si, int sj);
};

inline Scalar TsiCtx::value(int si, int sj) {
  auto& slot = memo[si][sj];
  if (slot) return *slot;
  Scalar base(0);
  for (int t = si; t <= sj; ++t) base = smax(base, sabs(a->at(supp[t])));
  Scalar best = base;
  bool explicit_family = spec->family.kind == FamilySpec::Kind::Explicit;
  // Enumerate families of >= 2 disjoint successive support-index intervals.
  // A single restriction set never attains the sup (theta < 1 and the value
  // is monotone under range restriction), so d = 1 is skipped.
  std::vector<std::pair<int, int>> parts;
  std::vector<FiniteSet> sets;
  std::function<void(int)> rec = [&](int from) {
    if (parts.size() >= 2) {
      bool adm = explicit_family ? is_admissible(spec->family, sets)
                                 : member(spec->family, FiniteSet([&] {
                                     std::vector<int> mins;
                                     for (auto& p : parts) mins.push_back(supp[p.first]);
                                     return mins;
                                   }()));
      if (adm) {
        Scalar s(0);
        for (auto& p : parts) s += value(p.first, p.second);
        s = Scalar::rat(spec->theta) * s;
        if (scmp(s, best) > 0) best = s;
      }
    }
    for (int u = from; u <= sj; ++u) {
      // Prune: for hereditary family kinds, an inadmissible prefix of minima
      // cannot extend to an admissible family.
      if (!explicit_family && !parts.empty()) {
        std::vector<int> mins;
        for (auto& p : parts) mins.push_back(supp[p.first]);
        if (!member(spec->family, FiniteSet(mins))) return;
      }
      for (int v = u; v <= sj; ++v) {
        parts.emplace_back(u, v);
        if (explicit_family) {
          std::vector<int> pts(supp.begin() + u, supp.begin() + v + 1);
          sets.emplace_back(pts);
        }
        rec(v + 1);
        parts.pop_back();
        if (explicit_family) sets.pop_back();
      }
    }
  };
  rec(si);
  slot = best;
  return best;
}

}  // namespace detail

// Tsirelson-type norm ||x|| = max(||x||_inf, theta sup sum_k ||x|E_k||) with
// the sup over admissible families of successive restriction sets. The
// restriction sets are taken as intervals of the support (taking convex hulls
// preserves successiveness and admissibility only improves), with memoisation
// on support-index intervals; admissibility is tested on true coordinates.
inline Scalar norm_tsirelson(const TsirelsonSpec& spec, const Coeffs& a) {
  if (!(spec.theta > 0 && spec.theta < 1)) throw ParseError("theta must lie in (0,1)");
  if (a.empty()) return Scalar(0);
  auto supp = a.support();
  if (supp.size() > 16) throw CapError("tsirelson norm capped at support size 16");
  detail::TsiCtx ctx;
  ctx.spec = &spec;
  ctx.a = &a;
  ctx.supp = supp;
  int n = static_cast<int>(supp.size());
  ctx.memo.assign(n, std::vector<std::optional<Scalar>>(n));
  return ctx.value(0, n - 1);
}

// Brute-force oracle: recursion over arbitrary subsets (not just intervals)
// of the support, with families of successive subsets and exhaustive
// admissibility testing. Deliberately shares no structure with the fast path.
inline Scalar norm_tsirelson_brute(const TsirelsonSpec& spec, const Coeffs& a) {
  if (!(spec.theta > 0 && spec.theta < 1)) throw ParseError("theta must lie in (0,1)");
  if (a.empty()) return Scalar(0);
  auto supp = a.support();
  if (supp.size() > 7) throw CapError("brute tsirelson oracle capped at support size 7");
  int n = static_cast<int>(supp.size());
  std::map<unsigned, Scalar> memo;
  std::function<Scalar(unsigned)> value = [&](unsigned mask) -> Scalar {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    Scalar best(0);
    for (int t = 0; t < n; ++t)
      if (mask & (1u << t)) best = smax(best, sabs(a.at(supp[t])));
    // groups[g] = bitmask of support indices; built left to right so each new
    // element either starts a new group or joins the last one.
    std::vector<unsigned> groups;
    std::function<void(int)> assign = [&](int t) {
      if (t == n) {
        if (groups.size() >= 2) {
          std::vector<FiniteSet> sets;
          for (unsigned g : groups) {
            std::vector<int> pts;
            for (int u = 0; u < n; ++u)
              if (g & (1u << u)) pts.push_back(supp[u]);
            sets.emplace_back(pts);
          }
          if (is_admissible_exhaustive(spec.family, sets)) {
            Scalar s(0);
            for (unsigned g : groups) s += value(g);
            s = Scalar::rat(spec.theta) * s;
            if (scmp(s, best) > 0) best = s;
          }
        }
        return;
      }
      assign(t + 1);  // element skipped
      if (!(mask & (1u << t))) return;
      groups.push_back(1u << t);  // element starts a new group
      assign(t + 1);
      groups.pop_back();
      if (!groups.empty()) {  // element joins the last group (stays successive)
        groups.back() |= 1u << t;
        assign(t + 1);
        groups.back() &= ~(1u << t);
      }
    };
    // The outer call explores assignments of the elements of `mask` only.
    assign(0);
    memo[mask] = best;
    return best;
  };
  unsigned full = (n == 32) ? ~0u : ((1u << n) - 1);
  return value(full);
}

// Parameter ladder for the mixed-family norm W[(A_{l_j}, 1/m_j)] with
// l_j = 3 n_j (or 4 n_j for the auxiliary form). Toy ladders extend by
// doubling; compliant ladders follow the squaring recurrences exactly, with a
// hard bit-size guard.
struct MixedParams {
  std::vector<Int> m, n;
  bool compliant = false;
  bool l_is_4n = false;

  static constexpr size_t kBitGuard = 1u << 20;

  void validate() const {
    if (m.empty() || m.size() != n.size()) throw ParseError("need equal-length m and n ladders");
    for (size_t i = 0; i < m.size(); ++i)
      if (m[i] < 2 || n[i] < 1) throw ParseError("ladder entries out of range");
    for (size_t i = 1; i < m.size(); ++i)
      if (!(m[i] > m[i - 1] && n[i] > n[i - 1])) throw ParseError("ladders must increase");
    if (compliant) {
      if (m[0] < 4) throw ParseError("compliant ladder needs m_1 >= 4");
      if (n[0] < m[0] * m[0]) throw ParseError("compliant ladder needs n_1 >= m_1^2");
      for (size_t i = 1; i < m.size(); ++i) {
        if (m[i] < m[i - 1] * m[i - 1]) throw ParseError("compliant ladder needs m_{j+1} >= m_j^2");
        unsigned long e = log2_exact(m[i]);
        Int rhs;
        mpz_pow_ui(rhs.get_mpz_t(), Int(16 * n[i - 1]).get_mpz_t(), e);
        if (n[i] < rhs) throw ParseError("compliant ladder needs n_{j+1} >= (16 n_j)^log2(m_{j+1})");
      }
    }
  }

  static unsigned long log2_exact(const Int& v) {
    size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
    Int check;
    mpz_ui_pow_ui(check.get_mpz_t(), 2, bits - 1);
    if (check != v) throw CapError("compliant ladder extension requires powers of two");
    return static_cast<unsigned long>(bits - 1);
  }

  void ensure(size_t j) {
    while (m.size() < j) {
      Int nm, nn;
      if (compliant) {
        nm = m.back() * m.back();
        unsigned long e = log2_exact(nm);
        mpz_pow_ui(nn.get_mpz_t(), Int(16 * n.back()).get_mpz_t(), e);
      } else {
        nm = m.back() * 2;
        nn = n.back() * 2;
      }
      if (mpz_sizeinbase(nm.get_mpz_t(), 2) > kBitGuard ||
          mpz_sizeinbase(nn.get_mpz_t(), 2) > kBitGuard)
        throw CapError("parameter ladder exceeded the bit-size guard");
      m.push_back(nm);
      n.push_back(nn);
    }
  }

  Rat theta(size_t j) {
    ensure(j);
    return Rat(1) / Rat(m[j - 1]);
  }
  Int l(size_t j) {
    ensure(j);
    return n[j - 1] * (l_is_4n ? 4 : 3);
  }
};

inline MixedParams toy_mixed_params() {
  MixedParams p;
  p.m = {4, 16};
  p.n = {16, 64};
  return p;
}

namespace detail {

struct MixedCtx {
  MixedParams* params;
  const Coeffs* a;
  std::vector<int> supp;
  size_t jcap = 0;  // 0 = unlimited (ladder-local skip decides)
  std::vector<std::vector<std::optional<Scalar>>> memo;
  std::vector<Scalar> pre_l1;   // prefix of |a| over support order
  std::vector<Scalar> pre_inf;  // not prefixed; computed per range

  Scalar l1(int si, int sj) const { return pre_l1[sj + 1] - pre_l1[si]; }
  Scalar linf(int si, int sj) const {
    Scalar r(0);
    for (int t = si; t <= sj; ++t) r = smax(r, sabs(a->at(supp[t])));
    return r;
  }

  // Best sum of values over at most `cap` disjoint successive support-index
  // intervals inside [si, sj]. With exclude_full set, the single part
  // covering the whole range is excluded: inside the implicit recursion that
  // part can never attain the sup (theta < 1) and skipping it avoids
  // re-entering the memo slot being computed.
  Scalar weight_layer(size_t j, int si, int sj, bool exclude_full) {
    int len = sj - si + 1;
    long cap = len;
    if (params->l(j) < len) cap = static_cast<long>(params->l(j).get_si());
    // h[t][c]: positions si..t used, at most c parts
    std::vector<std::vector<Scalar>> h(len + 1, std::vector<Scalar>(cap + 1, Scalar(0)));
    for (int t = 1; t <= len; ++t)
      for (long c = 1; c <= cap; ++c) {
        Scalar bestv = h[t - 1][c];
        for (int q = 1; q <= t; ++q) {
          if (exclude_full && q == 1 && t == len) continue;
          Scalar cand = h[q - 1][c - 1] + value(si + q - 1, si + t - 1);
          if (scmp(cand, bestv) > 0) bestv = cand;
        }
        h[t][c] = bestv;
      }
    return h[len][cap];
  }

  Scalar value(int si, int sj) {
    auto& slot = memo[si][sj];
    if (slot) return *slot;
    Scalar base = linf(si, sj);
    Scalar best = base;
    Scalar range_l1 = l1(si, sj);
    for (size_t j = 1; jcap == 0 || j <= jcap; ++j) {
      if (j > 64) throw CapError("mixed norm ladder ran away");
      Scalar th = Scalar::rat(params->theta(j));
      // Local skip rule: if theta_j ||x|I||_1 < ||x|I||_inf then every
      // weight-j functional is beaten by a coordinate functional; weights
      // only decrease from here, so stop the ladder.
      if (scmp(th * range_l1, base) < 0) break;
      Scalar cand = th * weight_layer(j, si, sj, /*exclude_full=*/true);
      if (scmp(cand, best) > 0) best = cand;
    }
    slot = best;
    return best;
  }
};

}  // namespace detail

// Mixed-family norm. With weight_filter = h > 0 the outermost functional is
// constrained to weight exactly 1/m_h (type-0 functionals and other top
// weights excluded). ladder_cap = J > 0 truncates the ladder to j <= J at
// every level.
inline Scalar norm_mixed(MixedParams& params, const Coeffs& a, size_t weight_filter = 0,
                         size_t ladder_cap = 0) {
  params.validate();
  if (a.empty()) return Scalar(0);
  auto supp = a.support();
  if (supp.size() > 16) throw CapError("mixed norm capped at support size 16");
  detail::MixedCtx ctx;
  ctx.params = &params;
  ctx.a = &a;
  ctx.supp = supp;
  ctx.jcap = ladder_cap;
  int n = static_cast<int>(supp.size());
  ctx.memo.assign(n, std::vector<std::optional<Scalar>>(n));
  ctx.pre_l1.assign(n + 1, Scalar(0));
  for (int t = 0; t < n; ++t) ctx.pre_l1[t + 1] = ctx.pre_l1[t] + sabs(a.at(supp[t]));
  if (weight_filter == 0) return ctx.value(0, n - 1);
  if (ladder_cap != 0 && weight_filter > ladder_cap)
    throw ParseError("weight filter exceeds ladder cap");
  // Memoize the unfiltered value first so the d = 1 whole-range part of the
  // filtered layer reads a settled slot.
  ctx.value(0, n - 1);
  return Scalar::rat(params.theta(weight_filter)) *
         ctx.weight_layer(weight_filter, 0, n - 1, /*exclude_full=*/false);
}

// Exact evaluator for the flat average (1/N)(e_1 + ... + e_N), exploiting
// translation invariance (admissibility in the mixed family is count-only):
// the value of a restriction depends only on its length. omit_weight > 0
// removes that weight from the ladder at every level.
inline Scalar norm_mixed_flat(MixedParams& params, long N, size_t weight_filter = 0,
                              size_t omit_weight = 0) {
  params.validate();
  if (N < 1) throw ParseError("flat average needs N >= 1");
  if (N > 4096) throw CapError("flat evaluator capped at N = 4096");
  Rat unit = Rat(1) / Rat(static_cast<long>(N));
  std::vector<std::optional<Scalar>> val(N + 1);
  // Weights with m_j <= N can act (theta_j * L/N >= 1/N iff L >= m_j).
  size_t jmax = 0;
  while (true) {
    params.ensure(jmax + 1);
    if (params.m[jmax] > N && (weight_filter == 0 || jmax + 1 > weight_filter)) break;
    ++jmax;
    if (jmax > 64) throw CapError("flat evaluator ladder ran away");
  }
  std::function<Scalar(long, size_t, bool)> layer;  // H_j over length L
  std::function<Scalar(long)> value = [&](long L) -> Scalar {
    if (val[L]) return *val[L];
    Scalar best = Scalar::rat(unit);
    for (size_t j = 1; j <= jmax; ++j) {
      if (j == omit_weight) continue;
      if (params.m[j - 1] > L) continue;  // local skip, exact for flat vectors
      Scalar cand = Scalar::rat(params.theta(j)) * layer(L, j, /*exclude_full=*/true);
      if (scmp(cand, best) > 0) best = cand;
    }
    val[L] = best;
    return best;
  };
  layer = [&](long L, size_t j, bool exclude_full) -> Scalar {
    long cap = L;
    if (params.l(j) < L) cap = static_cast<long>(params.l(j).get_si());
    // g[t][c]: best sum using total length t with at most c parts; the full
    // single part is excluded inside the recursion (it never attains the sup
    // and would re-enter the slot being computed).
    std::vector<std::vector<Scalar>> g(L + 1, std::vector<Scalar>(cap + 1, Scalar(0)));
    for (long t = 1; t <= L; ++t)
      for (long c = 1; c <= cap; ++c) {
        Scalar bestv = g[t - 1][c];
        for (long s = 1; s <= t; ++s) {
          if (exclude_full && s == L) continue;
          Scalar cand = g[t - s][c - 1] + value(s);
          if (scmp(cand, bestv) > 0) bestv = cand;
        }
        g[t][c] = bestv;
      }
    return g[L][cap];
  };
  if (weight_filter == 0) return value(N);
  if (weight_filter == omit_weight) throw ParseError("omitted weight cannot be the filter");
  value(N);
  return Scalar::rat(params.theta(weight_filter)) * layer(N, weight_filter, /*exclude_full=*/false);
}

// Auxiliary estimate for the flat average of length n_{j0} in the
// 4n-admissibility form, weight-constrained at 1/m_h; optionally with weight
// j0 omitted from the ladder. Reports the exhaustively computed value against
// the asserted bound.
struct AuxReport {
  Scalar value, bound;
  bool pass = false;
  bool equality_arm = false;  // arms where the bound is attained exactly
};

inline AuxReport check_aux_estimate(const MixedParams& base, size_t j0, size_t h,
                                    bool omit_j0 = false) {
  MixedParams aux = base;
  aux.l_is_4n = true;
  aux.ensure(std::max(j0, h));
  if (aux.n[j0 - 1] > 64) throw CapError("auxiliary estimate capped at n_{j0} = 64");
  long N = static_cast<long>(aux.n[j0 - 1].get_si());
  AuxReport r;
  if (omit_j0 && h == j0) throw ParseError("omitted weight cannot be the filter");
  r.value = norm_mixed_flat(aux, N, h, omit_j0 ? j0 : 0);
  Rat mh(aux.m[h - 1]), mj0(aux.m[j0 - 1]);
  if (!omit_j0)
    r.bound = Scalar::rat(h < j0 ? Rat(Rat(2) / (mh * mj0)) : Rat(Rat(1) / mh));
  else
    r.bound = Scalar::rat(h < j0 ? Rat(Rat(2) / (mh * mj0 * mj0)) : Rat(Rat(1) / mh));
  r.equality_arm = h >= j0;
  r.pass = le_slack(r.value, r.bound);
  return r;
}

// Subsequential domination: for successive normalized blocks y_i of X with
// k_i = min supp(y_i), check || sum y_i ||_X <= C || sum ||y_i|| t_{k_i} ||_T.
inline CheckResult check_subsequential_domination(const NormOracle& X,
                                                  const std::vector<Coeffs>& blocks,
                                                  const TsirelsonSpec& spec, const Scalar& C) {
  if (blocks.empty()) throw std::runtime_error("need at least one block");
  Coeffs sum;
  Coeffs tvec;
  int prev_max = 0;
  for (const auto& y : blocks) {
    if (y.empty()) throw std::runtime_error("blocks must be nonzero");
    if (y.min_support() <= prev_max) throw std::runtime_error("blocks must be successive");
    prev_max = y.max_support();
    sum = sum.plus(y);
    tvec.set(y.min_support(), X(y));
  }
  CheckResult r;
  r.lhs = X(sum);
  r.rhs = C * norm_tsirelson(spec, tvec);
  r.pass = le_slack(r.lhs, r.rhs);
  return r;
}

}  // namespace banachforge
