#pragma once

// Algebra of diagonal perturbations of the identity over a named basis:
// a0*I + sum_i lambda_i e_i* (x) e_i with finitely many deviations lambda_i.
// Provides composition, the compactness defect of diagonal windows, the
// lattice of ideals cut out by vanishing conditions on the diagonal, and a
// two-sided comparison between the operator norm over a jamesification and
// the dual norm of the matching functional a0*s + sum_i lambda_i e_i*.

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "banachforge/coeffs.hpp"
#include "banachforge/james.hpp"
#include "banachforge/oracle.hpp"
#include "banachforge/scalar.hpp"
#include "banachforge/specparse.hpp"

namespace banachforge {

// The scalar part a0 acts on every coordinate; the finitely supported
// deviations only on theirs. The eventual diagonal entry is a0 itself.
struct DiagOp {
  Scalar a0{0};
  Coeffs lambda;
  std::string basis;  // textual space spec naming the underlying basis
};

inline DiagOp diag_identity(const std::string& basis) {
  DiagOp op;
  op.a0 = Scalar(1);
  op.basis = basis;
  return op;
}

inline Coeffs diag_apply(const DiagOp& op, const Coeffs& x) {
  Coeffs r;
  for (int i : x.support()) {
    Scalar v = (op.a0 + op.lambda.at(i)) * x.at(i);
    if (!v.is_zero()) r.set(i, v);
  }
  return r;
}

// Composition of two diagonal operators over the same basis. Diagonals
// commute, so the product is symmetric in its arguments.
inline DiagOp diag_multiply(const DiagOp& s, const DiagOp& t) {
  if (s.basis != t.basis)
    throw ParseError("cannot compose diagonal operators over different bases: " + s.basis +
                     " vs " + t.basis);
  DiagOp r;
  r.basis = s.basis;
  r.a0 = s.a0 * t.a0;
  std::set<int> supp;
  for (int i : s.lambda.support()) supp.insert(i);
  for (int i : t.lambda.support()) supp.insert(i);
  for (int i : supp) {
    Scalar ls = s.lambda.at(i);
    Scalar lt = t.lambda.at(i);
    Scalar v = s.a0 * lt + t.a0 * ls + ls * lt;
    if (!v.is_zero()) r.lambda.set(i, v);
  }
  return r;
}

// Norm bracket for the windowed defect sum_{i=m}^{n} (lambda_i - lambda_m)
// e_i* (x) e_i, which measures how far the operator is from a multiple of
// the identity on the window. Against a 1-unconditional basis the value is
// exactly max |lambda_i - lambda_m|; against a conditional basis we report a
// witnessed lower bound and a run-compressed interval-projection upper bound.
struct DefectReport {
  Scalar lower{0};
  Scalar upper{0};
  bool exact = false;
};

inline DefectReport sp_compact_defect(const DiagOp& op, int m, int n, int budget = 200) {
  if (m < 1 || m > n) throw ParseError("compactness defect window requires 1 <= m <= n");
  NormOracle base = make_oracle(op.basis);
  Scalar lm = op.lambda.at(m);
  std::vector<Scalar> c(static_cast<size_t>(n - m + 1));
  Scalar peak(0);
  for (int i = m; i <= n; ++i) {
    c[static_cast<size_t>(i - m)] = op.lambda.at(i) - lm;
    peak = smax(peak, sabs(c[static_cast<size_t>(i - m)]));
  }
  DefectReport r;
  if (base.unconditional) {
    // Unit vectors witness max |c_i| from below; averaging over sign flips
    // bounds any diagonal multiplier by max |c_i| from above.
    r.lower = peak;
    r.upper = peak;
    r.exact = true;
    return r;
  }
  // Conditional basis: each maximal constant run c * P_I costs at most
  // |c| times the bimonotone constant.
  Scalar upper(0);
  for (size_t i = 0; i < c.size();) {
    size_t j = i;
    while (j + 1 < c.size() && scmp(c[j + 1], c[i]) == 0) ++j;
    if (!c[i].is_zero()) upper += sabs(c[i]) * base.bimonotone_constant;
    i = j + 1;
  }
  Scalar lower = peak;  // unit vectors already witness every |c_i|
  std::mt19937_64 rng(20240801u);
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  for (int t = 0; t < budget; ++t) {
    Coeffs x;
    for (int i = m; i <= n; ++i) {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      if (q != 0) x.set(i, Scalar::rat(q));
    }
    if (x.empty()) continue;
    Coeffs dx;
    for (int i = m; i <= n; ++i) {
      Scalar v = c[static_cast<size_t>(i - m)] * x.at(i);
      if (!v.is_zero()) dx.set(i, v);
    }
    Scalar nx = base(x);
    if (nx.is_zero()) continue;
    lower = smax(lower, base(dx) / nx);
  }
  r.lower = lower;
  r.upper = upper;
  r.exact = scmp(lower, upper) == 0;
  return r;
}

// Vanishing locus cutting out an ideal of diagonal operators: finitely many
// coordinates where the diagonal entry a0 + lambda_k must vanish, plus
// optionally the point at infinity, where the eventual entry a0 must vanish.
struct IdealSpec {
  std::set<int> finite;
  bool include_omega = false;
};

inline bool ideal_membership(const DiagOp& op, const IdealSpec& L) {
  for (int k : L.finite) {
    if (k < 1) throw ParseError("ideal spec coordinates must be positive");
    if (!(op.a0 + op.lambda.at(k)).is_zero()) return false;
  }
  if (L.include_omega && !op.a0.is_zero()) return false;
  return true;
}

// Containment of the cut-out ideals is antitone in the condition sets:
// more vanishing conditions cut out a smaller ideal.
inline bool ideal_spec_subset(const IdealSpec& a, const IdealSpec& b) {
  for (int k : a.finite)
    if (!b.finite.count(k)) return false;
  return !a.include_omega || b.include_omega;
}

inline IdealSpec ideal_from_text(const std::string& text) {
  IdealSpec L;
  for (const std::string& raw : detail::split_top(text, ',')) {
    std::string tok = detail::strip(raw);
    if (tok.empty()) continue;
    if (tok == "omega" || tok == "w") {
      L.include_omega = true;
      continue;
    }
    size_t pos = 0;
    int k = 0;
    try {
      k = std::stoi(tok, &pos);
    } catch (...) {
      pos = std::string::npos;
    }
    if (pos != tok.size() || k < 1)
      throw ParseError("ideal spec entries must be positive coordinates or \"omega\": " + tok);
    L.finite.insert(k);
  }
  return L;
}

inline ordered_json ideal_to_json(const IdealSpec& L) {
  ordered_json j;
  j["finite"] = ordered_json::array();
  for (int k : L.finite) j["finite"].push_back(k);
  j["omega"] = L.include_omega;
  return j;
}

// Two-sided comparison between the diagonal operator over the
// jamesification J(X) and the functional a0*s + sum_i lambda_i e_i* it
// corresponds to (s the summing functional). The functional norm is
// bracketed by a witness search from below and, from above, by the norming
// set of interval-block functionals: merging the coefficient sequence
// a0 + lambda_i into maximal constant runs writes the functional as
// sum_r c_r (e_{k_r}* + ... + e_{m_r}*) plus its constant tail, and every
// truncation of that form lies in ||sum_r c_r x_{k_r}*||_{X*} times the
// dual ball. The operator norm is witnessed from below on the same
// candidates; since the functional is the summing functional composed with
// the operator, its norm never exceeds the operator norm, and the operator
// norm is at most twice the functional norm.
struct AdtReport {
  Scalar op_lower{0};    // witnessed lower bound for the operator norm
  Scalar dual_lower{0};  // witnessed lower bound for the functional norm
  Scalar dual_upper{0};  // norming-set certificate for the functional norm
  Scalar ratio{0};       // op_lower / dual_upper when defined
  bool dual_upper_exact = false;
  bool within_factor2 = false;
};

inline AdtReport check_adt_correspondence(const NormOracle& X, const DiagOp& op,
                                          int budget = 400) {
  if (!X.unconditional)
    throw ParseError("the diagonal correspondence needs an unconditional inner basis");
  AdtReport r;

  int N = op.lambda.empty() ? 0 : op.lambda.max_support();
  int M = N + 3;  // a few coordinates past the deviations so the summing
                  // part of the functional is visible to the witness search

  // Maximal constant runs of the coefficient sequence; index N+1 carries the
  // tail value a0.
  Coeffs run_heads;
  {
    Scalar prev(0);
    bool have = false;
    for (int i = 1; i <= N + 1; ++i) {
      Scalar g = op.a0 + op.lambda.at(i);
      if (!have || scmp(g, prev) != 0) {
        if (!g.is_zero()) run_heads.set(i, g);
        prev = g;
        have = true;
      }
    }
  }
  if (run_heads.empty()) {
    r.dual_upper = Scalar(0);
    r.dual_upper_exact = true;
  } else if (X.lp_p == 1.0) {
    r.dual_upper = run_heads.linf();
    r.dual_upper_exact = true;
  } else if (X.lp_p > 1.0) {
    r.dual_upper = norm_lq_dual(run_heads, X.lp_p);
    r.dual_upper_exact = true;
  } else if (X.name.rfind("linf", 0) == 0) {
    r.dual_upper = run_heads.l1();
    r.dual_upper_exact = true;
  } else if (X.coord_dual_le_1) {
    // Triangle bound: each x_k* lies in the dual ball of X.
    r.dual_upper = run_heads.l1();
    r.dual_upper_exact = false;
  } else {
    throw ParseError("no dual certificate available for inner space " + X.name);
  }

  auto consider = [&](const Coeffs& v) {
    if (v.empty()) return;
    Scalar nv = norm_jamesification(X, v);
    if (nv.is_zero()) return;
    Scalar fv = op.a0 * v.sum() + op.lambda.dot(v);
    r.dual_lower = smax(r.dual_lower, sabs(fv) / nv);
    r.op_lower = smax(r.op_lower, norm_jamesification(X, diag_apply(op, v)) / nv);
  };
  for (int i = 1; i <= M; ++i) consider(Coeffs::unit(i));
  {
    Coeffs ind;
    for (int i = 1; i <= M; ++i) ind.set(i, Scalar(1));
    consider(ind);
  }
  std::mt19937_64 rng(97531u);
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  for (int t = 0; t < budget; ++t) {
    Coeffs v;
    for (int i = 1; i <= M; ++i) {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      if (q != 0) v.set(i, Scalar::rat(q));
    }
    consider(v);
  }

  if (!r.dual_upper.is_zero()) r.ratio = r.op_lower / r.dual_upper;
  r.within_factor2 = le_slack(r.dual_lower, r.dual_upper) &&
                     le_slack(r.op_lower, Scalar(2) * r.dual_upper);
  return r;
}

inline Scalar scalar_from_json(const json& v, bool force_float = false) {
  Scalar s;
  if (v.is_string())
    s = Scalar::rat(parse_rat(v.get<std::string>()));
  else if (v.is_number_integer())
    s = Scalar(static_cast<long>(v.get<long long>()));
  else if (v.is_number())
    s = Scalar::flt(v.get<double>());
  else
    throw ParseError("scalar entries must be rational strings or numbers");
  if (force_float) s = Scalar::flt(s.d);
  return s;
}

inline ordered_json scalar_to_json(const Scalar& s) {
  return s.exact ? ordered_json(s.q.get_str()) : ordered_json(s.d);
}

inline ordered_json diagop_to_json(const DiagOp& op) {
  ordered_json j;
  j["a0"] = scalar_to_json(op.a0);
  ordered_json lam = ordered_json::object();
  for (auto& [i, v] : op.lambda.entries) lam[std::to_string(i)] = scalar_to_json(v);
  j["lambda"] = lam;
  j["basis"] = op.basis;
  return j;
}

inline DiagOp diagop_from_json(const json& j, bool force_float = false) {
  if (!j.is_object() || !j.contains("a0"))
    throw ParseError("diagonal operator JSON must be an object with an \"a0\" field");
  DiagOp op;
  op.a0 = scalar_from_json(j.at("a0"), force_float);
  op.basis = j.value("basis", std::string("james(lp:2)"));
  if (j.contains("lambda")) {
    const json& lam = j.at("lambda");
    if (!lam.is_object()) throw ParseError("\"lambda\" must map coordinates to scalars");
    for (auto it = lam.begin(); it != lam.end(); ++it) {
      int idx = 0;
      try {
        idx = std::stoi(it.key());
      } catch (...) {
        throw ParseError("bad coordinate index: " + it.key());
      }
      if (idx < 1) throw ParseError("coordinate indices start at 1");
      Scalar s = scalar_from_json(it.value(), force_float);
      if (!s.is_zero()) op.lambda.set(idx, s);
    }
  }
  return op;
}

}  // namespace banachforge
