#pragma once

// Finite-stage Bourgain-Delbaen-type model over a utc tower: node sets with
// ranked recursive functionals c_gamma*, d_gamma*, e_gamma*, extension and
// projection operators, evaluation analyses, constructive node building, and
// the quantitative sequence verifiers (RIS averages, exact pairs, dependent
// sequences, lower-bound witnesses, Calkin-style sandwiches).

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "banachforge/specparse.hpp"
#include "banachforge/utcsum.hpp"

namespace banachforge {

struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& w) : std::runtime_error(w) {}
};
struct PoolError : std::runtime_error {
  explicit PoolError(const std::string& w) : std::runtime_error(w) {}
};

// ---------------------------------------------------------------------------
// Parameters

// The weight ladders are stored as the fundamental ("tilde") streams; the
// outer stream used for node weights sits at the odd tilde positions. Toy
// tilde ladders double; compliant ones follow the squaring recurrences.
struct BDParams {
  // Tilde streams are extended on demand, so they are cached mutably and the
  // accessors stay const.
  mutable std::vector<Int> mt{4, 8}, nt{16, 32};  // 1-based positions
  bool compliant = false;
  int cap = 64;  // level cap N
  Scalar A0 = Scalar(1);
  UtcConfig utc;

  static constexpr size_t kBitGuard = 1u << 20;

  void ensure_tilde(size_t pos) const {
    while (mt.size() < pos) {
      Int nm, nn;
      if (compliant) {
        nm = mt.back() * mt.back();
        unsigned long e = MixedParams::log2_exact(nm);
        mpz_pow_ui(nn.get_mpz_t(), Int(16 * nt.back()).get_mpz_t(), e);
      } else {
        nm = mt.back() * 2;
        nn = nt.back() * 2;
      }
      if (mpz_sizeinbase(nm.get_mpz_t(), 2) > kBitGuard ||
          mpz_sizeinbase(nn.get_mpz_t(), 2) > kBitGuard)
        throw CapError("weight ladder exceeded the bit-size guard");
      mt.push_back(nm);
      nt.push_back(nn);
    }
  }
  Int mt_at(long pos) const {
    if (pos < 1) throw ParseError("ladder positions start at 1");
    ensure_tilde(static_cast<size_t>(pos));
    return mt[pos - 1];
  }
  Int nt_at(long pos) const {
    if (pos < 1) throw ParseError("ladder positions start at 1");
    ensure_tilde(static_cast<size_t>(pos));
    return nt[pos - 1];
  }
  // Outer ladder: m_j = mt at position 2j-1 (the outer stream occupies the
  // odd tilde positions; its complement is co-infinite).
  Int m_of(long j) const { return mt_at(2 * j - 1); }
  Int n_of(long j) const { return nt_at(2 * j - 1); }
  Rat weight_of(long j) const { return Rat(1) / Rat(m_of(j)); }

  Rat beta0() const {
    if (!A0.exact) throw ParseError("A0 must be exact to form the extension constant");
    return Rat(1) / Rat(m_of(1));
  }
  Scalar C0() const {
    Rat b = beta0();
    Rat denom = 1 - b * A0.q;
    if (denom <= 0) throw ParseError("need beta_0 < 1/A0");
    return Scalar::rat(1 + 2 * b * A0.q / denom);
  }
  void validate() const {
    if (mt.empty() || mt.size() != nt.size()) throw ParseError("need equal tilde ladders");
    for (size_t i = 1; i < mt.size(); ++i)
      if (!(mt[i] > mt[i - 1] && nt[i] > nt[i - 1])) throw ParseError("ladders must increase");
    if (cap < 1 || cap > 512) throw ParseError("level cap out of range [1, 512]");
    if (compliant) {
      MixedParams chk;
      chk.compliant = true;
      chk.m.assign(1, m_of(1));
      chk.n.assign(1, n_of(1));
      chk.validate();  // m_1 >= 4, n_1 >= m_1^2
    }
    C0();  // validates beta_0 A0 < 1 and exactness of A0
  }
};

inline BDParams toy_bd_params(int cap = 64) {
  BDParams p;
  p.cap = cap;
  p.utc = default_utc_config(make_oracle("james(lp:2)"), Scalar(1));
  // Columns reach coordinates up to the level cap, so the stand-in spaces
  // must be unbounded here.
  p.utc.inner_for = [](int) { return make_linf(0); };
  p.utc.inner_desc = "linf";
  return p;
}

// ---------------------------------------------------------------------------
// Nodes and functional handles

enum class NodeKind { Base, Even0, Odd0, Even1, Odd1 };
enum class Pool { Zero, K, Gutc, B };

inline std::string kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Base: return "Base";
    case NodeKind::Even0: return "Even0";
    case NodeKind::Odd0: return "Odd0";
    case NodeKind::Even1: return "Even1";
    case NodeKind::Odd1: return "Odd1";
  }
  return "?";
}
inline std::string pool_name(Pool p) {
  switch (p) {
    case Pool::Zero: return "Zero";
    case Pool::K: return "K";
    case Pool::Gutc: return "Gutc";
    case Pool::B: return "B";
  }
  return "?";
}

struct GammaNode {
  int id = 0;
  int rank = 1;
  NodeKind kind = NodeKind::Base;
  long windex = 0;  // weight = 1/m_windex; 0 for Base
  long age = 0;
  long sigma = 0;
  int xi = -1;
  int eta = -1;
  int handle = -1;
};

struct FunctionalHandle {
  int id = 0;
  Pool pool = Pool::Zero;
  int stage = 0;  // the handle lies in the pool A_stage (and all later ones)
  int block = 0;  // K: the tower block it acts on
  int i0 = 0;     // Gutc: the column index
  Coeffs payload;                          // K / Gutc coefficients
  std::vector<std::pair<int, Rat>> bterms;  // B: (node id, rational coefficient)
};

struct YVec {
  int stage = 0;
  BlockVec x;
  std::map<int, Scalar> y;  // node id -> coordinate, ranks <= stage
};

// ---------------------------------------------------------------------------
// Model

struct BDModel {
  BDParams params;
  std::vector<GammaNode> nodes;
  std::vector<FunctionalHandle> handles;
  std::vector<std::vector<int>> by_rank;  // rank -> node ids
  long sigma_next = 1;
  int frontier = 1;  // registration must not go below the highest used rank

  explicit BDModel(BDParams p) : params(std::move(p)) {
    params.validate();
    by_rank.assign(params.cap + 1, {});
    GammaNode base;
    base.id = 0;
    base.rank = 1;
    base.kind = NodeKind::Base;
    base.sigma = 0;
    nodes.push_back(base);
    by_rank[1].push_back(0);
  }

  const GammaNode& node(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes.size()))
      throw ConstructionError("unknown node id " + std::to_string(id));
    return nodes[id];
  }
  const FunctionalHandle& handle(int id) const {
    if (id < 0 || id >= static_cast<int>(handles.size()))
      throw ConstructionError("unknown handle id " + std::to_string(id));
    return handles[id];
  }

  long gamma_count_at(int rank) const {
    long c = 0;
    for (int r = 1; r <= rank && r <= params.cap; ++r) c += static_cast<long>(by_rank[r].size());
    return c;
  }
  // N_{n+1} = 2^n * #Gamma_n over the realized node set.
  Int pool_bound_N(int n) const {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(n));
    return r * gamma_count_at(n);
  }

  // ---- handle registration ----------------------------------------------

  int add_zero_handle() {
    FunctionalHandle h;
    h.id = static_cast<int>(handles.size());
    h.pool = Pool::Zero;
    h.stage = 0;
    handles.push_back(h);
    return h.id;
  }

  // K pool: (1/A0) * sum_i c_i t*_{k,i} with the inner dual norm of c at most
  // 1. Certification needs an inner space whose dual ball is computable.
  int add_K_handle(int block, const Coeffs& c) {
    if (block < 1 || block > params.cap) throw PoolError("K handle block out of range");
    NormOracle inner = params.utc.inner_for(block);
    if (inner.dim_cap > 0 && c.max_support() > inner.dim_cap)
      throw PoolError("K handle coefficients exceed the stand-in dimension");
    Scalar dual;
    if (inner.lp_p == 1.0)
      dual = c.linf();
    else if (inner.lp_p > 1.0)
      dual = norm_lq_dual(c, inner.lp_p);
    else if (inner.name.rfind("linf", 0) == 0)
      dual = c.l1();
    else
      throw PoolError("cannot certify a dual-ball witness for inner space " + inner.name);
    if (!le_slack(dual, Scalar(1))) throw PoolError("K handle is outside the scaled dual ball");
    FunctionalHandle h;
    h.id = static_cast<int>(handles.size());
    h.pool = Pool::K;
    h.stage = block;
    h.block = block;
    h.payload = c;
    handles.push_back(h);
    return h.id;
  }

  // Gutc pool: column functional sum_{k<=i0} a_k t*_{k,i0} with
  // ||sum a_k e_k*||_{X*} <= 1.
  int add_gutc_handle(int i0, const Coeffs& a) {
    if (i0 < 1 || i0 > params.cap) throw PoolError("Gutc column index out of range");
    if (a.max_support() > i0) throw PoolError("Gutc coefficients must sit at blocks <= the column index");
    const NormOracle& X = params.utc.outer;
    bool ok = false;
    if (X.lp_p == 1.0)
      ok = le_slack(a.linf(), Scalar(1));
    else if (X.lp_p > 1.0)
      ok = le_slack(norm_lq_dual(a, X.lp_p), Scalar(1));
    else if (X.name.rfind("linf", 0) == 0)
      ok = le_slack(a.l1(), Scalar(1));
    else if (a.entries.size() == 1 && X.coord_dual_le_1)
      ok = le_slack(sabs(a.entries.begin()->second), Scalar(1));
    if (!ok) throw PoolError("cannot certify the column functional against the outer dual ball");
    FunctionalHandle h;
    h.id = static_cast<int>(handles.size());
    h.pool = Pool::Gutc;
    h.stage = i0;
    h.i0 = i0;
    h.payload = a;
    handles.push_back(h);
    return h.id;
  }

  // B pool: rational combinations sum q_eta e_eta* with sum |q| <= 1 and all
  // denominators dividing N_{n+1}! for the handle's stage n.
  int add_B_handle(const std::vector<std::pair<int, Rat>>& terms) {
    Rat total = 0;
    int min_stage = 1;
    Int denom_lcm = 1;
    for (auto& [id, q] : terms) {
      const GammaNode& g = node(id);
      min_stage = std::max(min_stage, g.rank);
      total += abs(q);
      Int den = q.get_den();
      mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), den.get_mpz_t());
    }
    if (total > 1) throw PoolError("B handle exceeds the unit l1 bound");
    int stage = min_stage;
    while (!denominator_divides_pool_factorial(denom_lcm, stage)) {
      if (++stage > params.cap)
        throw PoolError("B handle denominators exceed every realizable pool factorial");
    }
    FunctionalHandle h;
    h.id = static_cast<int>(handles.size());
    h.pool = Pool::B;
    h.stage = stage;
    h.bterms = terms;
    handles.push_back(h);
    return h.id;
  }

  // d | N_{n+1}! checked via Legendre's formula on each prime factor of d;
  // N_{n+1} is the realized pool bound, which only grows as nodes register,
  // and factorial divisibility is monotone in N, so the check is stable.
  bool denominator_divides_pool_factorial(const Int& d, int n) const {
    if (d == 1) return true;
    Int N = pool_bound_N(n);
    auto legendre_ge = [&N](const Int& p, unsigned long vp) {
      Int acc = 0, power = p;  // v_p(N!) = sum_k floor(N/p^k)
      while (power <= N) {
        acc += N / power;
        if (acc >= static_cast<long>(vp)) return true;
        power *= p;
      }
      return acc >= static_cast<long>(vp);
    };
    Int rest = d;
    for (Int p = 2; p <= 1000000 && p * p <= rest; p += 1) {
      if (!mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) continue;
      unsigned long vp = 0;
      do {
        rest /= p;
        ++vp;
      } while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t()));
      if (!legendre_ge(p, vp)) return false;
    }
    if (rest > 1) {
      // The leftover cofactor is prime unless it has two factors above the
      // trial-division cap; refuse to certify in that case.
      if (rest > Int(1000000) * Int(1000000))
        throw CapError("B handle denominator too large to certify");
      if (!legendre_ge(rest, 1)) return false;
    }
    return true;
  }

  // ---- node registration --------------------------------------------------

  int check_rank(int rank) {
    if (rank < 2 || rank > params.cap)
      throw ConstructionError("node rank must lie in [2, cap]");
    if (rank < frontier)
      throw ConstructionError("registration must be rank-monotone (frontier at rank " +
                              std::to_string(frontier) + ")");
    return rank;
  }

  int push_node(GammaNode g) {
    g.id = static_cast<int>(nodes.size());
    g.sigma = sigma_next++;
    nodes.push_back(g);
    by_rank[g.rank].push_back(g.id);
    frontier = std::max(frontier, g.rank);
    return g.id;
  }

  int register_even0(int rank, long j, int handle_id) {
    check_rank(rank);
    if (j < 1) throw ConstructionError("weight index must be positive");
    if (2 * j > rank) throw ConstructionError("Even0 requires 2j <= rank");
    const FunctionalHandle& b = handle(handle_id);
    if (b.stage > rank - 1) throw ConstructionError("Even0 handle must lie in the pool at rank-1");
    GammaNode g;
    g.rank = rank;
    g.kind = NodeKind::Even0;
    g.windex = 2 * j;
    g.age = 1;
    g.handle = handle_id;
    return push_node(g);
  }

  int register_odd0(int rank, long j, int eta_id) {
    check_rank(rank);
    if (j < 1) throw ConstructionError("weight index must be positive");
    if (2 * j - 1 > rank) throw ConstructionError("Odd0 requires 2j-1 <= rank");
    const GammaNode& eta = node(eta_id);
    if (eta.rank > rank - 1) throw ConstructionError("Odd0 eta must have rank <= rank-1");
    if (eta.windex <= 0 || eta.windex % 4 != 2)
      throw ConstructionError("Odd0 eta must carry weight 1/m_{4i-2}");
    Int thresh = params.n_of(2 * j - 1);
    if (!(params.m_of(eta.windex) > thresh * thresh))
      throw ConstructionError("Odd0 requires m_{we(eta)} > n_{2j-1}^2");
    GammaNode g;
    g.rank = rank;
    g.kind = NodeKind::Odd0;
    g.windex = 2 * j - 1;
    g.age = 1;
    g.eta = eta_id;
    return push_node(g);
  }

  int register_even1(int rank, int xi_id, int handle_id) {
    check_rank(rank);
    const GammaNode& xi = node(xi_id);
    if (xi.rank > rank - 1) throw ConstructionError("Even1 xi must have rank <= rank-1");
    if (xi.windex <= 0 || xi.windex % 2 != 0)
      throw ConstructionError("Even1 extends even-weight chains only");
    if (!(Int(xi.age) < params.n_of(xi.windex)))
      throw ConstructionError("Even1 age bound ag(xi) < n_{2j} violated");
    const FunctionalHandle& b = handle(handle_id);
    if (b.stage > rank - 1) throw ConstructionError("Even1 handle must lie in the pool at rank-1");
    GammaNode g;
    g.rank = rank;
    g.kind = NodeKind::Even1;
    g.windex = xi.windex;
    g.age = xi.age + 1;
    g.xi = xi_id;
    g.handle = handle_id;
    return push_node(g);
  }

  int register_odd1(int rank, int xi_id, int eta_id) {
    check_rank(rank);
    const GammaNode& xi = node(xi_id);
    const GammaNode& eta = node(eta_id);
    if (xi.windex <= 0 || xi.windex % 2 != 1)
      throw ConstructionError("Odd1 extends odd-weight chains only");
    if (!(Int(xi.age) < params.n_of(xi.windex)))
      throw ConstructionError("Odd1 age bound ag(xi) < n_{2j-1} violated");
    if (!(xi.rank < eta.rank)) throw ConstructionError("Odd1 requires rank(xi) < rank(eta)");
    if (eta.rank > rank - 1) throw ConstructionError("Odd1 eta must have rank <= rank-1");
    if (eta.windex != 4 * xi.sigma)
      throw ConstructionError("Odd1 requires we(eta) = 1/m_{4 sigma(xi)}");
    GammaNode g;
    g.rank = rank;
    g.kind = NodeKind::Odd1;
    g.windex = xi.windex;
    g.age = xi.age + 1;
    g.xi = xi_id;
    g.eta = eta_id;
    return push_node(g);
  }

  Rat node_weight(const GammaNode& g) const {
    if (g.kind == NodeKind::Base) throw ConstructionError("Base nodes carry no weight");
    return params.weight_of(g.windex);
  }
};

// ---------------------------------------------------------------------------
// Canonical extension engine

// For one top-level vector U (the given YVec read at the model cap) this
// builds, in lockstep by rank, the full family E_p = i_{p,cap}(R_p(U)) for
// p = 0..cap. The identities i_q R_q E_p = E_{min(p,q)} collapse every
// partial-projection evaluation to a row lookup.
struct ExtCtx {
  const BDModel* model;
  const YVec* u;
  int cap;
  std::vector<Scalar> Uy;               // coordinates of U per node id
  std::vector<std::vector<Scalar>> Ey;  // Ey[p][id], p = 0..cap

  ExtCtx(const BDModel& m, const YVec& v) : model(&m), u(&v), cap(m.params.cap) {
    if (v.stage < 0 || v.stage > cap) throw CapError("vector stage exceeds the level cap");
    size_t nn = m.nodes.size();
    Uy.assign(nn, Scalar(0));
    Ey.assign(cap + 1, std::vector<Scalar>(nn, Scalar(0)));
    for (int r = 1; r <= cap; ++r) {
      for (int id : m.by_rank[r]) {
        const GammaNode& g = m.nodes[id];
        // c-coordinate: reads only ranks and blocks <= r-1, so it agrees on
        // the U-view and on every E_p-view with p >= r-1.
        Scalar cval = c_value(g, -1);
        Scalar uval;
        if (r <= v.stage) {
          auto it = v.y.find(id);
          uval = (it == v.y.end()) ? Scalar(0) : it->second;
        } else {
          uval = cval;
        }
        Uy[id] = uval;
        for (int p = 0; p <= cap; ++p) {
          if (p >= r)
            Ey[p][id] = uval;
          else if (p == r - 1)
            Ey[p][id] = cval;
          else
            Ey[p][id] = c_value(g, p);
        }
      }
    }
  }

  Scalar e(int id) const { return Uy.at(id); }
  Scalar c(int id) const { return Ey[model->node(id).rank - 1].at(id); }
  Scalar d(int id) const { return e(id) - c(id); }
  // e_gamma* of the canonical extension of R_p(U).
  Scalar e_at(int id, int p) const { return Ey.at(p).at(id); }

  // b*(U - E_q(U)): the handle applied to the tail window above stage q.
  Scalar handle_window(int handle_id, int q) const {
    return handle_tail(model->handle(handle_id), -1, q);
  }
  // e_eta*(U - E_q(U)).
  Scalar node_window(int eta_id, int q) const { return Uy[eta_id] - Ey[q][eta_id]; }

  std::vector<int> supp_bd() const {
    std::set<int> s;
    for (auto& [k, c] : u->x.parts)
      if (!c.empty()) s.insert(k);
    for (const auto& g : model->nodes) {
      Scalar dv = d(g.id);
      bool nz = dv.exact ? !dv.is_zero() : std::abs(dv.d) > kEqTol * (1.0 + std::abs(Uy[g.id].d));
      if (nz) s.insert(g.rank);
    }
    return std::vector<int>(s.begin(), s.end());
  }

  Scalar norm_y() const {
    Scalar best = norm_utc(model->params.utc, u->x);
    for (const auto& g : model->nodes) best = smax(best, sabs(Uy[g.id]));
    return best;
  }

 private:
  // p = -1: the U-view; p >= 0: the E_p-view.
  Scalar y_read(int id, int p) const { return p < 0 ? Uy[id] : Ey[p][id]; }
  Scalar x_read(int k, int i, int p) const {
    if (p >= 0 && k > p) return Scalar(0);
    return u->x.part(k).at(i);
  }
  // Row index of E_q applied to the view-p vector.
  int eq_row(int p, int q) const { return p < 0 ? q : std::min(p, q); }

  Scalar handle_tail(const FunctionalHandle& h, int p, int q) const {
    switch (h.pool) {
      case Pool::Zero:
        return Scalar(0);
      case Pool::K: {
        if (h.block <= q) return Scalar(0);
        Scalar s(0);
        for (auto& [i, v] : h.payload.entries) s += v * x_read(h.block, i, p);
        return s / model->params.A0;
      }
      case Pool::Gutc: {
        Scalar s(0);
        for (auto& [k, v] : h.payload.entries)
          if (k > q) s += v * x_read(k, h.i0, p);
        return s;
      }
      case Pool::B: {
        Scalar s(0);
        int row = eq_row(p, q);
        for (auto& [id, coef] : h.bterms) s += Scalar::rat(coef) * (y_read(id, p) - Ey[row][id]);
        return s;
      }
    }
    return Scalar(0);
  }

  Scalar c_value(const GammaNode& g, int p) const {
    switch (g.kind) {
      case NodeKind::Base:
        return Scalar(0);
      case NodeKind::Even0: {
        Scalar w = Scalar::rat(model->params.weight_of(g.windex));
        return w * handle_tail(model->handle(g.handle), p, 0);
      }
      case NodeKind::Odd0: {
        Scalar w = Scalar::rat(model->params.weight_of(g.windex));
        return w * y_read(g.eta, p);
      }
      case NodeKind::Even1: {
        const GammaNode& xi = model->node(g.xi);
        Scalar w = Scalar::rat(model->params.weight_of(g.windex));
        return y_read(g.xi, p) + w * handle_tail(model->handle(g.handle), p, xi.rank);
      }
      case NodeKind::Odd1: {
        const GammaNode& xi = model->node(g.xi);
        Scalar w = Scalar::rat(model->params.weight_of(g.windex));
        int row = eq_row(p, xi.rank);
        return y_read(g.xi, p) + w * (y_read(g.eta, p) - Ey[row][g.eta]);
      }
    }
    return Scalar(0);
  }
};

// ---------------------------------------------------------------------------
// Vector-level operations

inline Scalar eval_e(const BDModel& m, int gamma, const YVec& u) { return ExtCtx(m, u).e(gamma); }
inline Scalar eval_c(const BDModel& m, int gamma, const YVec& u) {
  if (m.node(gamma).rank > u.stage + 1)
    throw ConstructionError("c evaluation requires rank <= stage + 1");
  return ExtCtx(m, u).c(gamma);
}
inline Scalar eval_d(const BDModel& m, int gamma, const YVec& u) { return ExtCtx(m, u).d(gamma); }

// Truncation R_l: drop x-blocks and y-ranks above l.
inline YVec truncate(const BDModel& m, const YVec& u, int l) {
  if (l < 0 || l > m.params.cap) throw CapError("truncation stage out of range");
  YVec r;
  r.stage = l;
  r.x = u.x.restrict_blocks(1, l);
  for (auto& [id, v] : u.y)
    if (m.node(id).rank <= l && !v.is_zero()) r.y[id] = v;
  return r;
}

// Extension i_{l,m}: canonical fill of the new ranks.
inline YVec extend(const BDModel& m, const YVec& u, int to_stage) {
  if (to_stage < u.stage) throw CapError("extension target below the vector stage");
  if (to_stage > m.params.cap) throw CapError("extension exceeds the level cap");
  ExtCtx ctx(m, u);
  YVec r;
  r.stage = to_stage;
  r.x = u.x;
  for (const auto& g : m.nodes) {
    if (g.rank > to_stage) continue;
    Scalar v = ctx.e(g.id);
    if (!v.is_zero()) r.y[g.id] = v;
  }
  return r;
}

// Partial projection P_l at the vector's own stage: i_{l,stage} after R_l.
inline YVec project(const BDModel& m, const YVec& u, int l) {
  return extend(m, truncate(m, u, std::min(l, u.stage)), u.stage);
}

inline YVec yvec_add(const YVec& a, const YVec& b, const Scalar& ca, const Scalar& cb) {
  YVec r;
  r.stage = std::max(a.stage, b.stage);
  r.x = a.x.scaled(ca).plus(b.x.scaled(cb));
  std::set<int> ids;
  for (auto& [id, v] : a.y) ids.insert(id);
  for (auto& [id, v] : b.y) ids.insert(id);
  for (int id : ids) {
    Scalar va = a.y.count(id) ? a.y.at(id) : Scalar(0);
    Scalar vb = b.y.count(id) ? b.y.at(id) : Scalar(0);
    Scalar v = ca * va + cb * vb;
    if (!v.is_zero()) r.y[id] = v;
  }
  return r;
}

// Linear combination of canonical embeddings at the cap stage (extensions are
// linear, so summing the extended coordinate rows is exact).
inline YVec combine(const BDModel& m, const std::vector<std::pair<Scalar, const YVec*>>& items) {
  YVec r;
  r.stage = m.params.cap;
  for (auto& [coef, v] : items) {
    ExtCtx ctx(m, *v);
    r.x = r.x.plus(v->x.scaled(coef));
    for (const auto& g : m.nodes) {
      Scalar val = coef * ctx.e(g.id);
      if (val.is_zero()) continue;
      auto it = r.y.find(g.id);
      if (it == r.y.end())
        r.y[g.id] = val;
      else {
        it->second += val;
        if (it->second.is_zero()) r.y.erase(it);
      }
    }
  }
  return r;
}

// Stage-local norm of the literal vector (no extension).
inline Scalar norm_Z(const BDModel& m, const YVec& u) {
  Scalar best = norm_utc(m.params.utc, u.x);
  for (auto& [id, v] : u.y) {
    if (m.node(id).rank > u.stage) throw ConstructionError("y-coordinate above the vector stage");
    best = smax(best, sabs(v));
  }
  return best;
}

// Norm in the inductive limit truncated at the cap: canonical extension, then
// the stage-cap norm. Exact for the finite-stage model; a lower bound for the
// ideal infinite-stage object.
inline Scalar norm_Y(const BDModel& m, const YVec& u) { return ExtCtx(m, u).norm_y(); }

// Stage-limited norm: the canonical extension read only through rank `upto`.
// With upto = u.stage this is the stage norm of u itself, so the quotient
// norm_Y_upto(u, m) / norm_Y_upto(u, u.stage) samples the extension operator
// from stage u.stage into stage m.
inline Scalar norm_Y_upto(const BDModel& m, const YVec& u, int upto) {
  if (upto < 0 || upto > m.params.cap) throw CapError("stage out of range");
  ExtCtx ctx(m, u);
  Scalar best = norm_utc(m.params.utc, u.x);
  for (const auto& g : m.nodes)
    if (g.rank <= upto) best = smax(best, sabs(ctx.e(g.id)));
  return best;
}

// Canonical column vector: the block-k unit column t_{k,i} scaled by coeff.
inline YVec make_column(const BDModel& m, int k, int i, const Scalar& coeff) {
  if (k < 1 || k > m.params.cap) throw CapError("column block out of range");
  if (i < 1) throw ParseError("column coordinate out of range");
  YVec v;
  v.stage = k;
  Coeffs c;
  c.set(i, coeff);
  v.x.set_part(k, c);
  return v;
}

// ---------------------------------------------------------------------------
// Evaluation analysis

struct AnalysisEntry {
  int rank = 0;      // p_i = rank of xi_i
  int node = -1;     // xi_i
  bool b_is_node = false;
  int b = -1;        // handle id (even chains) or eta node id (odd chains)
};

struct EvalAnalysis {
  long windex = 0;
  std::vector<AnalysisEntry> entries;
};

inline EvalAnalysis evaluation_analysis(const BDModel& m, int gamma) {
  const GammaNode* g = &m.node(gamma);
  if (g->kind == NodeKind::Base) throw ConstructionError("Base nodes have no evaluation analysis");
  EvalAnalysis a;
  a.windex = g->windex;
  std::vector<AnalysisEntry> rev;
  while (true) {
    AnalysisEntry e;
    e.rank = g->rank;
    e.node = g->id;
    switch (g->kind) {
      case NodeKind::Even0:
      case NodeKind::Even1:
        e.b_is_node = false;
        e.b = g->handle;
        break;
      case NodeKind::Odd0:
      case NodeKind::Odd1:
        e.b_is_node = true;
        e.b = g->eta;
        break;
      default:
        throw ConstructionError("broken analysis chain");
    }
    rev.push_back(e);
    if (g->age == 1) break;
    if (g->xi < 0) throw ConstructionError("broken analysis chain");
    g = &m.node(g->xi);
    if (g->windex != a.windex) throw ConstructionError("weight changes along the analysis chain");
  }
  a.entries.assign(rev.rbegin(), rev.rend());
  return a;
}

// Right-hand side of the reconstruction identity
//   e_gamma* = sum_i d_{xi_i}* + (1/m_w) sum_i b_i* (projected to the window
//   between consecutive ranks).
inline Scalar analysis_rhs(const BDModel& m, const ExtCtx& ctx, const EvalAnalysis& a) {
  Scalar dsum(0), bsum(0);
  int prev_rank = 0;
  for (const auto& e : a.entries) {
    dsum += ctx.d(e.node);
    if (e.b_is_node)
      bsum += ctx.node_window(e.b, prev_rank);
    else
      bsum += ctx.handle_window(e.b, prev_rank);
    prev_rank = e.rank;
  }
  return dsum + Scalar::rat(m.params.weight_of(a.windex)) * bsum;
}

// Constructive node building: given 0 < p_1 < ... < p_a and handles
// b_i at pools A_{p_i - 1}, registers the even-weight chain whose evaluation
// analysis is (p_i + 1, xi_i, b_i*).
inline int construct_gamma(BDModel& m, long j, const std::vector<std::pair<int, int>>& triples) {
  size_t a = triples.size();
  if (a == 0) throw ConstructionError("construct_gamma needs at least one triple");
  if (!(Int(static_cast<long>(a)) <= m.params.n_of(2 * j)))
    throw ConstructionError("chain length exceeds n_{2j}");
  if (!(2 * j <= triples[0].first)) throw ConstructionError("2j <= p_1 violated");
  int prev = 0;
  for (auto& [p, h] : triples) {
    if (!(p > prev)) throw ConstructionError("ranks p_i must strictly increase");
    if (p + 1 > m.params.cap) throw ConstructionError("p_a exceeds the level cap");
    if (m.handle(h).stage > p - 1)
      throw ConstructionError("handle stage exceeds p_i - 1");
    prev = p;
  }
  int xi = m.register_even0(triples[0].first + 1, j, triples[0].second);
  for (size_t i = 1; i < a; ++i) xi = m.register_even1(triples[i].first + 1, xi, triples[i].second);
  return xi;
}

// ---------------------------------------------------------------------------
// Rapidly increasing sequences

struct RisReport {
  bool pass = true;
  std::vector<std::string> failures;
  Scalar max_norm{0};
};

// (i) ||z_k|| <= C; (ii) weight indices strictly increase and j_{k+1} exceeds
// every block met by z_k; (iii) registered functionals of smaller weight act
// on z_k within C times their weight; (iv) coordinate supports of successive
// terms are staggered below the next node support.
inline RisReport check_ris(const BDModel& m, const std::vector<YVec>& zs,
                           const std::vector<long>& js, const Scalar& C) {
  if (zs.empty() || zs.size() != js.size())
    throw ConstructionError("a RIS needs one weight index per term");
  RisReport r;
  auto fail = [&r](std::string msg) {
    r.pass = false;
    r.failures.push_back(std::move(msg));
  };
  std::vector<ExtCtx> ctxs;
  ctxs.reserve(zs.size());
  for (const auto& z : zs) ctxs.emplace_back(m, z);
  for (size_t k = 0; k < zs.size(); ++k) {
    std::string at = "term " + std::to_string(k + 1);
    Scalar nz = ctxs[k].norm_y();
    r.max_norm = smax(r.max_norm, nz);
    if (!le_slack(nz, C)) fail(at + ": clause (i) norm exceeds C");
    if (js[k] < 1) fail(at + ": weight index must be positive");
    if (k > 0 && !(js[k] > js[k - 1])) fail(at + ": clause (ii) weight indices must increase");
    if (k > 0) {
      auto prev = ctxs[k - 1].supp_bd();
      int ran_max = prev.empty() ? 0 : prev.back();
      if (!(js[k] > ran_max)) fail(at + ": clause (ii) weight index must clear the previous range");
      int cw_max = zs[k - 1].x.max_coord();
      auto cur = ctxs[k].supp_bd();
      int bd_min = cur.empty() ? 0 : cur.front();
      if (!cur.empty() && !(cw_max < bd_min)) fail(at + ": clause (iv) supports must be staggered");
    }
    for (const auto& g : m.nodes) {
      if (g.kind == NodeKind::Base || g.windex >= js[k]) continue;
      Scalar bound = C * Scalar::rat(m.params.weight_of(g.windex));
      if (!le_slack(sabs(ctxs[k].e(g.id)), bound)) {
        fail(at + ": clause (iii) node " + std::to_string(g.id) + " acts beyond C times its weight");
        break;
      }
    }
  }
  return r;
}

struct BoundReport {
  Scalar value{0}, bound{0}, constant{0};
  bool pass = false;
  std::string note;
};

// || (1/n_j) sum z_k || <= A0 C0 C (3/n_j + 4/m_j), with C the largest norm
// among the terms. Quantitative content is only meaningful when the weight
// ladders satisfy the growth regime; toy ladders make this falsification
// evidence rather than a theorem instance.
inline BoundReport ris_average_bound(const BDModel& m, const std::vector<YVec>& zs, long j) {
  if (!(Int(static_cast<long>(zs.size())) == m.params.n_of(j)))
    throw ConstructionError("the average needs exactly n_j terms");
  Scalar C(0);
  std::vector<std::pair<Scalar, const YVec*>> items;
  Rat inv_n = Rat(1) / Rat(m.params.n_of(j));
  for (const auto& z : zs) {
    C = smax(C, norm_Y(m, z));
    items.emplace_back(Scalar::rat(inv_n), &z);
  }
  BoundReport r;
  r.constant = C;
  YVec avg = combine(m, items);
  r.value = norm_Y(m, avg);
  Rat coef = Rat(3) / Rat(m.params.n_of(j)) + Rat(4) / Rat(m.params.m_of(j));
  r.bound = m.params.A0 * m.params.C0() * C * Scalar::rat(coef);
  r.pass = le_slack(r.value, r.bound);
  return r;
}

// The complementary-stream estimate: for a tilde position outside the outer
// stream, || (mt/nt) sum_{k<=nt} z_k || <= 11 A0 C0 C / mt.
inline BoundReport other_norming_bound(const BDModel& m, const std::vector<YVec>& zs,
                                       long tilde_pos) {
  if (tilde_pos % 2 == 1)
    throw ConstructionError("the other-norming index must avoid the outer stream positions");
  Int mt = m.params.mt_at(tilde_pos);
  Int ntl = m.params.nt_at(tilde_pos);
  if (!(Int(static_cast<long>(zs.size())) == ntl))
    throw ConstructionError("the other-norming average needs exactly nt terms");
  Scalar C(0);
  std::vector<std::pair<Scalar, const YVec*>> items;
  Rat coef = Rat(mt) / Rat(ntl);
  for (const auto& z : zs) {
    C = smax(C, norm_Y(m, z));
    items.emplace_back(Scalar::rat(coef), &z);
  }
  BoundReport r;
  r.constant = C;
  YVec avg = combine(m, items);
  r.value = norm_Y(m, avg);
  r.bound = m.params.A0 * m.params.C0() * C * Scalar::rat(Rat(11) / Rat(mt));
  r.pass = le_slack(r.value, r.bound);
  return r;
}

// ---------------------------------------------------------------------------
// Exact pairs

struct ExactPairReport {
  bool pass = false;
  bool clause_d = true, clause_weight = true, clause_norm = true, clause_other = true,
       clause_supp = true;
  Scalar norm_z{0}, e_gamma{0};
  std::vector<std::string> failures;
};

// (z, gamma) is a (C, j, M, eps)-exact pair: (i) |d_xi*(z)| <= C/m_j for all
// registered xi; (ii) we(gamma) = 1/m_j; (iii) ||z|| <= C and e_gamma*(z) =
// eps; (iv) functionals of weight 1/m_i with i != j act within C/m_min(i,j);
// (v) the coordinate support stays below M.
inline ExactPairReport check_exact_pair(const BDModel& m, const YVec& z, int gamma,
                                        const Scalar& C, long j, int M, const Scalar& eps) {
  const GammaNode& g = m.node(gamma);
  ExtCtx ctx(m, z);
  ExactPairReport r;
  auto fail = [&r](bool& clause, std::string msg) {
    clause = false;
    r.failures.push_back(std::move(msg));
  };
  Scalar wj = Scalar::rat(m.params.weight_of(j));
  for (const auto& node : m.nodes) {
    if (!le_slack(sabs(ctx.d(node.id)), C * wj)) {
      fail(r.clause_d, "clause (i): d-coordinate at node " + std::to_string(node.id) +
                           " exceeds C/m_j");
      break;
    }
  }
  if (g.kind == NodeKind::Base || g.windex != j)
    fail(r.clause_weight, "clause (ii): gamma does not carry weight 1/m_j");
  r.norm_z = ctx.norm_y();
  r.e_gamma = ctx.e(gamma);
  if (!le_slack(r.norm_z, C)) fail(r.clause_norm, "clause (iii): ||z|| exceeds C");
  if (!approx_eq(r.e_gamma, eps)) fail(r.clause_norm, "clause (iii): e_gamma*(z) != eps");
  for (const auto& node : m.nodes) {
    if (node.kind == NodeKind::Base || node.windex == j) continue;
    long i = node.windex;
    Scalar bound = C * Scalar::rat(m.params.weight_of(std::min(i, j)));
    if (!le_slack(sabs(ctx.e(node.id)), bound)) {
      fail(r.clause_other, "clause (iv): node " + std::to_string(node.id) +
                               " of weight index " + std::to_string(i) + " acts beyond its bound");
      break;
    }
  }
  if (z.x.max_coord() > M)
    fail(r.clause_supp, "clause (v): coordinate support exceeds M");
  r.pass = r.clause_d && r.clause_weight && r.clause_norm && r.clause_other && r.clause_supp;
  return r;
}

struct BuiltExactPair {
  int gamma = -1;
  YVec z;
  ExactPairReport report;   // checked at the proof constant 7 A0 C0 C
  Scalar checked_constant{0};
  Scalar norm_bound_5{0};   // the construction estimate 5 A0 C0 C
  bool norm_within_5 = false;
};

// Registers the even-weight chain over n_{2j} staggered annihilated summands
// and forms z = (m_{2j}/n_{2j}) sum z_k. The returned report checks the exact
// pair clauses at the constant the construction proof actually yields.
inline BuiltExactPair build_exact_pair(BDModel& m, const std::vector<YVec>& zs, long j,
                                       const std::vector<int>& handle_ids) {
  if (!(Int(static_cast<long>(zs.size())) == m.params.n_of(2 * j)))
    throw ConstructionError("an exact pair averages exactly n_{2j} summands");
  if (handle_ids.size() != zs.size())
    throw ConstructionError("need one annihilating functional per summand");
  std::vector<std::pair<int, int>> triples;
  int q_prev = 0;
  for (size_t k = 0; k < zs.size(); ++k) {
    ExtCtx ctx(m, zs[k]);
    auto supp = ctx.supp_bd();
    if (supp.empty()) throw ConstructionError("summands must have nonempty support");
    if (!(supp.front() > q_prev))
      throw ConstructionError("supports must be staggered strictly between the anchor ranks");
    const FunctionalHandle& h = m.handle(handle_ids[k]);
    if (h.stage > q_prev)
      throw ConstructionError("the annihilating functional must lie in the pool at the previous anchor");
    if (!approx_eq(ctx.handle_window(handle_ids[k], 0), Scalar(0)))
      throw ConstructionError("the functional must annihilate its summand");
    int q = std::max(supp.back() + 1, q_prev + 2);
    if (k == 0) q = std::max(q, static_cast<int>(2 * j + 1));
    triples.emplace_back(q - 1, handle_ids[k]);
    q_prev = q;
  }
  BuiltExactPair out;
  out.gamma = construct_gamma(m, j, triples);
  Rat coef = Rat(m.params.m_of(2 * j)) / Rat(m.params.n_of(2 * j));
  std::vector<std::pair<Scalar, const YVec*>> items;
  int M = 0;
  Scalar C(0);
  for (const auto& z : zs) {
    items.emplace_back(Scalar::rat(coef), &z);
    M = std::max(M, z.x.max_coord());
    C = smax(C, norm_Y(m, z));
  }
  out.z = combine(m, items);
  Scalar a0c0 = m.params.A0 * m.params.C0();
  out.checked_constant = Scalar(7) * a0c0 * C;
  out.report = check_exact_pair(m, out.z, out.gamma, out.checked_constant, 2 * j, M, Scalar(0));
  out.norm_bound_5 = Scalar(5) * a0c0 * C;
  out.norm_within_5 = le_slack(out.report.norm_z, out.norm_bound_5);
  return out;
}

// ---------------------------------------------------------------------------
// Dependent sequences

struct DependentComponent {
  int p = 0;    // anchor rank of xi_k
  int eta = -1;
  int xi = -1;
};

struct DependentReport {
  bool pass = true;
  std::vector<std::string> failures;
  Scalar die_max{0};        // largest |e_zeta*(sum over a subinterval)|
  Scalar die_bound{0};      // 3C
  Scalar avg_value{0}, avg_bound{0};
  bool avg_pass = true;     // only meaningful when eps = 0
};

// (C, 2j0-1, eps)-dependent: each (z_k, eta_k) is an exact pair against its
// window anchor, gamma = xi_n carries weight 1/m_{2j0-1} with analysis
// (p_k, e_{eta_k}*, xi_k), and the ranges are confined to the windows. Also
// verifies the same-weight dispersion bound 3C over all subinterval sums and,
// for eps = 0, the average bound 33 A0 C0 C / m_{2j0-1}^2.
inline DependentReport check_dependent(const BDModel& m, const std::vector<YVec>& zs,
                                       const std::vector<DependentComponent>& comps,
                                       const Scalar& C, long j0, const Scalar& eps) {
  if (zs.empty() || zs.size() != comps.size())
    throw ConstructionError("a dependent sequence pairs each term with its components");
  if (!(Int(static_cast<long>(zs.size())) == m.params.n_of(2 * j0 - 1)))
    throw ConstructionError("a dependent sequence has exactly n_{2j0-1} terms");
  DependentReport r;
  auto fail = [&r](std::string msg) {
    r.pass = false;
    r.failures.push_back(std::move(msg));
  };
  int gamma = comps.back().xi;
  const GammaNode& g = m.node(gamma);
  if (g.windex != 2 * j0 - 1) fail("gamma must carry weight 1/m_{2j0-1}");
  EvalAnalysis an = evaluation_analysis(m, gamma);
  if (an.entries.size() != comps.size()) {
    fail("the evaluation analysis length does not match the sequence");
  } else {
    for (size_t k = 0; k < comps.size(); ++k) {
      const auto& e = an.entries[k];
      if (e.rank != comps[k].p || e.node != comps[k].xi || !e.b_is_node || e.b != comps[k].eta) {
        fail("analysis entry " + std::to_string(k + 1) + " does not match (p_k, e_{eta_k}*, xi_k)");
        break;
      }
    }
  }
  int p_prev = 0;
  Scalar egw = eps * Scalar::rat(m.params.weight_of(2 * j0 - 1));
  std::vector<ExtCtx> ctxs;
  ctxs.reserve(zs.size());
  for (const auto& z : zs) ctxs.emplace_back(m, z);
  for (size_t k = 0; k < comps.size(); ++k) {
    std::string at = "term " + std::to_string(k + 1);
    const GammaNode& eta = m.node(comps[k].eta);
    if (!(comps[k].p > p_prev)) fail(at + ": anchors must strictly increase");
    if (k == 0) {
      if (eta.windex % 4 != 2) fail(at + ": we(eta_1) must be 1/m_{4j-2}");
      Int nn = m.params.n_of(2 * j0 - 1);
      if (!(m.params.m_of(eta.windex) > nn * nn))
        fail(at + ": we(eta_1) must be smaller than 1/n_{2j0-1}^2");
    } else {
      const GammaNode& xi_prev = m.node(comps[k - 1].xi);
      if (eta.windex != 4 * xi_prev.sigma) fail(at + ": we(eta_k) must be 1/m_{4 sigma(xi_{k-1})}");
      if (!(p_prev < eta.rank)) fail(at + ": eta_k must sit inside the window");
    }
    auto supp = ctxs[k].supp_bd();
    if (!supp.empty() && !(supp.front() > p_prev && supp.back() < comps[k].p))
      fail(at + ": range must lie strictly inside the window");
    ExactPairReport ep = check_exact_pair(m, zs[k], comps[k].eta, C, eta.windex, comps[k].p, eps);
    if (!ep.pass) {
      for (auto& f : ep.failures) fail(at + " exact pair: " + f);
    }
    if (!approx_eq(ctxs[k].e(gamma), egw)) fail(at + ": e_gamma*(z_k) != eps/m_{2j0-1}");
    p_prev = comps[k].p;
  }
  // Same-weight dispersion: prefix sums make every subinterval sum cheap.
  r.die_bound = Scalar(3) * C;
  for (const auto& node : m.nodes) {
    if (node.kind == NodeKind::Base || node.windex != 2 * j0 - 1) continue;
    std::vector<Scalar> prefix(zs.size() + 1, Scalar(0));
    for (size_t k = 0; k < zs.size(); ++k) prefix[k + 1] = prefix[k] + ctxs[k].e(node.id);
    for (size_t a = 0; a < zs.size(); ++a)
      for (size_t b = a + 1; b <= zs.size(); ++b)
        r.die_max = smax(r.die_max, sabs(prefix[b] - prefix[a]));
  }
  if (!le_slack(r.die_max, r.die_bound)) fail("same-weight dispersion exceeds 3C");
  if (eps.is_zero()) {
    std::vector<std::pair<Scalar, const YVec*>> items;
    Rat inv_n = Rat(1) / Rat(m.params.n_of(2 * j0 - 1));
    for (const auto& z : zs) items.emplace_back(Scalar::rat(inv_n), &z);
    YVec avg = combine(m, items);
    r.avg_value = norm_Y(m, avg);
    Int mm = m.params.m_of(2 * j0 - 1);
    r.avg_bound = Scalar(33) * m.params.A0 * m.params.C0() * C * Scalar::rat(Rat(1) / Rat(mm * mm));
    r.avg_pass = le_slack(r.avg_value, r.avg_bound);
    if (!r.avg_pass) fail("average bound 33 A0 C0 C / m^2 violated");
  }
  return r;
}

struct BuiltDependent {
  std::vector<YVec> zs;
  std::vector<DependentComponent> comps;
};

// Constructs a canonical (1, 2j0-1, 0)-dependent sequence from unit columns:
// eta_1 gets the smallest admissible 4j-2 weight, each later eta_k carries
// weight 1/m_{4 sigma(xi_{k-1})}, and the odd chain grows through the anchors.
inline BuiltDependent build_dependent(BDModel& m, long j0) {
  Int nn = m.params.n_of(2 * j0 - 1);
  if (nn > 64) throw CapError("dependent chain too long to realize under the level cap");
  long n = static_cast<long>(nn.get_si());
  long w1 = 2;
  while (!(m.params.m_of(w1) > nn * nn)) {
    w1 += 4;
    if (w1 > 4096) throw CapError("no admissible starting weight below the guard");
  }
  BuiltDependent out;
  int zero = m.add_zero_handle();
  int rank_eta = static_cast<int>(std::max<long>(w1, 2));
  int p_prev = 0;
  int xi_prev = -1;
  for (long k = 1; k <= n; ++k) {
    if (k > 1) {
      long wk = 4 * m.node(xi_prev).sigma;
      rank_eta = static_cast<int>(std::max<long>(p_prev + 2, wk));
    }
    int p_k = rank_eta + 1;
    if (p_k + 1 > m.params.cap)
      throw CapError("level cap too small for the dependent ladder");
    int bk = p_prev + 1;  // column block strictly inside the window
    out.zs.push_back(make_column(m, bk, bk, Scalar(1)));
    int eta;
    if (k == 1) {
      eta = m.register_even0(rank_eta, w1 / 2, zero);
    } else {
      long wk = 4 * m.node(xi_prev).sigma;
      eta = m.register_even0(rank_eta, wk / 2, zero);
    }
    int xi = (k == 1) ? m.register_odd0(p_k, j0, eta) : m.register_odd1(p_k, xi_prev, eta);
    out.comps.push_back({p_k, eta, xi});
    p_prev = p_k;
    xi_prev = xi;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower-bound witness

struct LowerBoundReport {
  int gamma = -1;
  Scalar value{0}, bound{0};
  bool pass = false;
};

// Builds a weight-1/m_{2j} chain whose arms pick near-norming column
// functionals for the blocks past the first j, then certifies
// e_gamma*(sum w) >= (1/(3 m_{2j})) sum ||w_d||.
inline LowerBoundReport lower_bound_witness(BDModel& m, const std::vector<YVec>& ws, long j) {
  if (ws.empty()) throw ConstructionError("the witness needs at least one block");
  if (!(Int(static_cast<long>(ws.size())) <= m.params.n_of(2 * j)))
    throw ConstructionError("at most n_{2j} blocks can be normed by one chain");
  long nb = static_cast<long>(ws.size());
  if (nb < j) throw ConstructionError("need at least j blocks");
  std::vector<Scalar> norms;
  std::vector<int> min_s(nb), max_s(nb);
  for (long d = 0; d < nb; ++d) {
    norms.push_back(norm_Y(m, ws[d]));
    ExtCtx ctx(m, ws[d]);
    auto supp = ctx.supp_bd();
    if (supp.empty()) throw ConstructionError("witness blocks must be nonzero");
    min_s[d] = supp.front();
    max_s[d] = supp.back();
  }
  // Arm functionals: the best single-coordinate column functional; the pool
  // is too small if no coordinate achieves half the block norm.
  std::vector<int> arm_handles;
  for (long d = j; d < nb; ++d) {
    int best_k = 0, best_i = 0;
    Scalar best_v(0);
    for (auto& [k, part] : ws[d].x.parts) {
      for (auto& [i, v] : part.entries) {
        if (i < k) continue;  // invisible to every column functional
        if (sabs(v) > best_v) {
          best_v = sabs(v);
          best_k = k;
          best_i = i;
        }
      }
    }
    if (best_k == 0 || !ge_slack(best_v + best_v, norms[d]))
      throw PoolError("pool too small to norm block " + std::to_string(d + 1));
    Scalar sign = ws[d].x.part(best_k).at(best_i);
    Coeffs payload;
    payload.set(best_k, scmp(sign, Scalar(0)) >= 0 ? Scalar(1) : Scalar(-1));
    arm_handles.push_back(m.add_gutc_handle(best_i, payload));
  }
  // Anchor ladder: window l covers block d = j + l - 1; the first window
  // absorbs the skipped prefix.
  std::vector<std::pair<int, int>> triples;
  int p_prev = static_cast<int>(2 * j);
  for (long d = 0; d < j; ++d) p_prev = std::max(p_prev, max_s[d]);
  triples.emplace_back(p_prev, m.add_zero_handle());
  for (long d = j; d < nb; ++d) {
    if (!(min_s[d] >= p_prev + 2))
      throw ConstructionError("blocks are not staggered enough for the witness ladder");
    int p = std::max({max_s[d], m.handle(arm_handles[d - j]).stage + 1, p_prev + 1});
    triples.emplace_back(p, arm_handles[d - j]);
    p_prev = p;
  }
  LowerBoundReport r;
  r.gamma = construct_gamma(m, j, triples);
  std::vector<std::pair<Scalar, const YVec*>> items;
  Scalar total_norm(0);
  for (long d = 0; d < nb; ++d) {
    items.emplace_back(Scalar(1), &ws[d]);
    total_norm += norms[d];
  }
  YVec sum = combine(m, items);
  r.value = ExtCtx(m, sum).e(r.gamma);
  r.bound = Scalar::rat(Rat(1) / (Rat(3) * Rat(m.params.m_of(2 * j)))) * total_norm;
  r.pass = ge_slack(r.value, r.bound);
  return r;
}

// ---------------------------------------------------------------------------
// Calkin-style sandwich

struct CalkinReport {
  Scalar lower{0}, upper{0}, msur{0}, theorem_constant{0};
  bool consistent = false;
};

// For the diagonal perturbation a_0 I + sum_{k<=n} a_k I_k and the witness
// column x = sum b_k t_{k,i0} with ||sum b_k e_k||_X <= 1 and i0 >= n+1:
// lower = ||T x|| / C0 and upper = (2 C0^2 - C0) * M_sur, where M_sur is the
// exact sup of the diagonal data over the witness family. The distance
// theorem carries the constant 2 C0^3 - C0^2.
inline CalkinReport calkin_witness(const BDModel& m, const std::vector<Scalar>& a, int i0,
                                   const Coeffs& b) {
  if (a.empty()) throw ConstructionError("need at least the identity coefficient a_0");
  int n = static_cast<int>(a.size()) - 1;
  if (i0 < n + 1) throw ConstructionError("the witness column must sit past the perturbation");
  if (i0 > m.params.cap) throw CapError("witness column exceeds the level cap");
  if (b.empty()) throw ConstructionError("the witness coefficients must be nonzero");
  if (b.max_support() > i0)
    throw ConstructionError("witness blocks must not exceed the column index");
  const NormOracle& X = m.params.utc.outer;
  if (!le_slack(X(b), Scalar(1)))
    throw ConstructionError("the witness coefficients must lie in the unit ball of the outer space");
  YVec tx;
  tx.stage = i0;
  Coeffs diag;  // (a_0 + a_k) b_k at block k
  for (auto& [k, bk] : b.entries) {
    Scalar ck = a[0] + (k <= n ? a[k] : Scalar(0));
    Scalar v = ck * bk;
    diag.set(k, v);
    if (!v.is_zero()) {
      Coeffs part;
      part.set(i0, v);
      tx.x.set_part(k, part);
    }
  }
  CalkinReport r;
  Scalar c0 = m.params.C0();
  r.lower = norm_Y(m, tx) / c0;
  r.msur = X(diag);
  for (int k = 1; k <= n; ++k) r.msur = smax(r.msur, sabs(a[0] + a[k]));
  r.msur = smax(r.msur, sabs(a[0]));
  r.upper = (Scalar(2) * c0 * c0 - c0) * r.msur;
  r.theorem_constant = Scalar(2) * c0 * c0 * c0 - c0 * c0;
  r.consistent = le_slack(r.lower, r.upper);
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

inline ordered_json handle_to_json(const FunctionalHandle& h) {
  ordered_json j;
  j["pool"] = pool_name(h.pool);
  switch (h.pool) {
    case Pool::Zero:
      break;
    case Pool::K:
      j["block"] = h.block;
      j["coeffs"] = coeffs_to_json(h.payload);
      break;
    case Pool::Gutc:
      j["i0"] = h.i0;
      j["coeffs"] = coeffs_to_json(h.payload);
      break;
    case Pool::B: {
      ordered_json terms = ordered_json::object();
      for (auto& [id, q] : h.bterms) terms[std::to_string(id)] = q.get_str();
      j["coeffs"] = terms;
      break;
    }
  }
  return j;
}

inline int handle_from_json(BDModel& m, const json& j,
                            const std::map<int, int>* idmap = nullptr) {
  std::string pool = j.value("pool", "");
  if (pool == "Zero") return m.add_zero_handle();
  if (pool == "K") return m.add_K_handle(j.at("block").get<int>(), coeffs_from_json(j.at("coeffs")));
  if (pool == "Gutc")
    return m.add_gutc_handle(j.at("i0").get<int>(), coeffs_from_json(j.at("coeffs")));
  if (pool == "B") {
    std::vector<std::pair<int, Rat>> terms;
    for (auto it = j.at("coeffs").begin(); it != j.at("coeffs").end(); ++it) {
      int id = std::stoi(it.key());
      if (idmap) {
        auto mapped = idmap->find(id);
        if (mapped == idmap->end()) throw ParseError("B handle references an unknown node id");
        id = mapped->second;
      }
      terms.emplace_back(id, parse_rat(it.value().get<std::string>()));
    }
    return m.add_B_handle(terms);
  }
  throw ParseError("unknown functional pool: " + pool);
}

inline ordered_json params_to_json(const BDParams& p) {
  ordered_json j;
  ordered_json mt = ordered_json::array(), nt = ordered_json::array();
  for (auto& v : p.mt) mt.push_back(v.get_str());
  for (auto& v : p.nt) nt.push_back(v.get_str());
  j["mt"] = mt;
  j["nt"] = nt;
  j["mode"] = p.compliant ? "compliant" : "toy";
  j["cap"] = p.cap;
  j["A0"] = p.A0.exact ? ordered_json(p.A0.q.get_str()) : ordered_json(p.A0.d);
  j["utc"] = ordered_json{{"outer", p.utc.outer.name},
                          {"A0", p.utc.A0.exact ? ordered_json(p.utc.A0.q.get_str())
                                                : ordered_json(p.utc.A0.d)},
                          {"inner", ordered_json{{"default", p.utc.inner_desc}}}};
  return j;
}

inline BDParams params_from_json(const json& j) {
  BDParams p;
  if (j.contains("mt")) {
    p.mt.clear();
    p.nt.clear();
    for (auto& v : j.at("mt")) p.mt.push_back(Int(v.get<std::string>()));
    for (auto& v : j.at("nt")) p.nt.push_back(Int(v.get<std::string>()));
  } else if (j.contains("m")) {
    // Outer ladders given: interpolate the even tilde positions geometrically.
    std::vector<Int> m, n;
    for (auto& v : j.at("m"))
      m.push_back(v.is_string() ? Int(v.get<std::string>()) : Int(static_cast<long>(v.get<long long>())));
    for (auto& v : j.at("n"))
      n.push_back(v.is_string() ? Int(v.get<std::string>()) : Int(static_cast<long>(v.get<long long>())));
    if (m.size() != n.size() || m.size() < 2) throw ParseError("need matching outer ladders of length >= 2");
    auto interpolate = [](const std::vector<Int>& outer) {
      std::vector<Int> t;
      for (size_t i = 0; i < outer.size(); ++i) {
        t.push_back(outer[i]);
        if (i + 1 < outer.size()) {
          Int prod = outer[i] * outer[i + 1], root;
          mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
          if (root * root != prod)
            throw ParseError("outer ladders must admit an exact geometric midpoint");
          t.push_back(root);
        }
      }
      return t;
    };
    p.mt = interpolate(m);
    p.nt = interpolate(n);
  }
  p.compliant = j.value("mode", "toy") == "compliant";
  p.cap = j.value("cap", 64);
  if (j.contains("A0"))
    p.A0 = j.at("A0").is_string()
               ? Scalar::rat(parse_rat(j.at("A0").get<std::string>()))
               : Scalar::rat(Rat(static_cast<long>(j.at("A0").get<long long>())));
  if (j.contains("utc"))
    p.utc = utc_config_from_json(j.at("utc"));
  else
    p.utc = default_utc_config(make_oracle("james(lp:2)"), Scalar(1));
  p.validate();
  return p;
}

inline ordered_json model_to_json(const BDModel& m) {
  ordered_json j;
  j["params"] = params_to_json(m.params);
  ordered_json delta = ordered_json::array();
  for (const auto& g : m.nodes) {
    if (g.kind == NodeKind::Base) continue;
    ordered_json node;
    node["id"] = g.id;
    node["rank"] = g.rank;
    node["kind"] = kind_name(g.kind);
    node["j"] = (g.windex % 2 == 0) ? g.windex / 2 : (g.windex + 1) / 2;
    node["age"] = g.age;
    node["sigma"] = g.sigma;
    if (g.xi >= 0) node["xi"] = g.xi;
    if (g.eta >= 0) node["eta"] = g.eta;
    if (g.handle >= 0) node["b"] = handle_to_json(m.handle(g.handle));
    delta.push_back(node);
  }
  j["delta"] = delta;
  return j;
}

inline BDModel model_from_json(const json& j) {
  BDModel m(params_from_json(j.at("params")));
  if (!j.contains("delta")) return m;
  std::map<int, int> idmap;  // file id -> registered id
  idmap[0] = 0;
  for (const auto& node : j.at("delta")) {
    std::string kind = node.at("kind").get<std::string>();
    int rank = node.at("rank").get<int>();
    long jj = node.at("j").get<long>();
    int id = -1;
    auto mapped = [&idmap](int file_id) {
      auto it = idmap.find(file_id);
      if (it == idmap.end()) throw ParseError("node references an unknown id");
      return it->second;
    };
    if (kind == "Even0")
      id = m.register_even0(rank, jj, handle_from_json(m, node.at("b"), &idmap));
    else if (kind == "Odd0")
      id = m.register_odd0(rank, jj, mapped(node.at("eta").get<int>()));
    else if (kind == "Even1")
      id = m.register_even1(rank, mapped(node.at("xi").get<int>()),
                            handle_from_json(m, node.at("b"), &idmap));
    else if (kind == "Odd1")
      id = m.register_odd1(rank, mapped(node.at("xi").get<int>()),
                           mapped(node.at("eta").get<int>()));
    else
      throw ParseError("unknown node kind: " + kind);
    idmap[node.at("id").get<int>()] = id;
  }
  return m;
}

inline ordered_json yvec_to_json(const YVec& v) {
  ordered_json j;
  j["stage"] = v.stage;
  j["x"] = blockvec_to_json(v.x);
  ordered_json y = ordered_json::object();
  for (auto& [id, s] : v.y) y[std::to_string(id)] = s.exact ? ordered_json(s.q.get_str()) : ordered_json(s.d);
  j["y"] = y;
  return j;
}

// Executes a build request against a fresh model.  Request schema:
//   { "cap": 64,                      -- optional, toy parameters at this cap
//     "params": { ... },              -- optional, full parameter block instead
//     "handles": [ {"pool": "Zero"}, {"pool": "K", "block": 3, "coeffs": {...}}, ... ],
//     "nodes":   [ {"j": 1, "chain": [ {"rank": 2, "handle": 0}, ... ]}, ... ] }
// Chains reference handles by their position in the "handles" array.  With no
// nodes requested the model carries only the rank-1 base layer.  Returns the
// model JSON with the ids of the built nodes appended under "built".
inline ordered_json run_build_request(const json& req) {
  BDParams params = req.contains("params") ? params_from_json(req.at("params"))
                                           : toy_bd_params(req.value("cap", 64));
  BDModel model(params);
  std::vector<int> handle_ids;
  if (req.contains("handles"))
    for (const auto& h : req.at("handles")) handle_ids.push_back(handle_from_json(model, h));
  std::vector<int> node_ids;
  if (req.contains("nodes")) {
    for (const auto& nreq : req.at("nodes")) {
      long j = nreq.at("j").get<long>();
      std::vector<std::pair<int, int>> triples;
      for (const auto& link : nreq.at("chain")) {
        int hidx = link.at("handle").get<int>();
        if (hidx < 0 || hidx >= static_cast<int>(handle_ids.size()))
          throw ParseError("chain references an unknown handle index");
        triples.emplace_back(link.at("rank").get<int>(), handle_ids[hidx]);
      }
      node_ids.push_back(construct_gamma(model, j, triples));
    }
  }
  ordered_json out = model_to_json(model);
  ordered_json built = ordered_json::array();
  for (int id : node_ids) built.push_back(id);
  out["built"] = built;
  return out;
}

inline YVec yvec_from_json(const json& j, bool force_float = false) {
  YVec v;
  v.stage = j.value("stage", 0);
  if (j.contains("x")) v.x = blockvec_from_json(j.at("x"), force_float);
  if (j.contains("y")) {
    for (auto it = j.at("y").begin(); it != j.at("y").end(); ++it) {
      int id = std::stoi(it.key());
      Scalar s = it.value().is_string()
                     ? Scalar::rat(parse_rat(it.value().get<std::string>()))
                     : Scalar::flt(it.value().get<double>());
      if (force_float) s = Scalar::flt(s.d);
      if (!s.is_zero()) v.y[id] = s;
    }
  }
  return v;
}

// Deterministic random vectors over a model: a handful of block parts plus
// literal y-coordinates on the low-rank nodes.
inline YVec random_yvec(const BDModel& m, std::mt19937_64& rng, int stage, int parts = 3,
                        int with_y = 2) {
  if (stage > m.params.cap) stage = m.params.cap;
  YVec v;
  v.stage = stage;
  std::uniform_int_distribution<int> block(1, std::max(1, stage));
  for (int t = 0; t < parts; ++t) {
    int k = block(rng);
    Coeffs c = random_rational_coeffs(rng, 16, 2);
    v.x.set_part(k, v.x.part(k).plus(c));
  }
  std::vector<int> eligible;
  for (const auto& g : m.nodes)
    if (g.rank <= stage) eligible.push_back(g.id);
  if (!eligible.empty()) {
    std::uniform_int_distribution<size_t> pick(0, eligible.size() - 1);
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    for (int t = 0; t < with_y; ++t) {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      Scalar s = Scalar::rat(q);
      if (!s.is_zero()) v.y[eligible[pick(rng)]] = s;
    }
  }
  return v;
}

}  // namespace banachforge
