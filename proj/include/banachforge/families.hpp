#pragma once

// Regular families of finite subsets of N: membership, admissibility,
// exhaustive regularity checking, and the windowed block family built from an
// increasing mark sequence with nondecreasing gaps coupled to a base family.

#include <algorithm>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "banachforge/scalar.hpp"

namespace banachforge {

struct FiniteSet {
  std::vector<int> elems;  // strictly increasing positive integers

  FiniteSet() = default;
  explicit FiniteSet(std::vector<int> e) : elems(std::move(e)) {
    for (size_t i = 0; i < elems.size(); ++i) {
      if (elems[i] < 1) throw std::runtime_error("set elements must be positive");
      if (i > 0 && elems[i] <= elems[i - 1])
        throw std::runtime_error("set elements must be strictly increasing");
    }
  }
  bool empty() const { return elems.empty(); }
  int size() const { return static_cast<int>(elems.size()); }
  int min() const { return elems.front(); }
  int max() const { return elems.back(); }
  bool operator<(const FiniteSet& o) const { return elems < o.elems; }
  bool operator==(const FiniteSet& o) const { return elems == o.elems; }
};

struct FamilySpec {
  enum class Kind { Schreier, Bounded, Fine, Osz, Explicit };
  Kind kind = Kind::Schreier;
  int bound = 0;                          // bounded(k) / fine(r)
  std::vector<long> m_seq;                // window marks, m_seq[0] = 1
  std::shared_ptr<FamilySpec> base;       // base family for the windowed kind
  std::vector<FiniteSet> sets;            // explicit members (deduplicated)
  std::string text;                       // spec string for reporting
};

bool member(const FamilySpec& spec, const FiniteSet& F);

// Windowed block family: F belongs iff some decomposition of F into successive
// blocks A_1 < ... < A_n satisfies, with d_i = min{d >= 1 : min(A_i) <= m_d}
// and d_0 = 0 (so m_{d_0} = m_seq[0] = 1):
//   - the d_i are strictly increasing,
//   - #A_i <= m_{d_i} - m_{d_{i-1}},
//   - {d_1, ..., d_n} belongs to the base family.
// The empty set always belongs. Elements above the last mark are out of range.
inline bool osz_member(const FamilySpec& spec, const FiniteSet& F) {
  if (spec.kind != FamilySpec::Kind::Osz) throw std::runtime_error("windowed membership on non-windowed spec");
  if (spec.m_seq.empty() || spec.m_seq[0] != 1)
    throw ParseError("window mark sequence must start at 1");
  for (size_t i = 1; i < spec.m_seq.size(); ++i) {
    if (spec.m_seq[i] <= spec.m_seq[i - 1]) throw ParseError("window marks must be strictly increasing");
    long gap = spec.m_seq[i] - spec.m_seq[i - 1];
    long prev = i >= 2 ? spec.m_seq[i - 1] - spec.m_seq[i - 2] : gap;
    if (gap < prev) throw ParseError("window mark gaps must be nondecreasing");
  }
  if (F.empty()) return true;
  long cap = spec.m_seq.back();
  if (F.max() > cap) throw CapError("set exceeds the window support cap " + std::to_string(cap));

  int n = F.size();
  auto window_index = [&](int value) {
    for (size_t d = 1; d < spec.m_seq.size(); ++d)
      if (value <= spec.m_seq[d]) return static_cast<int>(d);
    return -1;
  };
  // Enumerate compositions of the sorted elements into consecutive blocks.
  int cuts = n - 1;
  for (long mask = 0; mask < (1L << cuts); ++mask) {
    std::vector<std::pair<int, int>> blocks;  // [start, end) positions in F.elems
    int start = 0;
    for (int c = 0; c < cuts; ++c)
      if (mask & (1L << c)) {
        blocks.push_back({start, c + 1});
        start = c + 1;
      }
    blocks.push_back({start, n});
    bool ok = true;
    int prev_d = 0;
    std::vector<int> ds;
    for (auto& [s, e] : blocks) {
      int d = window_index(F.elems[s]);
      if (d < 0 || d <= prev_d) {
        ok = false;
        break;
      }
      long width = spec.m_seq[d] - spec.m_seq[prev_d];
      if (e - s > width) {
        ok = false;
        break;
      }
      ds.push_back(d);
      prev_d = d;
    }
    if (ok && spec.base && !member(*spec.base, FiniteSet(ds))) ok = false;
    if (ok) return true;
  }
  return false;
}

inline bool member(const FamilySpec& spec, const FiniteSet& F) {
  switch (spec.kind) {
    case FamilySpec::Kind::Schreier:
      return F.empty() || F.size() <= F.min();
    case FamilySpec::Kind::Bounded:
      return F.size() <= spec.bound;
    case FamilySpec::Kind::Fine:
      // finite-rank fine-Schreier family: sets of size <= r
      return F.size() <= spec.bound;
    case FamilySpec::Kind::Osz:
      return osz_member(spec, F);
    case FamilySpec::Kind::Explicit:
      return std::find(spec.sets.begin(), spec.sets.end(), F) != spec.sets.end();
  }
  return false;
}

// Successive nonempty sets E_1 < E_2 < ... are admissible iff some member
// {m_1 < ... < m_n} interleaves: m_1 <= E_1 < m_2 <= E_2 < ... For regular
// kinds the greedy witness m_i = min(E_i) is optimal (spreading + hereditary);
// explicit families fall back to exhaustive search over interleavings.
inline void check_successive(const std::vector<FiniteSet>& Es) {
  for (size_t i = 0; i < Es.size(); ++i) {
    if (Es[i].empty()) throw std::runtime_error("admissibility requires nonempty sets");
    if (i > 0 && Es[i - 1].max() >= Es[i].min())
      throw std::runtime_error("admissibility requires successive sets");
  }
}

inline bool is_admissible(const FamilySpec& spec, const std::vector<FiniteSet>& Es) {
  check_successive(Es);
  if (Es.empty()) return true;
  if (spec.kind != FamilySpec::Kind::Explicit) {
    std::vector<int> ms;
    ms.reserve(Es.size());
    for (auto& E : Es) ms.push_back(E.min());
    return member(spec, FiniteSet(ms));
  }
  // Exhaustive interleaving: m_i in (max E_{i-1}, min E_i].
  size_t n = Es.size();
  std::vector<int> ms(n);
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == n) return member(spec, FiniteSet(ms));
    int lo = i == 0 ? 1 : Es[i - 1].max() + 1;
    int hi = Es[i].min();
    for (int m = lo; m <= hi; ++m) {
      ms[i] = m;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

// Exhaustive regularity check on sets with max <= cap: hereditary (closed
// under removing one element), spreading (closed under shifting one element up
// by one), and the empty set belongs. Compactness is automatic at finite cap.
inline bool is_regular(const FamilySpec& spec, int cap) {
  if (cap > 20) throw CapError("regularity check capped at 20");
  // Sets beyond the family's own support range (windowed kinds) are out of
  // scope for the check, not failures: -1 = out of range, 0/1 = membership.
  auto mem = [&](const FiniteSet& F) -> int {
    try {
      return member(spec, F) ? 1 : 0;
    } catch (const CapError&) {
      return -1;
    }
  };
  if (mem(FiniteSet{}) != 1) return false;
  std::vector<int> elems;
  std::function<bool(int)> rec = [&](int next) -> bool {
    if (!elems.empty()) {
      FiniteSet F(elems);
      if (mem(F) == 1) {
        // hereditary: drop each element (never leaves the support range)
        for (size_t i = 0; i < elems.size(); ++i) {
          std::vector<int> sub = elems;
          sub.erase(sub.begin() + i);
          if (mem(FiniteSet(sub)) != 1) return false;
        }
        // spreading: bump each element by one where possible
        for (size_t i = 0; i < elems.size(); ++i) {
          std::vector<int> up = elems;
          up[i] += 1;
          if (up[i] > cap) continue;
          if (i + 1 < up.size() && up[i] >= up[i + 1]) continue;
          if (mem(FiniteSet(up)) == 0) return false;
        }
      }
    }
    for (int v = next; v <= cap; ++v) {
      elems.push_back(v);
      if (!rec(v + 1)) return false;
      elems.pop_back();
    }
    return true;
  };
  return rec(1);
}

// Exhaustive admissibility (all interleavings) for cross-checking the greedy
// path on regular kinds.
inline bool is_admissible_exhaustive(const FamilySpec& spec, const std::vector<FiniteSet>& Es) {
  check_successive(Es);
  if (Es.empty()) return true;
  size_t n = Es.size();
  std::vector<int> ms(n);
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == n) return member(spec, FiniteSet(ms));
    int lo = i == 0 ? 1 : Es[i - 1].max() + 1;
    int hi = Es[i].min();
    for (int m = lo; m <= hi; ++m) {
      ms[i] = m;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

// Family spec strings: "schreier", "bounded:3", "fine:4",
// "osz:1,2,4,8;base=fine:3", "explicit:@file.json".
inline FamilySpec parse_family(const std::string& text) {
  FamilySpec f;
  f.text = text;
  auto starts = [&](const char* p) { return text.rfind(p, 0) == 0; };
  if (text == "schreier") {
    f.kind = FamilySpec::Kind::Schreier;
  } else if (starts("bounded:")) {
    f.kind = FamilySpec::Kind::Bounded;
    f.bound = std::stoi(text.substr(8));
    if (f.bound < 0) throw ParseError("bounded family needs k >= 0");
  } else if (starts("fine:")) {
    f.kind = FamilySpec::Kind::Fine;
    f.bound = std::stoi(text.substr(5));
    if (f.bound < 0) throw ParseError("fine family needs finite rank r >= 0");
  } else if (starts("osz:")) {
    f.kind = FamilySpec::Kind::Osz;
    std::string rest = text.substr(4);
    size_t semi = rest.find(";base=");
    std::string marks = semi == std::string::npos ? rest : rest.substr(0, semi);
    size_t pos = 0;
    while (pos <= marks.size()) {
      size_t comma = marks.find(',', pos);
      std::string tok = marks.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!tok.empty()) f.m_seq.push_back(std::stol(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.m_seq.empty() || f.m_seq[0] != 1)
      throw ParseError("window mark sequence must start at 1");
    if (semi != std::string::npos)
      f.base = std::make_shared<FamilySpec>(parse_family(rest.substr(semi + 6)));
  } else if (starts("explicit:")) {
    f.kind = FamilySpec::Kind::Explicit;
    std::string src = text.substr(9);
    nlohmann::json j;
    if (!src.empty() && src[0] == '@') {
      std::ifstream in(src.substr(1));
      if (!in) throw ParseError("cannot open family file: " + src.substr(1));
      in >> j;
    } else {
      j = nlohmann::json::parse(src);
    }
    if (!j.is_array()) throw ParseError("explicit family JSON must be an array of integer arrays");
    std::set<FiniteSet> dedup;
    for (auto& arr : j) {
      std::vector<int> e;
      for (auto& v : arr) e.push_back(v.get<int>());
      std::sort(e.begin(), e.end());
      e.erase(std::unique(e.begin(), e.end()), e.end());
      dedup.insert(FiniteSet(e));
    }
    f.sets.assign(dedup.begin(), dedup.end());
  } else {
    throw ParseError("unknown family spec: " + text);
  }
  return f;
}

}  // namespace banachforge
