#pragma once

// Ordered families of pairwise disjoint integer intervals and their exhaustive
// enumeration (the brute-force backbone for interval-supremum norms).

#include <functional>
#include <vector>

#include "banachforge/scalar.hpp"

namespace banachforge {

struct Interval {
  int lo = 1, hi = 0;  // inclusive; lo <= hi for nonempty
  bool valid() const { return lo <= hi; }
  bool contains(int i) const { return lo <= i && i <= hi; }
};

struct IntervalFamily {
  std::vector<Interval> intervals;  // lo_1 <= hi_1 < lo_2 <= hi_2 < ...

  bool well_formed() const {
    int prev_hi = 0;
    for (const auto& iv : intervals) {
      if (!iv.valid() || iv.lo <= prev_hi) return false;
      prev_hi = iv.hi;
    }
    return true;
  }
};

// Visits every family of pairwise disjoint nonempty intervals inside [1, n]
// (including the empty family), each exactly once. Guarded at n <= 14.
inline void visit_interval_families(int n, const std::function<void(const IntervalFamily&)>& cb) {
  if (n < 0 || n > 14) throw CapError("interval-family enumeration capped at n <= 14");
  IntervalFamily cur;
  std::function<void(int)> rec = [&](int start) {
    cb(cur);
    for (int lo = start; lo <= n; ++lo)
      for (int hi = lo; hi <= n; ++hi) {
        cur.intervals.push_back({lo, hi});
        rec(hi + 1);  // next interval starts past hi; adjacency is allowed
        cur.intervals.pop_back();
      }
  };
  rec(1);
}

inline std::vector<IntervalFamily> enumerate_interval_families(int n) {
  std::vector<IntervalFamily> out;
  visit_interval_families(n, [&](const IntervalFamily& f) { out.push_back(f); });
  return out;
}

inline long count_interval_families(int n) {
  long cnt = 0;
  visit_interval_families(n, [&](const IntervalFamily&) { ++cnt; });
  return cnt;
}

}  // namespace banachforge
