#pragma once

// Exact-or-float scalar arithmetic. Exact values are arbitrary-precision
// rationals (GMP); float values are binary64. Mixing an exact value with a
// float value yields a float value; an exact value never silently becomes
// float.

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace banachforge {

using Rat = mpq_class;
using Int = mpz_class;

// Global tolerances for float-mode comparisons. Exact-mode comparisons use 0.
inline constexpr double kEqTol = 1e-12;   // equality checks
inline constexpr double kIneqTol = 1e-9;  // inequality slack

// Error taxonomy mirrored by the CLI exit codes: ParseError -> 2, CapError -> 3.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};
struct CapError : std::runtime_error {
  explicit CapError(const std::string& m) : std::runtime_error(m) {}
};
// Everything else (ordering violations, construction-rule violations, ...)
// also maps to exit 2 through std::runtime_error.

struct Scalar {
  bool exact = true;
  Rat q;          // value when exact
  double d = 0.0; // always maintained (approximation of q when exact)

  Scalar() : q(0) {}
  Scalar(int v) : q(v), d(static_cast<double>(v)) {}
  Scalar(long v) : q(static_cast<long>(v)), d(static_cast<double>(v)) {}

  static Scalar rat(Rat v) {
    Scalar s;
    s.exact = true;
    s.q = std::move(v);
    s.d = s.q.get_d();
    return s;
  }
  static Scalar flt(double v) {
    Scalar s;
    s.exact = false;
    s.d = v;
    return s;
  }

  bool is_zero() const { return exact ? sgn(q) == 0 : d == 0.0; }
  double dbl() const { return d; }
};

inline Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::rat(a.q + b.q);
  return Scalar::flt(a.d + b.d);
}
inline Scalar operator-(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::rat(a.q - b.q);
  return Scalar::flt(a.d - b.d);
}
inline Scalar operator-(const Scalar& a) {
  if (a.exact) return Scalar::rat(-a.q);
  return Scalar::flt(-a.d);
}
inline Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return Scalar::rat(a.q * b.q);
  return Scalar::flt(a.d * b.d);
}
inline Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw std::runtime_error("scalar division by zero");
  if (a.exact && b.exact) return Scalar::rat(a.q / b.q);
  return Scalar::flt(a.d / b.d);
}
inline Scalar& operator+=(Scalar& a, const Scalar& b) { return a = a + b; }
inline Scalar& operator-=(Scalar& a, const Scalar& b) { return a = a - b; }
inline Scalar& operator*=(Scalar& a, const Scalar& b) { return a = a * b; }

inline Scalar sabs(const Scalar& a) {
  if (a.exact) return Scalar::rat(abs(a.q));
  return Scalar::flt(std::fabs(a.d));
}

// Strict three-way comparison used for algorithmic decisions (argmax etc.).
inline int scmp(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return cmp(a.q, b.q);
  if (a.d < b.d) return -1;
  if (a.d > b.d) return 1;
  return 0;
}
inline bool operator<(const Scalar& a, const Scalar& b) { return scmp(a, b) < 0; }
inline bool operator>(const Scalar& a, const Scalar& b) { return scmp(a, b) > 0; }

inline const Scalar& smax(const Scalar& a, const Scalar& b) { return scmp(a, b) >= 0 ? a : b; }
inline const Scalar& smin(const Scalar& a, const Scalar& b) { return scmp(a, b) <= 0 ? a : b; }

inline double cmp_scale(const Scalar& a, const Scalar& b) {
  double s = 1.0;
  double fa = std::fabs(a.d), fb = std::fabs(b.d);
  if (fa > s) s = fa;
  if (fb > s) s = fb;
  return s;
}

// Tolerant equality: exact pairs must agree exactly; otherwise |a-b| within
// kEqTol relative to max(1,|a|,|b|).
inline bool approx_eq(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return a.q == b.q;
  return std::fabs(a.d - b.d) <= kEqTol * cmp_scale(a, b);
}

// Tolerant a <= b: exact pairs compared exactly; otherwise with kIneqTol slack.
inline bool le_slack(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return a.q <= b.q;
  return a.d <= b.d + kIneqTol * cmp_scale(a, b);
}

// Tolerant a >= b.
inline bool ge_slack(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) return a.q >= b.q;
  return a.d >= b.d - kIneqTol * cmp_scale(a, b);
}

// |a|^p and x^(1/p) for the l_p computations; exact only when p == 1.
inline Scalar pow_abs(const Scalar& a, double p) {
  if (p == 1.0) return sabs(a);
  return Scalar::flt(std::pow(std::fabs(a.d), p));
}
inline Scalar root(const Scalar& a, double p) {
  if (p == 1.0) return a;
  return Scalar::flt(std::pow(a.d, 1.0 / p));
}

// Parses "3/2", "-1/4", "7" as exact rationals.
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw ParseError("bad rational literal: " + s);
  }
  Rat q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational literal: " + s);
  if (q.get_den() == 0) throw ParseError("zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Rational string in exact mode, 17 significant digits otherwise.
inline std::string to_string(const Scalar& s) {
  if (s.exact) return s.q.get_str();
  return format_double(s.d);
}

}  // namespace banachforge
