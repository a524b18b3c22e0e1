#pragma once

// Finitely supported scalar sequences indexed from 1: the universal vector
// representation. Zero entries are never stored.

#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <vector>

#include "banachforge/scalar.hpp"

namespace banachforge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Coeffs {
  std::map<int, Scalar> entries;  // index >= 1 -> nonzero scalar

  Coeffs() = default;

  // Dense constructor: values[i] becomes coordinate i+1.
  static Coeffs dense(const std::vector<Scalar>& values) {
    Coeffs c;
    for (size_t i = 0; i < values.size(); ++i) c.set(static_cast<int>(i) + 1, values[i]);
    return c;
  }
  static Coeffs unit(int i) {
    Coeffs c;
    c.set(i, Scalar(1));
    return c;
  }

  void set(int i, const Scalar& v) {
    if (i < 1) throw std::runtime_error("coordinate index must be >= 1");
    if (v.is_zero())
      entries.erase(i);
    else
      entries[i] = v;
  }
  Scalar at(int i) const {
    auto it = entries.find(i);
    return it == entries.end() ? Scalar(0) : it->second;
  }
  bool empty() const { return entries.empty(); }

  std::vector<int> support() const {
    std::vector<int> s;
    s.reserve(entries.size());
    for (auto& [i, v] : entries) s.push_back(i);
    return s;
  }
  int min_support() const { return entries.empty() ? 0 : entries.begin()->first; }
  int max_support() const { return entries.empty() ? 0 : entries.rbegin()->first; }

  // Restriction to the integer interval [lo, hi].
  Coeffs restrict(int lo, int hi) const {
    Coeffs r;
    for (auto& [i, v] : entries)
      if (lo <= i && i <= hi) r.entries.emplace(i, v);
    return r;
  }

  Coeffs scaled(const Scalar& c) const {
    Coeffs r;
    if (c.is_zero()) return r;
    for (auto& [i, v] : entries) r.set(i, v * c);
    return r;
  }
  Coeffs plus(const Coeffs& o) const {
    Coeffs r = *this;
    for (auto& [i, v] : o.entries) r.set(i, r.at(i) + v);
    return r;
  }
  // Pointwise (coordinatewise) product.
  Coeffs pointwise(const Coeffs& o) const {
    Coeffs r;
    for (auto& [i, v] : entries) {
      auto it = o.entries.find(i);
      if (it != o.entries.end()) r.set(i, v * it->second);
    }
    return r;
  }
  Scalar dot(const Coeffs& o) const {
    Scalar s(0);
    const Coeffs& small = entries.size() <= o.entries.size() ? *this : o;
    const Coeffs& big = entries.size() <= o.entries.size() ? o : *this;
    for (auto& [i, v] : small.entries) {
      auto it = big.entries.find(i);
      if (it != big.entries.end()) s += v * it->second;
    }
    return s;
  }

  Scalar l1() const {
    Scalar s(0);
    for (auto& [i, v] : entries) s += sabs(v);
    return s;
  }
  Scalar linf() const {
    Scalar s(0);
    for (auto& [i, v] : entries) s = smax(s, sabs(v));
    return s;
  }
  Scalar sum() const {
    Scalar s(0);
    for (auto& [i, v] : entries) s += v;
    return s;
  }

  bool all_exact() const {
    for (auto& [i, v] : entries)
      if (!v.exact) return false;
    return true;
  }
  Coeffs to_float() const {
    Coeffs r;
    for (auto& [i, v] : entries) r.set(i, Scalar::flt(v.d));
    return r;
  }
};

inline bool approx_eq(const Coeffs& a, const Coeffs& b) {
  for (auto& [i, v] : a.entries)
    if (!approx_eq(v, b.at(i))) return false;
  for (auto& [i, v] : b.entries)
    if (!approx_eq(v, a.at(i))) return false;
  return true;
}

// JSON: {"mode":"exact","entries":{"1":"3/2","4":"-1/1"}}; float entries as numbers.
inline Coeffs coeffs_from_json(const json& j, bool force_float = false) {
  if (!j.is_object() || !j.contains("entries"))
    throw ParseError("coeffs JSON must be an object with an \"entries\" field");
  std::string mode = j.value("mode", "exact");
  if (mode != "exact" && mode != "float") throw ParseError("unknown coeffs mode: " + mode);
  Coeffs c;
  for (auto it = j["entries"].begin(); it != j["entries"].end(); ++it) {
    int idx = 0;
    try {
      idx = std::stoi(it.key());
    } catch (...) {
      throw ParseError("bad coordinate index: " + it.key());
    }
    const json& v = it.value();
    Scalar s;
    if (v.is_string())
      s = Scalar::rat(parse_rat(v.get<std::string>()));
    else if (v.is_number_integer() && mode == "exact")
      s = Scalar(static_cast<long>(v.get<long long>()));
    else if (v.is_number())
      s = Scalar::flt(v.get<double>());
    else
      throw ParseError("coeff entries must be rational strings or numbers");
    if (mode == "float" || force_float) s = Scalar::flt(s.d);
    c.set(idx, s);
  }
  return c;
}

inline ordered_json coeffs_to_json(const Coeffs& c) {
  ordered_json j;
  bool exact = c.all_exact();
  j["mode"] = exact ? "exact" : "float";
  ordered_json entries = ordered_json::object();
  for (auto& [i, v] : c.entries) {
    if (exact)
      entries[std::to_string(i)] = v.q.get_str();
    else
      entries[std::to_string(i)] = v.d;
  }
  j["entries"] = entries;
  return j;
}

// "1,0,-3/2" -> dense coefficients (1-based). Exact unless float_mode.
inline Coeffs coeffs_from_csv(const std::string& s, bool float_mode = false) {
  Coeffs c;
  size_t pos = 0;
  int idx = 1;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) {
      if (float_mode) {
        // Rational literals are still welcome in float mode; plain decimals
        // ("0.5", "1e-3") only make sense here.
        double v;
        if (tok.find('/') != std::string::npos) {
          v = parse_rat(tok).get_d();
        } else {
          char* end = nullptr;
          v = std::strtod(tok.c_str(), &end);
          if (end == tok.c_str() || *end != '\0') throw ParseError("bad number: " + tok);
        }
        c.set(idx, Scalar::flt(v));
      } else {
        c.set(idx, Scalar::rat(parse_rat(tok)));
      }
    }
    ++idx;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return c;
}

// Deterministic random vectors for property tests: rational entries with small
// numerators/denominators, support inside [1, max_index].
inline Coeffs random_rational_coeffs(std::mt19937_64& rng, int max_index, int max_support,
                                     int numerator_bound = 8, int denominator_bound = 4) {
  std::uniform_int_distribution<int> supp_one(1, max_index);
  std::uniform_int_distribution<int> count(1, max_support);
  std::uniform_int_distribution<int> num(-numerator_bound, numerator_bound);
  std::uniform_int_distribution<int> den(1, denominator_bound);
  Coeffs c;
  int k = count(rng);
  for (int t = 0; t < k; ++t) {
    int i = supp_one(rng);
    Rat q(num(rng), den(rng));
    q.canonicalize();
    c.set(i, c.at(i) + Scalar::rat(q));
  }
  return c;
}

}  // namespace banachforge
