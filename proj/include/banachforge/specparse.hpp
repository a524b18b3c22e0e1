#pragma once

// Textual space specifications and JSON configs. Grammar:
//   lp:P | linf | linf:D | bv1 | summing-c | jp:P
//   james(SPEC) | variation(SPEC) | double(SPEC)
//   tsirelson(FAMILY, THETA)
//   mixed(m=4,16; n=16,64; l=3n[; mode=compliant])
// FAMILY strings are handled by parse_family; THETA is a rational like 1/2.

#include <memory>
#include <string>

#include "banachforge/james.hpp"
#include "banachforge/tsirelson.hpp"
#include "banachforge/utcsum.hpp"

namespace banachforge {

namespace detail {

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Split on `sep` at paren depth zero.
inline std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(strip(cur));
  return out;
}

inline double parse_exponent(const std::string& s) {
  if (s == "inf") return -1;  // sentinel for l_inf
  try {
    size_t pos = 0;
    double p = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("bad exponent: " + s);
    return p;
  } catch (ParseError&) {
    throw;
  } catch (...) {
    throw ParseError("bad exponent: " + s);
  }
}

}  // namespace detail

inline NormOracle make_oracle(const std::string& text_in);

inline MixedParams parse_mixed_args(const std::string& inside) {
  MixedParams p;
  bool saw_m = false, saw_n = false;
  for (auto& field : detail::split_top(inside, ';')) {
    auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError("mixed fields look like key=value: " + field);
    std::string key = detail::strip(field.substr(0, eq));
    std::string val = detail::strip(field.substr(eq + 1));
    if (key == "m" || key == "n") {
      std::vector<Int> seq;
      for (auto& tok : detail::split_top(val, ',')) {
        try {
          seq.emplace_back(tok);
        } catch (...) {
          throw ParseError("bad ladder entry: " + tok);
        }
      }
      (key == "m" ? p.m : p.n) = seq;
      (key == "m" ? saw_m : saw_n) = true;
    } else if (key == "l") {
      if (val == "3n")
        p.l_is_4n = false;
      else if (val == "4n")
        p.l_is_4n = true;
      else
        throw ParseError("l must be 3n or 4n");
    } else if (key == "mode") {
      if (val == "compliant")
        p.compliant = true;
      else if (val == "toy")
        p.compliant = false;
      else
        throw ParseError("mode must be toy or compliant");
    } else {
      throw ParseError("unknown mixed field: " + key);
    }
  }
  if (!saw_m || !saw_n) throw ParseError("mixed needs both m= and n= ladders");
  p.validate();
  return p;
}

inline TsirelsonSpec parse_tsirelson_args(const std::string& inside) {
  auto parts = detail::split_top(inside, ',');
  if (parts.size() != 2) throw ParseError("tsirelson(FAMILY, THETA) takes two arguments");
  TsirelsonSpec spec;
  spec.family = parse_family(parts[0]);
  spec.theta = parse_rat(parts[1]);
  if (!(spec.theta > 0 && spec.theta < 1)) throw ParseError("theta must lie in (0,1)");
  return spec;
}

inline NormOracle make_oracle(const std::string& text_in) {
  std::string text = detail::strip(text_in);
  if (text.empty()) throw ParseError("empty space spec");
  auto paren = text.find('(');
  if (paren != std::string::npos && text.back() == ')') {
    std::string head = text.substr(0, paren);
    std::string inside = text.substr(paren + 1, text.size() - paren - 2);
    if (head == "james" || head == "variation") {
      NormOracle inner = make_oracle(inside);
      NormOracle o;
      o.name = head + "(" + inner.name + ")";
      o.unconditional = false;
      o.normalized = true;
      o.coord_dual_le_1 = true;  // the singleton family recovers |a_k|
      o.bimonotone_constant = head == "james" ? Scalar(1) : Scalar(2);
      if (head == "james")
        o.eval = [inner](const Coeffs& c) { return norm_jamesification(inner, c); };
      else
        o.eval = [inner](const Coeffs& c) { return norm_variation(inner, c); };
      return o;
    }
    if (head == "double") {
      return make_double(make_oracle(inside));
    }
    if (head == "tsirelson") {
      auto spec = std::make_shared<TsirelsonSpec>(parse_tsirelson_args(inside));
      NormOracle o;
      o.name = "tsirelson(" + spec->family.text + "," + spec->theta.get_str() + ")";
      o.unconditional = true;
      o.normalized = true;
      o.coord_dual_le_1 = true;
      o.eval = [spec](const Coeffs& c) { return norm_tsirelson(*spec, c); };
      return o;
    }
    if (head == "mixed") {
      auto params = std::make_shared<MixedParams>(parse_mixed_args(inside));
      NormOracle o;
      o.name = "mixed(" + inside + ")";
      o.unconditional = true;
      o.normalized = true;
      o.coord_dual_le_1 = true;
      o.eval = [params](const Coeffs& c) { return norm_mixed(*params, c); };
      return o;
    }
    throw ParseError("unknown space constructor: " + head);
  }
  auto colon = text.find(':');
  std::string head = colon == std::string::npos ? text : text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "lp") {
    if (arg.empty()) throw ParseError("lp needs an exponent, e.g. lp:2");
    double p = detail::parse_exponent(arg);
    if (p < 0) return make_linf();
    return make_lp(p);
  }
  if (head == "linf") {
    if (arg.empty()) return make_linf();
    int d = 0;
    try {
      size_t pos = 0;
      d = std::stoi(arg, &pos);
      if (pos != arg.size()) throw ParseError("");
    } catch (...) {
      throw ParseError("bad linf dimension: " + arg);
    }
    if (d < 1) throw ParseError("linf dimension must be >= 1");
    return make_linf(d);
  }
  if (head == "bv1" && arg.empty()) return make_bv1();
  if (head == "summing-c" && arg.empty()) return make_summing_c();
  if (head == "jp") {
    if (arg.empty()) throw ParseError("jp needs an exponent, e.g. jp:2");
    double p = detail::parse_exponent(arg);
    if (p < 0) throw ParseError("jp exponent must be finite");
    NormOracle o;
    o.name = "jp:" + arg;
    o.unconditional = false;
    o.normalized = true;
    o.coord_dual_le_1 = true;
    o.bimonotone_constant = Scalar(1);  // trimming an interval family stays a family
    o.lp_p = 0;
    o.eval = [p](const Coeffs& c) { return norm_jp(p, c); };
    return o;
  }
  throw ParseError("unknown space spec: " + text);
}

// Tower config JSON: {"outer": SPEC, "A0": number|rational string,
//                     "inner": {"default": SPEC, "<k>": SPEC, ...}}
inline UtcConfig utc_config_from_json(const json& j) {
  if (!j.is_object() || !j.contains("outer")) throw ParseError("tower config needs an outer space");
  UtcConfig cfg;
  cfg.outer = make_oracle(j.at("outer").get<std::string>());
  if (j.contains("A0")) {
    const auto& a = j.at("A0");
    if (a.is_number_integer())
      cfg.A0 = Scalar(a.get<long>());
    else if (a.is_number())
      cfg.A0 = Scalar::flt(a.get<double>());
    else
      cfg.A0 = Scalar::rat(parse_rat(a.get<std::string>()));
  } else {
    cfg.A0 = cfg.outer.bimonotone_constant;
  }
  std::string def = "linf:16";
  std::map<int, std::string> overrides;
  if (j.contains("inner")) {
    for (auto it = j.at("inner").begin(); it != j.at("inner").end(); ++it) {
      if (it.key() == "default")
        def = it.value().get<std::string>();
      else
        overrides[std::stoi(it.key())] = it.value().get<std::string>();
    }
  }
  cfg.inner_desc = def;
  cfg.inner_for = [def, overrides](int k) {
    auto it = overrides.find(k);
    return make_oracle(it == overrides.end() ? def : it->second);
  };
  return cfg;
}

}  // namespace banachforge
