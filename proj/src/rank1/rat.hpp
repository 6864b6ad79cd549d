#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace rank1 {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "n" or "n/d" with optional leading '-'.
inline std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto ok_digits = [](const std::string& t) {
    if (t.empty()) return false;
    size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (!ok_digits(s)) return std::nullopt;
      return Rat(Int(s));
    }
    std::string n = s.substr(0, slash), d = s.substr(slash + 1);
    if (!ok_digits(n) || !ok_digits(d)) return std::nullopt;
    Int den(d);
    if (den == 0) return std::nullopt;
    return Rat(Int(n), den);
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace rank1
