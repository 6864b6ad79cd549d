#include "rank1/ground.hpp"

#include <stdexcept>

namespace rank1 {

Rat Ground::canon(const Rat& x) const {
  if (p == 0) return x;
  Int num = numerator(x), den = denominator(x);
  Int pp(p);
  Int n = num % pp;
  if (n < 0) n += pp;
  if (den != 1) {
    Int d = den % pp;
    if (d < 0) d += pp;
    if (d == 0) throw std::domain_error("denominator divisible by modulus");
    // modular inverse of d via Fermat
    Int r = 1, base = d, e = pp - 2;
    while (e > 0) {
      if ((e & 1) != 0) r = (r * base) % pp;
      base = (base * base) % pp;
      e >>= 1;
    }
    n = (n * r) % pp;
  }
  return Rat(n);
}

Rat Ground::inv(const Rat& a) const {
  Rat c = canon(a);
  if (c == 0) throw std::domain_error("inverse of zero");
  if (p == 0) return Rat(1) / c;
  return canon(Rat(1, numerator(c)));
}

std::vector<Rat> Ground::elements() const {
  if (p == 0) throw std::domain_error("rationals are not enumerable");
  std::vector<Rat> out;
  out.reserve(static_cast<size_t>(p));
  for (std::int64_t i = 0; i < p; ++i) out.emplace_back(i);
  return out;
}

}  // namespace rank1
