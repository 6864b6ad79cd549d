#pragma once

#include "rank1/rat.hpp"

#include <cstdint>
#include <vector>

namespace rank1 {

// Coefficient field used for all subspace computations: the rationals
// (p == 0) or the prime field F_p. Values are Rat; in the modular case the
// canonical representative is an integer in [0, p).
struct Ground {
  std::int64_t p = 0;

  bool is_rational() const { return p == 0; }

  Rat canon(const Rat& x) const;
  bool is_zero(const Rat& x) const { return canon(x) == 0; }
  Rat add(const Rat& a, const Rat& b) const { return canon(a + b); }
  Rat sub(const Rat& a, const Rat& b) const { return canon(a - b); }
  Rat mul(const Rat& a, const Rat& b) const { return canon(a * b); }
  Rat neg(const Rat& a) const { return canon(-a); }
  Rat inv(const Rat& a) const;
  Rat div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }

  bool eq(const Rat& a, const Rat& b) const { return canon(a - b) == 0; }

  // Number of field elements; 0 for the rationals.
  std::int64_t order() const { return p; }

  // All field elements (finite case only).
  std::vector<Rat> elements() const;
};

}  // namespace rank1
