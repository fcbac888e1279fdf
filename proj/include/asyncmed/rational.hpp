#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace asyncmed {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

inline Rational frac(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "3", "-3/4", "1.1", "0.05".
Rational parse_rational(const std::string& text);

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace asyncmed
