#pragma once

// Exact integer/rational arithmetic used by the counting machinery. The
// comparisons against 1/6 and the two-stage uniformity equalities must not
// hinge on float rounding, so everything counting-critical flows through
// these types.

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace paclab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt big_pow(uint64_t base, uint32_t exp) {
  BigInt r = 1;
  BigInt b = base;
  while (exp) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

// m (m-1) ... (m-k+1); equals m!/(m-k)!. Zero when k > m.
inline BigInt falling_factorial(uint64_t m, uint64_t k) {
  if (k > m) return 0;
  BigInt r = 1;
  for (uint64_t i = 0; i < k; ++i) r *= m - i;
  return r;
}

inline BigInt binomial_big(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (uint64_t i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;  // exact at every step
  }
  return r;
}

inline double to_double(const BigRational& q) {
  return static_cast<double>(q);
}

}  // namespace paclab
