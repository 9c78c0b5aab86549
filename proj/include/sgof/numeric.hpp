#pragma once

#include <cmath>
#include <cstdint>

namespace sgof {

using real = long double;

// C(n, k) in extended precision; zero when k < 0 or k > n.
inline real binom(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0.0L;
  if (k > n - k) k = n - k;
  real r = 1.0L;
  for (long long i = 1; i <= k; ++i) r = r * static_cast<real>(n - k + i) / static_cast<real>(i);
  return r < 1e18L ? std::round(r) : r;
}

// x^e for a non-negative integer exponent; 0^0 = 1.
inline real ipow(real x, long long e) {
  if (e <= 0) return 1.0L;
  real r = 1.0L;
  while (e) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

}  // namespace sgof
