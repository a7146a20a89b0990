#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace nwsf {

// Exact rational number. All weights, distances and fractional LP values are
// kept exact; doubles appear only where a value meets a sampled threshold.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Every finite double is a dyadic rational, so this conversion is exact.
inline Rat rat_from_double(double x) { return Rat(x); }

inline double to_double(const Rat& r) { return r.get_d(); }

// 2^e for any integer e; negative exponents give dyadic fractions.
inline Rat pow2(long e) {
  Rat r(1);
  if (e >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

// Smallest integer j with v <= 2^j. Requires v > 0.
inline long ceil_log2(const Rat& v) {
  long guess = static_cast<long>(mpz_sizeinbase(v.get_num_mpz_t(), 2)) -
               static_cast<long>(mpz_sizeinbase(v.get_den_mpz_t(), 2));
  while (v <= pow2(guess - 1)) --guess;
  while (v > pow2(guess)) ++guess;
  return guess;
}

// Smallest power of two >= v (as a Rat). Requires v > 0.
inline Rat ceil_pow2(const Rat& v) { return pow2(ceil_log2(v)); }

// Optional-as-infinity convention: an empty value means +infinity.
using MaybeRat = std::optional<Rat>;

inline bool lt_inf(const MaybeRat& a, const MaybeRat& b) {
  if (!b) return a.has_value();
  if (!a) return false;
  return *a < *b;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace nwsf
