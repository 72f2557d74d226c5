#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace stackyrr {

using BigInt = mpz_class;

/// Exact rational, always in lowest terms with positive denominator.
using Rational = mpq_class;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Floor of a rational as a big integer.
inline BigInt floor_of(const Rational& q) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

/// Non-negative residue of n modulo m > 0.
inline BigInt mod_of(const BigInt& n, const BigInt& m) {
  BigInt out;
  mpz_fdiv_r(out.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
  return out;
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "n", "-n" or "n/d" (decimal). Throws ValidationError on junk.
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  BigInt num;
  BigInt den = 1;
  try {
    if (slash == std::string::npos) {
      if (num.set_str(text, 10) != 0) throw ValidationError("bad integer '" + text + "'");
    } else {
      if (num.set_str(text.substr(0, slash), 10) != 0 || den.set_str(text.substr(slash + 1), 10) != 0)
        throw ValidationError("bad rational '" + text + "'");
    }
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad rational '" + text + "'");
  }
  if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
  return make_rational(num, den);
}

inline std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) throw ResourceError("integer " + z.get_str() + " does not fit in 64 bits");
  return z.get_si();
}

}  // namespace stackyrr
