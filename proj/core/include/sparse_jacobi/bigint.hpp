#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace sparse_jacobi {

using BigInt = mpz_class;

inline BigInt big(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return r;
}

inline std::size_t bit_length(const BigInt& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline bool fits_u64(const BigInt& v) { return v >= 0 && bit_length(v) <= 64; }

inline std::uint64_t to_u64(const BigInt& v) {
  std::uint64_t out = 0;
  std::size_t count = 0;
  mpz_export(&out, &count, 1, sizeof(out), 0, 0, v.get_mpz_t());
  return count == 0 ? 0 : out;
}

inline std::string to_string(const BigInt& v) { return v.get_str(10); }

}  // namespace sparse_jacobi
