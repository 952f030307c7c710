#pragma once

#include <cstdint>

#include "sparse_jacobi/bigint.hpp"

namespace sparse_jacobi {

// k * phi reduced to [0, 2pi). phi is taken as an exact binary number, so the result is the
// correctly rounded residue of the exact product. Integer k below 2^50 use a compensated
// Cody-Waite path; anything larger goes through MPFR with a guard recomputation.
double reduce_phase(std::uint64_t k, double phi);
double reduce_phase(const BigInt& k, double phi);

// Same, always through MPFR with the given extra working bits. Used as an oracle.
double reduce_phase_mp(const BigInt& k, double phi, int extra_bits = 128);

// Bits of working precision currently requested for the MPFR path (env SPARSE_JACOBI_PRECISION).
int phase_extra_bits();
void set_phase_extra_bits(int bits);

double wrap_two_pi(double x);

}  // namespace sparse_jacobi
