#include <gtest/gtest.h>
#include <mpfr.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/phase.hpp"

using sparse_jacobi::BigInt;
using sparse_jacobi::reduce_phase;
using sparse_jacobi::reduce_phase_mp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, kTwoPi - d);
}

// Oracle: exact product k * phi, reduced with a 4096-bit value of 2pi.
double reference_residue(const BigInt& k, double phi) {
  mpfr_t x, tp;
  mpfr_init2(x, 4096);
  mpfr_init2(tp, 4096);
  mpfr_set_d(x, phi, MPFR_RNDN);
  mpfr_mul_z(x, x, k.get_mpz_t(), MPFR_RNDN);
  mpfr_const_pi(tp, MPFR_RNDN);
  mpfr_mul_ui(tp, tp, 2, MPFR_RNDN);
  mpfr_div(x, x, tp, MPFR_RNDN);
  mpfr_frac(x, x, MPFR_RNDN);
  if (mpfr_sgn(x) < 0) mpfr_add_ui(x, x, 1, MPFR_RNDN);
  mpfr_mul(x, x, tp, MPFR_RNDN);
  const double out = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  mpfr_clear(tp);
  return out;
}

}  // namespace

TEST(Phase, ZeroMultiplier) { EXPECT_EQ(reduce_phase(std::uint64_t{0}, 1.3), 0.0); }

TEST(Phase, SmallMultipliersMatchDirectProduct) {
  for (int k = 1; k < 50; ++k) {
    const double phi = 0.37;
    EXPECT_NEAR(circular_distance(reduce_phase(std::uint64_t(k), phi), std::fmod(k * phi, kTwoPi)),
                0.0, 1e-14);
  }
}

TEST(Phase, FastPathAgreesWithReference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phi_dist(1e-3, std::numbers::pi - 1e-3);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t k = rng() >> (14 + i % 40);
    const double phi = phi_dist(rng);
    const double fast = reduce_phase(k, phi);
    ASSERT_GE(fast, 0.0);
    ASSERT_LT(fast, kTwoPi);
    ASSERT_LT(circular_distance(fast, reference_residue(sparse_jacobi::big(k), phi)), 4e-15)
        << "k=" << k << " phi=" << phi;
  }
}

TEST(Phase, HugeMultipliersAgreeWithReference) {
  std::mt19937_64 rng(11);
  for (int bits : {60, 64, 100, 300, 1000}) {
    BigInt k = 1;
    k <<= bits;
    k += BigInt(static_cast<unsigned long>(rng() >> 1));
    for (double phi : {0.1, 1.0, 2.5, std::numbers::pi / 3}) {
      const double r = reduce_phase(k, phi);
      EXPECT_LT(circular_distance(r, reference_residue(k, phi)), 1e-15) << bits;
    }
  }
}

TEST(Phase, GuardBitsAgree) {
  BigInt k = 3;
  mpz_pow_ui(k.get_mpz_t(), k.get_mpz_t(), 400);
  EXPECT_LT(circular_distance(reduce_phase_mp(k, 0.7, 64), reduce_phase_mp(k, 0.7, 512)), 1e-15);
}

TEST(Phase, NonFiniteAngleRejected) {
  EXPECT_THROW(reduce_phase(std::uint64_t{3}, std::nan("")), sparse_jacobi::DomainError);
}
