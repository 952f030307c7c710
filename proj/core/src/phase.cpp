#include "sparse_jacobi/phase.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "sparse_jacobi/errors.hpp"

namespace sparse_jacobi {
namespace {

// 2pi split into three doubles, C1 + C2 + C3 accurate to about 2^-160.
constexpr double kC1 = 6.283185307179586232e+00;
constexpr double kC2 = 2.449293598294706430e-16;
constexpr double kC3 = -5.989539619436679332e-33;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int initial_extra_bits() {
  if (const char* env = std::getenv("SPARSE_JACOBI_PRECISION")) {
    try {
      int v = std::stoi(env);
      if (v >= 64 && v <= 4096) return v;
    } catch (const std::exception&) {
    }
  }
  return 128;
}

std::atomic<int>& extra_bits_slot() {
  static std::atomic<int> bits{initial_extra_bits()};
  return bits;
}

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

double residue_mp(const BigInt& k, double phi, int extra) {
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bit_length(k) + 64 + extra);
  MpfrValue x(prec), two_pi(prec), r(prec);
  mpfr_set_d(x.get(), phi, MPFR_RNDN);
  mpfr_mul_z(x.get(), x.get(), k.get_mpz_t(), MPFR_RNDN);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
  mpfr_fmod(r.get(), x.get(), two_pi.get(), MPFR_RNDN);
  if (mpfr_sgn(r.get()) < 0) mpfr_add(r.get(), r.get(), two_pi.get(), MPFR_RNDN);
  double out = mpfr_get_d(r.get(), MPFR_RNDN);
  return out >= kTwoPi ? 0.0 : out;
}

}  // namespace

int phase_extra_bits() { return extra_bits_slot().load(); }
void set_phase_extra_bits(int bits) { extra_bits_slot().store(bits < 64 ? 64 : bits); }

double wrap_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

double reduce_phase(std::uint64_t k, double phi) {
  if (!std::isfinite(phi)) throw DomainError("reduce_phase: non-finite angle");
  if (k >= (std::uint64_t{1} << 50) || std::fabs(phi) > 64.0) return reduce_phase(big(k), phi);
  const double kd = static_cast<double>(k);
  const double p = kd * phi;
  const double e = std::fma(kd, phi, -p);
  const double q = std::nearbyint(p / kC1);
  const double r1 = std::fma(-q, kC1, p);
  const double t_hi = q * kC2;
  const double t_lo = std::fma(q, kC2, -t_hi);
  double r = r1 + (((e - t_hi) - t_lo) - q * kC3);
  if (r < 0) {
    r = (r + kC1) + kC2;
  } else if (r >= kTwoPi) {
    r = (r - kC1) - kC2;
  }
  if (r < 0 || r >= kTwoPi) r = wrap_two_pi(r);
  return r;
}

double reduce_phase_mp(const BigInt& k, double phi, int extra_bits) {
  if (!std::isfinite(phi)) throw DomainError("reduce_phase: non-finite angle");
  if (k < 0) {
    return wrap_two_pi(-reduce_phase_mp(BigInt(-k), phi, extra_bits));
  }
  return residue_mp(k, phi, extra_bits);
}

double reduce_phase(const BigInt& k, double phi) {
  if (k >= 0 && bit_length(k) < 50 && std::fabs(phi) <= 64.0) return reduce_phase(to_u64(k), phi);
  const int extra = phase_extra_bits();
  const double a = reduce_phase_mp(k, phi, extra);
  const double b = reduce_phase_mp(k, phi, extra + 64);
  double d = std::fabs(a - b);
  d = std::min(d, kTwoPi - d);
  if (d > 1e-15) {
    throw PrecisionError("reduce_phase: residue unstable at " + std::to_string(extra) +
                         " guard bits for k with " + std::to_string(bit_length(k)) + " bits");
  }
  return b;
}

}  // namespace sparse_jacobi
