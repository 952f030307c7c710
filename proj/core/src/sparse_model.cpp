#include "sparse_jacobi/sparse_model.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "sparse_jacobi/errors.hpp"

namespace sparse_jacobi::model {
namespace {

constexpr double kMaxLog2Increment = 1 << 20;

class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mp() { mpfr_clear(v_); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void validate_family(const Family& family) {
  std::visit(Overloaded{
                 [](const Exponential& f) {
                   if (!(f.beta > 1.0)) throw ConfigError("family.beta must be > 1");
                 },
                 [](const LogSquared& f) {
                   if (!(f.c > 0.0)) throw ConfigError("family.c must be > 0");
                   if (!(f.delta > 0.0 && f.delta < 1.0))
                     throw ConfigError("family.delta must lie in (0, 1)");
                 },
                 [](const Factorial& f) {
                   if (!(f.epsilon > 0.0)) throw ConfigError("family.epsilon must be > 0");
                   if (!(f.delta > 0.0 && f.delta < 1.0))
                     throw ConfigError("family.delta must lie in (0, 1)");
                 },
                 [](const Explicit& f) {
                   for (std::size_t i = 0; i < f.increments.size(); ++i)
                     if (f.increments[i] <= 0)
                       throw ConfigError("family.increments[" + std::to_string(i) +
                                         "] must be a positive integer");
                 },
             },
             family);
}

// Unrounded family value x_j written into out (initialized by caller at a suitable precision).
void family_value(const Family& family, int j, mpfr_ptr out) {
  const mpfr_prec_t prec = mpfr_get_prec(out);
  Mp t(prec), u(prec);
  std::visit(Overloaded{
                 [&](const Exponential& f) {
                   mpfr_set_d(out, f.beta, MPFR_RNDN);
                   mpfr_pow_ui(out, out, static_cast<unsigned long>(j), MPFR_RNDN);
                 },
                 [&](const LogSquared& f) {
                   // -j ln(delta) + c j ln(j)^2
                   mpfr_set_d(t.get(), f.delta, MPFR_RNDN);
                   mpfr_log(t.get(), t.get(), MPFR_RNDN);
                   mpfr_mul_si(t.get(), t.get(), -j, MPFR_RNDN);
                   mpfr_set_si(u.get(), j, MPFR_RNDN);
                   mpfr_log(u.get(), u.get(), MPFR_RNDN);
                   mpfr_sqr(u.get(), u.get(), MPFR_RNDN);
                   mpfr_mul_si(u.get(), u.get(), j, MPFR_RNDN);
                   mpfr_mul_d(u.get(), u.get(), f.c, MPFR_RNDN);
                   mpfr_add(t.get(), t.get(), u.get(), MPFR_RNDN);
                   mpfr_exp(out, t.get(), MPFR_RNDN);
                 },
                 [&](const Factorial& f) {
                   // -j ln(delta) + j ln(j) / epsilon
                   mpfr_set_d(t.get(), f.delta, MPFR_RNDN);
                   mpfr_log(t.get(), t.get(), MPFR_RNDN);
                   mpfr_mul_si(t.get(), t.get(), -j, MPFR_RNDN);
                   mpfr_set_si(u.get(), j, MPFR_RNDN);
                   mpfr_log(u.get(), u.get(), MPFR_RNDN);
                   mpfr_mul_si(u.get(), u.get(), j, MPFR_RNDN);
                   mpfr_div_d(u.get(), u.get(), f.epsilon, MPFR_RNDN);
                   mpfr_add(t.get(), t.get(), u.get(), MPFR_RNDN);
                   mpfr_exp(out, t.get(), MPFR_RNDN);
                 },
                 [&](const Explicit& f) {
                   mpfr_set_z(out, f.increments.at(static_cast<std::size_t>(j - 1)).get_mpz_t(),
                              MPFR_RNDN);
                 },
             },
             family);
}

mpfr_prec_t precision_for(const Family& family, int j) {
  const double log2 = log_increment(family, j) / std::log(2.0);
  if (log2 > kMaxLog2Increment)
    throw ConfigError("increment " + std::to_string(j) + " exceeds the supported integer width");
  return static_cast<mpfr_prec_t>(std::max(0.0, log2)) + 160;
}

BigInt rounded_increment(const Family& family, int j) {
  if (const auto* f = std::get_if<Explicit>(&family)) return f->increments.at(j - 1);
  Mp x(precision_for(family, j));
  family_value(family, j, x.get());
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), x.get(), MPFR_RNDN);
  if (out < 2) out = 2;
  return out;
}

std::optional<double> family_delta(const Family& family) {
  if (const auto* f = std::get_if<LogSquared>(&family)) return f->delta;
  if (const auto* f = std::get_if<Factorial>(&family)) return f->delta;
  return std::nullopt;
}

}  // namespace

std::string family_name(const Family& family) {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const LogSquared&) { return std::string("log_squared"); },
                        [](const Factorial&) { return std::string("factorial"); },
                        [](const Explicit&) { return std::string("explicit"); },
                    },
                    family);
}

double log_increment(const Family& family, int j) {
  if (j < 1) throw DomainError("increment index starts at 1");
  const double jd = j;
  return std::visit(Overloaded{
                        [&](const Exponential& f) { return jd * std::log(f.beta); },
                        [&](const LogSquared& f) {
                          const double l = std::log(jd);
                          return -jd * std::log(f.delta) + f.c * jd * l * l;
                        },
                        [&](const Factorial& f) {
                          return -jd * std::log(f.delta) + jd * std::log(jd) / f.epsilon;
                        },
                        [&](const Explicit& f) {
                          const BigInt& b = f.increments.at(static_cast<std::size_t>(j - 1));
                          long exp2 = 0;
                          const double m = mpz_get_d_2exp(&exp2, b.get_mpz_t());
                          return std::log(m) + static_cast<double>(exp2) * std::log(2.0);
                        },
                    },
                    family);
}

std::vector<BigInt> build_increments(const SparsenessSpec& spec) {
  validate_family(spec.family);
  if (spec.j_max < 1) throw ConfigError("j_max must be a positive integer");
  if (const auto* f = std::get_if<Explicit>(&spec.family)) {
    if (static_cast<std::size_t>(spec.j_max) > f->increments.size())
      throw ConfigError("j_max exceeds the number of explicit increments");
  }
  std::vector<BigInt> out;
  out.reserve(static_cast<std::size_t>(spec.j_max));
  for (int j = 1; j <= spec.j_max; ++j) out.push_back(rounded_increment(spec.family, j));

  if (auto delta = family_delta(spec.family)) {
    for (int j = 2; j <= spec.j_max; ++j) {
      const BigInt& prev = out[static_cast<std::size_t>(j - 2)];
      const BigInt& cur = out[static_cast<std::size_t>(j - 1)];
      Mp lhs(static_cast<mpfr_prec_t>(bit_length(cur) + 64));
      mpfr_set_z(lhs.get(), cur.get_mpz_t(), MPFR_RNDN);
      mpfr_mul_d(lhs.get(), lhs.get(), *delta, MPFR_RNDN);
      if (mpfr_cmp_z(lhs.get(), prev.get_mpz_t()) < 0)
        throw ConfigError("increment ratio beta_" + std::to_string(j - 1) + "/beta_" +
                          std::to_string(j) + " exceeds delta");
    }
  }
  return out;
}

double increment_rounding_ratio(const SparsenessSpec& spec, int j) {
  validate_family(spec.family);
  const BigInt b = rounded_increment(spec.family, j);
  const mpfr_prec_t prec = precision_for(spec.family, j);
  Mp x(prec), y(prec);
  family_value(spec.family, j, x.get());
  mpfr_set_z(y.get(), b.get_mpz_t(), MPFR_RNDN);
  mpfr_div(y.get(), y.get(), x.get(), MPFR_RNDN);
  return mpfr_get_d(y.get(), MPFR_RNDN);
}

std::vector<long> build_offsets(const SparsenessSpec& spec) {
  std::vector<long> out(static_cast<std::size_t>(std::max(spec.j_max, 0)), 0);
  if (!spec.random_offsets) return out;
  std::mt19937_64 rng(spec.seed);
  for (int j = 1; j <= spec.j_max; ++j) {
    std::uniform_int_distribution<long> dist(-j, j);
    out[static_cast<std::size_t>(j - 1)] = dist(rng);
  }
  return out;
}

std::vector<BigInt> build_positions(const SparsenessSpec& spec) {
  const auto increments = build_increments(spec);
  const auto offsets = build_offsets(spec);
  std::vector<BigInt> out;
  out.reserve(increments.size());
  BigInt a = 0;
  BigInt prev = 0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    a += increments[i];
    BigInt shifted = a + offsets[i];
    if (shifted - prev < 2)
      throw ConfigError("barrier " + std::to_string(i + 1) +
                        " lies closer than 2 sites to its predecessor");
    out.push_back(shifted);
    prev = shifted;
  }
  return out;
}

double coupling_at(const BigInt& n, std::span<const BigInt> positions, double p) {
  if (n < 0) throw DomainError("coupling_at: lattice index must be >= 0");
  return std::binary_search(positions.begin(), positions.end(), n) ? p : 1.0;
}

double theta_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  const double q = 1.0 - p * p;
  return q * q / (p * p);
}

double r_factor(double p, double lambda) {
  if (!(std::fabs(lambda) < 2.0)) throw DomainError("r_factor: |lambda| must be < 2");
  return 1.0 + theta_p(p) / (4.0 - lambda * lambda);
}

double hausdorff_dim(double p, double beta, double lambda) {
  if (!(beta > 1.0)) throw DomainError("hausdorff_dim: beta must be > 1");
  const double r = r_factor(p, lambda);
  return std::clamp(1.0 - std::log(r) / std::log(beta), 0.0, 1.0);
}

SparseModel::SparseModel(std::vector<BigInt> positions, double p)
    : positions_(std::move(positions)), p_(p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  BigInt prev = 0;
  gaps_.reserve(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    BigInt gap = positions_[i] - prev;
    if (gap < 2)
      throw ConfigError("positions[" + std::to_string(i) + "] must exceed its predecessor by 2");
    gaps_.push_back(gap);
    prev = positions_[i];
  }
}

SparseModel::SparseModel(const SparsenessSpec& spec, double p)
    : SparseModel(build_positions(spec), p) {}

BigInt SparseModel::truncation(int j) const {
  if (j < 0 || j > barrier_count()) throw DomainError("truncation index out of range");
  return j == 0 ? BigInt(1) : BigInt(positions_[static_cast<std::size_t>(j - 1)] + 1);
}

}  // namespace sparse_jacobi::model
