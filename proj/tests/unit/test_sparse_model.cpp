#include <gtest/gtest.h>
#include <mpfr.h>

#include <cmath>
#include <set>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/sparse_model.hpp"

using namespace sparse_jacobi;
using namespace sparse_jacobi::model;

namespace {

std::vector<BigInt> ints(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

// Oracle for the log-squared family: 2^-400 accurate evaluation of delta^-j exp(c j ln^2 j).
BigInt log_squared_oracle(double c, double delta, int j, double* unrounded_over_rounded) {
  mpfr_t x, l;
  mpfr_init2(x, 1024);
  mpfr_init2(l, 1024);
  mpfr_set_ui(l, static_cast<unsigned long>(j), MPFR_RNDN);
  mpfr_log(l, l, MPFR_RNDN);
  mpfr_sqr(l, l, MPFR_RNDN);
  mpfr_mul_ui(l, l, static_cast<unsigned long>(j), MPFR_RNDN);
  mpfr_mul_d(l, l, c, MPFR_RNDN);
  mpfr_exp(l, l, MPFR_RNDN);
  mpfr_set_d(x, delta, MPFR_RNDN);
  mpfr_pow_si(x, x, -j, MPFR_RNDN);
  mpfr_mul(x, x, l, MPFR_RNDN);
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), x, MPFR_RNDN);
  if (unrounded_over_rounded) {
    mpfr_t y;
    mpfr_init2(y, 1024);
    mpfr_set_z(y, out.get_mpz_t(), MPFR_RNDN);
    mpfr_div(y, y, x, MPFR_RNDN);
    *unrounded_over_rounded = mpfr_get_d(y, MPFR_RNDN);
    mpfr_clear(y);
  }
  mpfr_clear(x);
  mpfr_clear(l);
  return out;
}

}  // namespace

TEST(SparseModel, ExponentialIncrementsAndPositions) {
  SparsenessSpec spec{Exponential{3.0}, 3};
  EXPECT_EQ(build_increments(spec), ints({3, 9, 27}));
  EXPECT_EQ(build_positions(spec), ints({3, 12, 39}));
}

TEST(SparseModel, ExplicitCumulativeSum) {
  SparsenessSpec spec{Explicit{ints({2, 2, 2})}, 3};
  EXPECT_EQ(build_positions(spec), ints({2, 4, 6}));
}

TEST(SparseModel, LogSquaredFourthIncrementMatchesHighPrecision) {
  SparsenessSpec spec{LogSquared{1.0, 0.5}, 4};
  const auto inc = build_increments(spec);
  // frozen: 2^4 exp(4 ln^2 4) = 34885.8626664004...
  EXPECT_EQ(inc[3], BigInt(34886));
  EXPECT_EQ(inc[3], log_squared_oracle(1.0, 0.5, 4, nullptr));
}

TEST(SparseModel, LogSquaredGapLaw) {
  SparsenessSpec spec{LogSquared{1.0, 0.5}, 30};
  const auto inc = build_increments(spec);
  for (int j = 1; j <= 30; ++j) {
    double oracle_ratio = 0.0;
    const BigInt oracle = log_squared_oracle(1.0, 0.5, j, &oracle_ratio);
    const BigInt expected = oracle < 2 ? BigInt(2) : oracle;
    ASSERT_EQ(inc[static_cast<std::size_t>(j - 1)], expected) << j;
    const double ratio = increment_rounding_ratio(spec, j);
    // rounding to an integer moves the ratio by at most 1/(2 beta_j)
    const double tol = std::max(1e-9, 0.5 / inc[static_cast<std::size_t>(j - 1)].get_d());
    EXPECT_NEAR(ratio, 1.0, tol) << j;
    if (expected > 2) EXPECT_NEAR(ratio, oracle_ratio, 1e-15) << j;
  }
}

TEST(SparseModel, LogSquaredGrowsPast64Bits) {
  SparsenessSpec spec{LogSquared{1.0, 0.5}, 20};
  const auto pos = build_positions(spec);
  EXPECT_GT(bit_length(pos.back()), 64u);
}

TEST(SparseModel, DeltaViolationRejected) {
  SparsenessSpec spec{LogSquared{0.001, 0.9}, 5};
  EXPECT_THROW(build_increments(spec), ConfigError);
}

TEST(SparseModel, FactorialRatiosRespectDelta) {
  SparsenessSpec spec{Factorial{0.5, 0.25}, 8};
  const auto inc = build_increments(spec);
  for (std::size_t j = 1; j < inc.size(); ++j)
    EXPECT_LE(inc[j - 1].get_d() / inc[j].get_d(), 0.25 + 1e-15);
}

TEST(SparseModel, InvalidFamiliesRejected) {
  EXPECT_THROW(build_increments({Exponential{1.0}, 3}), ConfigError);
  EXPECT_THROW(build_increments({LogSquared{-1.0, 0.5}, 3}), ConfigError);
  EXPECT_THROW(build_increments({LogSquared{1.0, 1.0}, 3}), ConfigError);
  EXPECT_THROW(build_increments({Explicit{ints({2, 0})}, 2}), ConfigError);
  EXPECT_THROW(build_increments({Explicit{ints({2, 3})}, 3}), ConfigError);
  EXPECT_THROW(build_positions({Explicit{ints({4, 1})}, 2}), ConfigError);
}

TEST(SparseModel, OffsetsDeterministicAndBounded) {
  SparsenessSpec spec{Exponential{4.0}, 10, true, 1234};
  const auto a = build_positions(spec);
  const auto b = build_positions(spec);
  EXPECT_EQ(a, b);
  const auto offsets = build_offsets(spec);
  for (int j = 1; j <= 10; ++j) {
    EXPECT_LE(std::labs(offsets[static_cast<std::size_t>(j - 1)]), j);
  }
  BigInt prev = 0;
  for (const auto& x : a) {
    EXPECT_GE(x - prev, 2);
    prev = x;
  }
  spec.seed = 99;
  EXPECT_NE(build_offsets(spec), offsets);
}

TEST(SparseModel, OffsetsCoverFullRange) {
  SparsenessSpec spec{Exponential{4.0}, 3, true, 0};
  std::set<long> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    spec.seed = s;
    seen.insert(build_offsets(spec)[2]);
  }
  EXPECT_EQ(seen, (std::set<long>{-3, -2, -1, 0, 1, 2, 3}));
}

TEST(SparseModel, CouplingLookup) {
  const auto pos = ints({3, 12, 39});
  EXPECT_EQ(coupling_at(pos[0], pos, 0.4), 0.4);
  EXPECT_EQ(coupling_at(BigInt(39), pos, 0.4), 0.4);
  EXPECT_EQ(coupling_at(BigInt(4), pos, 0.4), 1.0);
  EXPECT_EQ(coupling_at(BigInt(0), pos, 0.4), 1.0);
  EXPECT_THROW(coupling_at(BigInt(-1), pos, 0.4), DomainError);
}

TEST(SparseModel, RFactor) {
  for (double l : {-1.5, 0.0, 0.3, 1.9}) EXPECT_DOUBLE_EQ(r_factor(1.0, l), 1.0);
  EXPECT_DOUBLE_EQ(theta_p(0.5), 9.0 / 4.0);
  EXPECT_DOUBLE_EQ(r_factor(0.5, 0.0), 25.0 / 16.0);
  double prev = 0.0;
  for (double l = 1.0; l < 2.0; l += 0.01) {
    const double r = r_factor(0.5, l);
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_GT(r_factor(0.5, 2.0 - 1e-9), 1e8);
  EXPECT_THROW(r_factor(0.5, 2.0), DomainError);
  EXPECT_THROW(r_factor(0.5, -2.5), DomainError);
  for (double p = 0.05; p < 0.93; p += 0.05) EXPECT_GT(r_factor(p, 0.7), r_factor(p + 0.05, 0.7));
}

TEST(SparseModel, HausdorffDimension) {
  EXPECT_DOUBLE_EQ(hausdorff_dim(1.0, 3.0, 0.5), 1.0);
  EXPECT_NEAR(hausdorff_dim(0.5, 25.0 / 16.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(hausdorff_dim(0.5, (25.0 / 16.0) * (25.0 / 16.0), 0.0), 0.5, 1e-15);
  EXPECT_THROW(hausdorff_dim(0.5, 1.0, 0.0), DomainError);
  for (double lambda : {-1.2, 0.0, 1.5}) {
    for (double p = 0.1; p < 1.0; p += 0.1) {
      for (double beta = 1.5; beta < 40.0; beta *= 1.7) {
        const double a = hausdorff_dim(p, beta, lambda);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
        EXPECT_LE(a, hausdorff_dim(std::min(1.0, p + 0.1), beta, lambda) + 1e-15);
        EXPECT_LE(a, hausdorff_dim(p, beta * 1.7, lambda) + 1e-15);
      }
    }
  }
}

TEST(SparseModel, ModelTruncationIndices) {
  SparseModel m(ints({3, 12, 39}), 0.5);
  EXPECT_EQ(m.truncation(0), BigInt(1));
  EXPECT_EQ(m.truncation(2), BigInt(13));
  EXPECT_EQ(m.gaps()[2], BigInt(27));
  EXPECT_THROW(SparseModel(ints({3, 4}), 0.5), ConfigError);
  EXPECT_THROW(SparseModel(ints({3}), 0.0), DomainError);
}
