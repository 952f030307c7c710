#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>

#include "sparse_jacobi/gevrey_calculus.hpp"
#include "sparse_jacobi/phase.hpp"
#include "sparse_jacobi/prufer_transfer.hpp"
#include "sparse_jacobi/taylor_jet.hpp"

using namespace sparse_jacobi;
using namespace sparse_jacobi::gevrey;
using jet::Jet;
using jet::JetL;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<BigInt> ints(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

long double binom(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// n-th central difference divided by h^n n!, with `levels` Richardson steps (error O(h^(2 levels + 2))).
long double fd_coeff(const std::function<long double(long double)>& f, long double x, int n, long double h,
                     int levels = 2) {
  auto D = [&](long double s) {
    long double acc = 0;
    for (int k = 0; k <= n; ++k)
      acc += ((k % 2) ? -1 : 1) * binom(n, k) * f(x + (n / 2.0L - k) * s);
    return acc / std::pow(s, n);
  };
  std::vector<long double> t;
  for (int i = 0; i <= levels; ++i) t.push_back(D(h / std::pow(2.0L, i)));
  for (int l = 1; l <= levels; ++l) {
    const long double w = std::pow(4.0L, l);
    for (int i = levels; i >= l; --i) t[i] = (w * t[i] - t[i - 1]) / (w - 1);
  }
  return t[levels] / std::tgamma(static_cast<long double>(n) + 1);
}

void expect_rel(double got, double want, double rel, const std::string& what) {
  EXPECT_LE(std::fabs(got - want), rel * std::max(1.0, std::fabs(want))) << what << " got " << got << " want " << want;
}

// positions a_j from increments beta_j
std::vector<BigInt> from_increments(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  long a = 0;
  for (long x : xs) out.emplace_back(a += x);
  return out;
}

Jet poly_jet(double base, std::vector<double> c) { return Jet(base, std::move(c)); }

}  // namespace

TEST(TaylorJet, ReciprocalMatchesClosedForm) {
  const auto x = Jet::variable(2.0, 5);
  const auto r = 1.0 / x;
  EXPECT_DOUBLE_EQ(r[3], -1.0 / 16.0);
  const auto series = reciprocal_series(2.0, 5);
  for (int k = 0; k <= 5; ++k) EXPECT_DOUBLE_EQ(r[k], series[static_cast<std::size_t>(k)]);
}

TEST(TaylorJet, TimesReciprocalIsOne) {
  const auto x = Jet::variable(0.37, 9);
  const auto one = x * (1.0 / x);
  EXPECT_NEAR(one[0], 1.0, 1e-15);
  for (int k = 1; k <= 9; ++k) EXPECT_NEAR(one[k], 0.0, 1e-13);
}

TEST(TaylorJet, ProductRuleAgainstFiniteDifferences) {
  const double x0 = 1.3;
  const auto x = Jet::variable(x0, 4);
  const auto x2 = x * x;
  const auto x3 = x2 * x;
  for (int k = 1; k <= 3; ++k) {
    const long double d2 = fd_coeff([](long double t) { return t * t; }, x0, k, 1e-2L);
    const long double d3 = fd_coeff([](long double t) { return t * t * t; }, x0, k, 1e-2L);
    expect_rel(x2[k], static_cast<double>(d2), 1e-9, "x^2 order " + std::to_string(k));
    expect_rel(x3[k], static_cast<double>(d3), 1e-9, "x^3 order " + std::to_string(k));
  }
}

TEST(TaylorJet, ErrorsOnMismatchAndZeroDivision) {
  const auto a = Jet::variable(0.0, 3);
  const auto b = Jet::variable(0.5, 3);
  const auto c = Jet::variable(0.0, 4);
  EXPECT_THROW(a + b, jet::OrderError);
  EXPECT_THROW(a * c, jet::OrderError);
  EXPECT_THROW(1.0 / a, DomainError);
  EXPECT_THROW(jet::log(a), DomainError);
}

TEST(TaylorJet, ElementaryFunctionsMatchFiniteDifferences) {
  const double x0 = 0.41;
  const int n = 6;
  const auto x = JetL::variable(x0, n);
  auto u = 0.3L + 0.7L * x + 0.2L * x * x;
  auto uf = [](long double t) { return 0.3L + 0.7L * t + 0.2L * t * t; };
  struct Case {
    std::string name;
    JetL jet;
    std::function<long double(long double)> f;
  };
  std::vector<Case> cases = {
      {"exp", jet::exp(u), [&](long double t) { return std::exp(uf(t)); }},
      {"log", jet::log(u), [&](long double t) { return std::log(uf(t)); }},
      {"sqrt", jet::sqrt(u), [&](long double t) { return std::sqrt(uf(t)); }},
      {"sin", jet::sin(u), [&](long double t) { return std::sin(uf(t)); }},
      {"cos", jet::cos(u), [&](long double t) { return std::cos(uf(t)); }},
      {"div", jet::sin(u) / u, [&](long double t) { return std::sin(uf(t)) / uf(t); }},
      {"atan2", jet::atan2(jet::sin(3.0L * u), 0.2L + jet::cos(u)),
       [&](long double t) { return std::atan2(std::sin(3 * uf(t)), 0.2L + std::cos(uf(t))); }},
  };
  for (const auto& c : cases)
    for (int k = 1; k <= n; ++k) {
      const long double want = fd_coeff(c.f, x0, k, 0.05L, 3);
      expect_rel(static_cast<double>(c.jet[k]), static_cast<double>(want), 1e-6,
                 c.name + " order " + std::to_string(k));
    }
}

TEST(TaylorJet, AtanTwoFollowsTheBranchAtTheBasePoint) {
  // near the negative real axis, the principal value jumps; the jet must not
  const double x0 = 0.1;
  const auto x = Jet::variable(x0, 4);
  const auto a = jet::atan2(jet::sin(kPi - 0.2 + x), jet::cos(kPi - 0.2 + x));
  EXPECT_NEAR(a[0], kPi - 0.1, 1e-14);
  EXPECT_NEAR(a[1], 1.0, 1e-14);
  for (int k = 2; k <= 4; ++k) EXPECT_NEAR(a[k], 0.0, 1e-13);
}

TEST(TaylorJet, DerivativeReindexesWithFactor) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> c(12);
  for (auto& v : c) v = U(rng);
  const Jet rho(0.2, c);
  const auto d = jet::derivative(rho);
  ASSERT_EQ(d.order(), rho.order() - 1);
  for (int k = 0; k < d.order(); ++k) EXPECT_EQ(d[k], (k + 1) * rho[k + 1]);
  const auto back = jet::integral(d, rho[0]);
  for (int k = 0; k <= rho.order(); ++k) EXPECT_NEAR(back[k], rho[k], 1e-15);
}

TEST(ScottCompose, IdentityOuterReturnsInner) {
  const Jet f = poly_jet(0.3, {0.5, -1.0, 2.0, 0.25, -0.7, 0.1});
  std::vector<double> id(6, 0.0);
  id[0] = f[0];
  id[1] = 1.0;
  const auto r = scott_compose<double>(id, f);
  for (int k = 0; k <= 5; ++k) EXPECT_DOUBLE_EQ(r[k], f[k]);
}

TEST(ScottCompose, ExpOuterMatchesSeriesRecurrence) {
  const Jet f = poly_jet(0.0, {0.2, 0.9, -0.4, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0});
  const auto a = scott_compose<double>(exp_series(f[0], 8), f);
  const auto b = jet::exp(f);
  for (int k = 0; k <= 8; ++k) EXPECT_NEAR(a[k], b[k], 1e-12 * std::max(1.0, std::fabs(b[k])));
}

TEST(ScottCompose, SinOfCosAgainstFiniteDifferences) {
  const double x0 = 0.7;
  const int n = 8;
  const auto inner = jet::cos(Jet::variable(x0, n));
  const auto r = scott_compose<double>(sin_series(inner[0], n), inner);
  for (int k = 1; k <= n; ++k) {
    const long double want = fd_coeff([](long double t) { return std::sin(std::cos(t)); }, x0, k, 0.1L);
    expect_rel(r[k], static_cast<double>(want), 1e-6, "order " + std::to_string(k));
  }
}

TEST(ScottCompose, AgreesWithSubstitutionOnRandomPolynomials) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> order(1, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = order(rng);
    std::vector<double> outer(static_cast<std::size_t>(n) + 1), inner(static_cast<std::size_t>(n) + 1);
    for (auto& v : outer) v = U(rng);
    for (auto& v : inner) v = U(rng);
    const Jet f(U(rng), inner);
    const auto a = scott_compose<double>(outer, f);
    const auto b = jet::compose_series<double>(outer, f);
    for (int k = 0; k <= n; ++k) worst = std::max(worst, std::fabs(a[k] - b[k]) / std::max(1.0, std::fabs(b[k])));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(ScottCompose, RejectsOrderMismatch) {
  const auto f = Jet::variable(0.0, 4);
  std::vector<double> outer(3, 1.0);
  EXPECT_THROW(scott_compose<double>(outer, f), jet::OrderError);
}

TEST(PruferJets, FreeModelIsLinear) {
  const model::SparseModel m(ints({4, 20, 84}), 1.0);
  const double phi = 1.1;
  const auto j = prufer_jets<double>(phi, m, 3, 6);
  const double slope = 1.0 + 84.0;  // theta_0 = phi - pi/2 carries slope 1
  EXPECT_NEAR(j.theta[3][1], slope, 1e-12);
  EXPECT_NEAR(j.theta[3][0], wrap_two_pi(phi - kPi / 2 + reduce_phase(std::uint64_t{84}, phi)), 1e-12);
  for (int k = 2; k <= 6; ++k) EXPECT_NEAR(j.theta[3][k], 0.0, 1e-12);
  // s^2 + c^2 cancels terms of size slope^k / k!
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(j.log_R2[3][k], 0.0, 1e-13 * std::pow(slope, k) / std::tgamma(k + 1.0));
}

TEST(PruferJets, ConstantTermsMatchTrajectory) {
  const model::SparseModel m(from_increments({8, 64, 512}), 0.6);
  for (double phi : {0.4, 1.0, 1.9, 2.7}) {
    const auto j = prufer_jets<double>(phi, m, 3, 4);
    const auto tr = prufer::prufer_trajectory(phi, m, 3);
    for (int i = 0; i <= 3; ++i) {
      EXPECT_NEAR(j.theta[static_cast<std::size_t>(i)][0], tr.theta_mod[static_cast<std::size_t>(i)], 1e-12);
      EXPECT_NEAR(j.log_R2[static_cast<std::size_t>(i)][0], tr.log_R2[static_cast<std::size_t>(i)], 1e-10);
    }
  }
}

TEST(PruferJets, HigherCoefficientsMatchTrajectoryDifferences) {
  const model::SparseModel m(from_increments({4, 16, 64, 256}), 0.7);
  const double pos[] = {1.0, 4.0, 20.0, 84.0, 340.0};
  for (double phi : {0.8, 1.3, 2.2}) {
    const auto j = prufer_jets<double>(phi, m, 4, 5);
    for (int mm = 1; mm <= 4; ++mm) {
      // the non-linear part varies on the scale of 1 / a_{m-1}
      const double h = 0.1 / pos[mm - 1];
      const auto& th = j.theta[static_cast<std::size_t>(mm)];
      const double base = th[0];
      const double slope = th[1];
      // wrapped residual after removing the jet's own linear part; smooth and O(1)
      auto u = [&](long double x) -> long double {
        const double pp = static_cast<double>(x);
        const double t = prufer::prufer_trajectory(pp, m, mm).theta_mod[static_cast<std::size_t>(mm)];
        double r = t - base - slope * (pp - phi);
        r = std::remainder(r, 2.0 * kPi);
        return r;
      };
      for (int n = 2; n <= 5; ++n) {
        const long double want = fd_coeff(u, phi, n, h, 3);
        expect_rel(th[n], static_cast<double>(want), 1e-4,
                   "m=" + std::to_string(mm) + " n=" + std::to_string(n) + " phi=" + std::to_string(phi));
      }
      // order one through a plain difference of the residual
      const long double d1 = fd_coeff(u, phi, 1, h, 3);
      EXPECT_NEAR(static_cast<double>(d1), 0.0, 1e-4 * std::fabs(slope));
    }
  }
}

TEST(PruferJets, FirstOrderBandTightensAsPApproachesOne) {
  const model::SparseModel loose(from_increments({8, 64, 512}), 0.6);
  const model::SparseModel tight(from_increments({8, 64, 512}), 0.95);
  auto measure = [](const model::SparseModel& m) {
    double Delta = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double phi = 0.6 + 1.9 * i / 63.0;
      const auto j = prufer_jets<double>(phi, m, 3, 1);
      const double b[] = {8, 64, 512};
      for (int k = 1; k <= 3; ++k) Delta = std::max(Delta, std::fabs(j.theta[static_cast<std::size_t>(k)][1] / b[k - 1] - 1.0));
    }
    return Delta;
  };
  const double dl = measure(loose), dt = measure(tight);
  EXPECT_LT(dl, 1.0);
  EXPECT_LT(dt, dl);
  EXPECT_LT(dt, 0.2);
}

TEST(PruferJets, ExtendedPrecisionAgrees) {
  const model::SparseModel m(from_increments({8, 64, 512}), 0.6);
  const auto a = prufer_jets<double>(1.2, m, 3, 10);
  const auto b = prufer_jets<long double>(1.2, m, 3, 10);
  for (int k = 0; k <= 10; ++k)
    EXPECT_NEAR(a.theta[3][k], static_cast<double>(b.theta[3][k]), 1e-9 * std::max(1.0, std::fabs(a.theta[3][k])));
}

TEST(ConvolutionLemma, PassesAtBothAdmissibleConstants) {
  const auto a = check_convolution_lemma(kScottK, false, 10000, 6);
  EXPECT_TRUE(a.pass);
  EXPECT_GE(a.worst_margin, 0.0);
  const auto b = check_convolution_lemma(kLemmaK, true, 10000, 6);
  EXPECT_TRUE(b.pass);
  EXPECT_GE(b.worst_margin, 0.0);
  EXPECT_NEAR(kScottK, 0.151981, 1e-6);
}

TEST(ConvolutionLemma, FailsForUnitConstantWithWitness) {
  const auto r = check_convolution_lemma(1.0, true, 200, 6);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->first, 2);
  EXPECT_EQ(r.witness->second, 1);  // (C*C)_1 = 2 C_0 C_1 = 2K^2 > K
}

TEST(ConvolutionLemma, DoubleConvolutionStaysBelowStatedBound) {
  for (bool c0 : {false, true}) {
    const double K = c0 ? kLemmaK : kScottK;
    const auto r = check_convolution_lemma(K, c0, 10000, 2);
    EXPECT_LE(r.sup_double_ratio, r.stated_double_bound);
    std::cout << "sup (C*C)_n/C_n = " << r.sup_double_ratio << " at n = " << r.sup_double_at
              << ", stated bound " << r.stated_double_bound << "\n";
  }
}

TEST(ConvolutionLemma, RejectsBadArguments) {
  EXPECT_THROW(check_convolution_lemma(0.0, true, 10, 2), ConfigError);
  EXPECT_THROW(check_convolution_lemma(0.1, true, 20000, 2), ConfigError);
  EXPECT_THROW(check_convolution_lemma(0.1, true, 10, 1), ConfigError);
}

TEST(PartsOperator, FirstApplication) {
  const Jet rho = poly_jet(0.4, {0.7, -0.3, 0.5, 0.2});
  const Jet f0 = poly_jet(0.4, {1.1, 0.6, -0.8, 0.4});
  const auto r = iterated_parts_operator(rho, f0, 1);
  const double want = rho[1] * f0[0] + rho[0] * f0[1];
  EXPECT_NEAR(r.iteration, want, 1e-15);
  EXPECT_NEAR(r.partition, want, 1e-15);
  EXPECT_NEAR(r.unit_weight_sum, want, 1e-15);
}

TEST(PartsOperator, UnitRhoGivesPlainCoefficients) {
  const Jet rho = Jet::constant(0.0, 1.0, 6);
  const Jet f0 = poly_jet(0.0, {0.3, -0.2, 0.9, 0.1, -0.5, 0.25, 0.7});
  for (int n = 0; n <= 6; ++n) {
    const auto r = iterated_parts_operator(rho, f0, n);
    EXPECT_NEAR(r.iteration, f0[n], 1e-14);
    EXPECT_NEAR(r.partition, f0[n], 1e-14);
  }
}

TEST(PartsOperator, RoutesAgreeOnRandomJets) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(7), b(7);
    for (auto& v : a) v = U(rng);
    for (auto& v : b) v = U(rng);
    const Jet rho(0.1, a), f0(0.1, b);
    for (int n = 1; n <= 6; ++n) {
      const auto r = iterated_parts_operator(rho, f0, n);
      EXPECT_NEAR(r.iteration, r.partition, 1e-13 * std::max(1.0, r.unit_weight_abs));
      // every exact multiplicity is at most one, so the unit-weight absolute sum majorizes f_n
      EXPECT_LE(std::fabs(r.iteration), r.unit_weight_abs * (1.0 + 1e-12));
    }
  }
}

TEST(PartsOperator, UnitWeightExpansionOvercounts) {
  // rho = x, f0 = 1: f_2 = 1/2, while the unit-weight sum gives rho^[1]^2 = 1
  const auto rho = Jet::variable(0.0, 3);
  const auto f0 = Jet::constant(0.0, 1.0, 3);
  const auto r = iterated_parts_operator(rho, f0, 2);
  EXPECT_NEAR(r.iteration, 0.5, 1e-15);
  EXPECT_NEAR(r.partition, 0.5, 1e-15);
  EXPECT_NEAR(r.unit_weight_sum, 1.0, 1e-15);
}

TEST(Certificate, FreeModelIsTrivial) {
  const model::SparseModel m(from_increments({8, 64, 512}), 1.0);
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(0.6 + 1.9 * i / 15.0);
  const auto c = certify_gevrey(grid, m, 3, 6);
  ASSERT_TRUE(c.complete);
  for (const auto& cell : c.cells) {
    if (cell.n >= 2) EXPECT_NEAR(cell.value, 0.0, 1e-9);
    EXPECT_TRUE(cell.pass) << cell.m << "," << cell.n;
  }
}

TEST(Certificate, DeskScaleCellsPass) {
  const model::SparseModel m(from_increments({8, 64, 512}), 0.6);
  std::vector<double> grid;
  for (int i = 0; i < 32; ++i) grid.push_back(0.6 + 1.9 * i / 31.0);
  CertifyOptions opt;
  opt.delta = 0.125;
  const auto c = certify_gevrey(grid, m, 3, 6, opt);
  ASSERT_TRUE(c.complete);
  EXPECT_LT(c.Delta, 1.0);
  EXPECT_GT(c.xi, 1.0);
  EXPECT_GT(c.c1, 0.0);
  EXPECT_TRUE(std::isfinite(c.zeta));
  EXPECT_GT(c.D, 0.0);
  EXPECT_TRUE(c.cells_pass());
  // the n = 1 row is the first-derivative band
  for (const auto& cell : c.cells)
    if (cell.n == 1) {
      const double beta = std::pow(8.0, cell.m);
      EXPECT_NEAR(cell.bound, (1.0 + c.Delta) * beta, 1e-9 * beta);
    }
  const auto cell36 = std::find_if(c.cells.begin(), c.cells.end(), [](const auto& x) { return x.m == 3 && x.n == 6; });
  ASSERT_NE(cell36, c.cells.end());
  EXPECT_GT(cell36->margin, 0.0);
}

TEST(Certificate, RejectsIncrementsAboveDelta) {
  const model::SparseModel m(from_increments({8, 32, 512}), 0.6);
  std::vector<double> grid{1.0};
  CertifyOptions opt;
  opt.delta = 0.125;
  EXPECT_THROW(certify_gevrey(grid, m, 3, 4, opt), ConfigError);
}

TEST(CombinedBound, DeskScalePasses) {
  const model::SparseModel m(from_increments({8, 64, 512}), 0.6);
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(0.6 + 1.9 * i / 15.0);
  const auto cert = certify_gevrey(grid, m, 3, 6);
  const auto r = combined_bound_check(grid, m, 2, 4, cert);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.margin, 0.0);
}

TEST(CombinedBound, FreeModelHasNoHigherTerms) {
  const model::SparseModel m(from_increments({8, 64, 512}), 1.0);
  std::vector<double> grid{0.9, 1.4, 2.0};
  const auto cert = certify_gevrey(grid, m, 3, 4);
  const auto r = combined_bound_check(grid, m, 2, 3, cert);
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_TRUE(r.pass);
}

TEST(RemarkBounds, TimeDominatedRegime) {
  const model::SparseModel m(from_increments({8, 64, 512}), 0.6);
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(0.8 + 1.5 * i / 15.0);
  const auto cert = certify_gevrey(grid, m, 3, 6);
  const auto rows = remark_bounds(grid, m, 1, 1, 1e5, 6, cert);
  ASSERT_EQ(rows.size(), 6u);
  int dominated = 0;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.rhok_pass) << r.k;
    if (r.time_dominated) {
      ++dominated;
      EXPECT_TRUE(r.rhokk_pass) << r.k;
    }
  }
  EXPECT_GE(dominated, 2);
}

TEST(Sparseness, ThresholdAtOneHalf) {
  const auto c1 = sparseness_condition(1.0, 0.5, 1.0, 40);
  const auto c51 = sparseness_condition(0.51, 0.5, 1.0, 40);
  const auto c40 = sparseness_condition(0.4, 0.5, 1.0, 40);
  for (int j = 10; j <= 40; ++j) {
    EXPECT_TRUE(c1[static_cast<std::size_t>(j - 1)].holds) << j;
    EXPECT_TRUE(c51[static_cast<std::size_t>(j - 1)].holds) << j;
  }
  EXPECT_FALSE(c40.back().holds);
  // margin grows with j above the threshold and shrinks below it
  EXPECT_GT(c1[39].log_rhs - c1[39].log_lhs, c1[19].log_rhs - c1[19].log_lhs);
  EXPECT_LT(c40[39].log_rhs - c40[39].log_lhs, c40[19].log_rhs - c40[19].log_lhs);
}

TEST(Sparseness, StirlingFormCapturesLeadingOrder) {
  for (double c : {0.51, 1.0}) {
    const auto rows = sparseness_condition(c, 0.5, 1.0, 400);
    double prev = 1e9;
    for (int j : {20, 50, 100, 200, 400}) {
      const auto& r = rows[static_cast<std::size_t>(j - 1)];
      const double rel = std::fabs(r.log_exact - r.log_stirling) / ((j + 1.0) * std::log(j + 1.0));
      EXPECT_LT(rel, prev);
      prev = rel;
    }
    EXPECT_LT(prev, 0.01);
  }
}
