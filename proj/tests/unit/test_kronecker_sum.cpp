#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/kronecker_sum.hpp"
#include "sparse_jacobi/tridiagonal.hpp"

using namespace sparse_jacobi;
using namespace sparse_jacobi::kron;

namespace {

SparseModel explicit_model(int J, double p) {
  std::vector<BigInt> inc;
  BigInt b = 1;
  for (int j = 1; j <= J; ++j) {
    b *= 4;
    inc.push_back(b);
  }
  return SparseModel(model::SparsenessSpec{model::Explicit{inc}, J}, p);
}

Eigen::MatrixXd dense_jacobi(const SparseModel& m, int L) {
  const auto off = jacobi_offdiagonal(m, L);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L, L);
  for (int n = 0; n + 1 < L; ++n) J(n, n + 1) = J(n + 1, n) = off[static_cast<std::size_t>(n)];
  return J;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1.0));
  return g;
}

const TestFunction kBump(1.0, 0.8, 0.5, true);

}  // namespace

TEST(Tridiagonal, MatchesDenseSolver) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 256;
  std::vector<double> d(n), e(n - 1);
  for (auto& x : d) x = u(rng);
  for (auto& x : e) x = u(rng);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = d[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = A(i + 1, i) = e[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const auto mine = tridiag::symmetric_tridiagonal(d, e);
  ASSERT_EQ(mine.values.size(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(mine.values[static_cast<std::size_t>(i)], es.eigenvalues()(i), 1e-12);
    EXPECT_NEAR(std::fabs(mine.first[static_cast<std::size_t>(i)]), std::fabs(es.eigenvectors()(0, i)), 1e-10);
  }
}

TEST(Tridiagonal, Errors) {
  const std::vector<double> d{0.0, 0.0, 0.0};
  const std::vector<double> e{1.0};
  EXPECT_THROW(tridiag::symmetric_tridiagonal(d, e), ConfigError);
  EXPECT_TRUE(tridiag::symmetric_tridiagonal({}, {}).values.empty());
}

TEST(Truncation, FreeThreeByThree) {
  const auto ev = truncated_eigenvalues(3, SparseModel::free_model());
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_NEAR(ev[0], -std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(ev[1], 0.0, 1e-14);
  EXPECT_NEAR(ev[2], std::numbers::sqrt2, 1e-14);
  const auto k = minkowski_sum(ev, ev);
  ASSERT_EQ(k.size(), 9u);
  EXPECT_NEAR(k.front(), -2.0 * std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(k[4], 0.0, 1e-14);
}

TEST(Truncation, FreeClosedForm) {
  const int L = 200;
  const auto s = truncated_spectrum(L, SparseModel::free_model());
  for (int k = 1; k <= L; ++k) {
    const double theta = k * std::numbers::pi / (L + 1);
    const auto i = static_cast<std::size_t>(L - k);
    EXPECT_NEAR(s.values[i], 2.0 * std::cos(theta), 1e-12);
    EXPECT_NEAR(s.weights[i], 2.0 / (L + 1) * std::sin(theta) * std::sin(theta), 1e-12);
  }
}

TEST(Truncation, CouplingsAndWeights) {
  const auto m = explicit_model(4, 0.6);
  const auto off = jacobi_offdiagonal(m, 30);
  for (int n = 0; n < 29; ++n)
    EXPECT_EQ(off[static_cast<std::size_t>(n)], (n == 4 || n == 20) ? 0.6 : 1.0) << n;
  const auto s = truncated_spectrum(400, m);
  double total = 0.0;
  for (double w : s.weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_TRUE(std::is_sorted(s.values.begin(), s.values.end()));
}

TEST(Truncation, SymmetricSpectrum) {
  for (double p : {0.3, 0.6, 0.9}) {
    const auto s = truncated_spectrum(333, explicit_model(4, p));
    const std::size_t n = s.values.size();
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(s.values[i], -s.values[n - 1 - i], 1e-12);
      EXPECT_NEAR(s.weights[i], s.weights[n - 1 - i], 1e-12);
    }
  }
}

TEST(Truncation, LimitAndDomain) {
  const auto m = SparseModel::free_model();
  EXPECT_THROW(truncated_eigenvalues(0, m), ConfigError);
  EXPECT_THROW(truncated_eigenvalues(kMaxTruncation + 1, m), ConfigError);
}

TEST(Minkowski, DenseKroneckerSum) {
  const int L = 24;
  const auto m = explicit_model(2, 0.5);
  const Eigen::MatrixXd J = dense_jacobi(m, L);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(L, L);
  Eigen::MatrixXd K(L * L, L * L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) K.block(a * L, b * L, L, L) = J(a, b) * I + (a == b ? J : Eigen::MatrixXd::Zero(L, L));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  const auto ev = truncated_eigenvalues(L, m);
  const auto sums = minkowski_sum(ev, ev);
  ASSERT_EQ(sums.size(), static_cast<std::size_t>(L * L));
  for (int i = 0; i < L * L; ++i) EXPECT_NEAR(sums[static_cast<std::size_t>(i)], es.eigenvalues()(i), 1e-12);
}

TEST(Minkowski, ProductVectorsAtL256) {
  // (J (x) I + I (x) J) vec(V) = vec(J V + V J) for V = u_i u_j^T
  const int L = 256;
  const auto m = explicit_model(3, 0.7);
  const Eigen::MatrixXd J = dense_jacobi(m, L);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, L - 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int i = pick(rng), j = pick(rng);
    const Eigen::MatrixXd V = es.eigenvectors().col(i) * es.eigenvectors().col(j).transpose();
    const Eigen::MatrixXd R = J * V + V * J - (es.eigenvalues()(i) + es.eigenvalues()(j)) * V;
    EXPECT_LT(R.norm(), 1e-12) << i << " " << j;
  }
  const auto ev = truncated_eigenvalues(L, m);
  for (int i = 0; i < L; ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], es.eigenvalues()(i), 1e-12);
}

TEST(ConvolutionDensity, FreeMatchesDirectConvolution) {
  const auto free = SparseModel::free_model();
  const auto grid = uniform_grid(-3.99, 3.99, 401);
  TransformOptions opt;
  opt.t_max = 100.0;
  const auto d = convolution_density(kBump, BigInt(0), free, grid, opt);
  const auto direct = direct_self_convolution(kBump, BigInt(0), free, grid);
  double linf = 0.0, lowest = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    linf = std::max(linf, std::fabs(d.values[k] - direct.values[k]));
    lowest = std::min(lowest, d.values[k]);
    EXPECT_NEAR(d.values[k], d.values[grid.size() - 1 - k], 1e-12);
  }
  EXPECT_LT(linf, 1e-4);
  EXPECT_GE(lowest, -1e-8);
  EXPECT_NEAR(d.mass, d.gamma0 * d.gamma0, 1e-6);
  EXPECT_NEAR(direct.gamma0, d.gamma0, 1e-10);
  EXPECT_GT(d.l2_indicator, 0.0);
}

TEST(ConvolutionDensity, SupportContainment) {
  const TestFunction f(1.0, 0.4, 0.5, true);
  const auto grid = uniform_grid(-3.99, 3.99, 799);
  TransformOptions opt;
  opt.t_max = 200.0;
  const auto d = convolution_density(f, BigInt(0), SparseModel::free_model(), grid, opt);
  double peak = 0.0;
  for (double v : d.values) peak = std::max(peak, v);
  // sums of +-[0.6, 1.4]: [-2.8, -1.2], [-0.8, 0.8], [1.2, 2.8]
  auto inside = [](double x) {
    const double pad = 0.05, ax = std::fabs(x);
    return ax <= 0.8 + pad || (ax >= 1.2 - pad && ax <= 2.8 + pad);
  };
  int outside = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (inside(grid[k])) continue;
    ++outside;
    EXPECT_LT(std::fabs(d.values[k]), 1e-6 * peak) << grid[k];
  }
  EXPECT_GT(outside, 100);
}

TEST(ConvolutionDensity, L2CumulativeSettles) {
  TransformOptions opt;
  opt.t_max = 150.0;
  const auto s = gamma_samples(kBump, BigInt(0), SparseModel::free_model(), opt);
  const auto cum = l2_cumulative(s);
  ASSERT_EQ(cum.size(), 150u);
  EXPECT_TRUE(std::is_sorted(cum.begin(), cum.end()));
  EXPECT_LT((cum.back() - cum[14]) / cum.back(), 0.01);
}

TEST(ConvolutionDensity, TailErrorNamesRange) {
  const TestFunction f(1.0, 0.3, 0.5, true);
  TransformOptions opt;
  opt.t_max = 20.0;
  const auto grid = uniform_grid(-3.0, 3.0, 11);
  try {
    convolution_density(f, BigInt(0), SparseModel::free_model(), grid, opt);
    FAIL() << "expected a tail error";
  } catch (const ToleranceError& e) {
    EXPECT_NE(std::string(e.what()).find("t range needed"), std::string::npos);
    EXPECT_GT(e.achieved(), opt.tail_tol);
  }
  const std::vector<double> bad{-4.0, 0.0};
  EXPECT_THROW(inverse_transform_squared(GammaSamples{}, bad), DomainError);
}

TEST(Histogram, FreeCaseKolmogorovSmirnov) {
  const auto free = SparseModel::free_model();
  TransformOptions opt;
  opt.t_max = 100.0;
  double prev = 1.0;
  for (int L : {256, 512, 1024}) {
    const auto h = histogram_vs_convolution(L, free, kBump, BigInt(0), 160, opt);
    EXPECT_LE(h.ks, prev) << L;
    prev = h.ks;
    EXPECT_NEAR(h.discrete_mass, h.continuous_mass, 1e-5);
    double total = 0.0;
    for (double v : h.histogram) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    if (L == 1024) EXPECT_LT(h.ks, 0.02);
  }
}

TEST(Histogram, OneBarrierRoutesAgree) {
  const SparseModel m(std::vector<BigInt>{BigInt(10)}, 0.8);
  TransformOptions opt;
  opt.t_max = 120.0;
  const auto h = histogram_vs_convolution(1024, m, kBump, BigInt(20), 160, opt);
  EXPECT_LT(h.ks, 0.05);
}

TEST(Histogram, BinUnderflow) {
  EXPECT_THROW(histogram_vs_convolution(2, SparseModel::free_model(), kBump, BigInt(0), 1000), ConfigError);
  EXPECT_THROW(histogram_vs_convolution(64, SparseModel::free_model(), kBump, BigInt(0), 1), ConfigError);
}
