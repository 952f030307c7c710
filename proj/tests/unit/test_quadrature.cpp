#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/quadrature.hpp"

using namespace sparse_jacobi;
using namespace sparse_jacobi::quad;

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  for (int n : {1, 2, 5, 16, 40}) {
    const Rule r = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
      const double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
      ASSERT_NEAR(s, exact, 1e-13) << n << " " << d;
    }
  }
}

TEST(Quadrature, ClenshawCurtisExactForPolynomials) {
  for (int n : {2, 8, 32}) {
    const Rule r = clenshaw_curtis(n);
    for (int d = 0; d <= n; ++d) {
      double s = 0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
      const double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
      ASSERT_NEAR(s, exact, 1e-13) << n << " " << d;
    }
  }
}

TEST(Quadrature, AdaptiveSmoothIntegral) {
  Options o;
  const auto r = integrate([](double x) { return std::complex<double>(std::exp(x) * std::cos(20 * x)); }, 0.0,
                           2.0, o);
  // int e^x cos(20x) = e^x (cos 20x + 20 sin 20x) / 401
  const double exact = (std::exp(2.0) * (std::cos(40.0) + 20 * std::sin(40.0)) - 1.0) / 401.0;
  EXPECT_NEAR(r.value.real(), exact, 1e-12);
  EXPECT_LT(r.error, 1e-10);
}

TEST(Quadrature, ToleranceFailureCarriesEstimate) {
  Options o;
  o.max_panels = 4;
  o.rel_tol = 1e-15;
  o.abs_tol = 0;
  try {
    integrate([](double x) { return std::complex<double>(std::sqrt(std::fabs(std::sin(300 * x)))); }, 0, 1, o);
    FAIL();
  } catch (const ToleranceError& e) {
    EXPECT_GE(e.achieved(), 0.0);
  }
}

TEST(Quadrature, FilonWeightsReduceToGauss) {
  const Rule g = gauss_legendre(12);
  const auto w = filon_weights(g, 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(std::abs(w[k] - g.weights[k]), 0.0, 1e-14);
}

TEST(Quadrature, FilonHighFrequency) {
  const double omega = 5000.0;
  Options o;
  o.initial_panels = 2;
  const auto r = integrate_oscillatory([](double x) { return std::complex<double>(x * x); }, omega, 0.0, 1.0, o);
  const std::complex<double> i(0, 1);
  // int_0^1 x^2 e^{i w x} dx
  const auto e = std::exp(i * omega);
  const std::complex<double> exact =
      e * (1.0 / (i * omega) + 2.0 / (omega * omega) - 2.0 / (i * omega * omega * omega)) +
      2.0 / (i * omega * omega * omega);
  EXPECT_LT(std::abs(r.value - exact), 1e-14);
  EXPECT_LE(r.panels, 16);
}
