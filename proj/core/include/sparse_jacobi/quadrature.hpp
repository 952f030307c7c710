#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace sparse_jacobi::quad {

// Nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int n);
Rule clenshaw_curtis(int n);  // n + 1 points including both endpoints

enum class Kind { GaussLegendre, ClenshawCurtis };

Rule make_rule(Kind kind, int order);

struct Options {
  Kind kind = Kind::GaussLegendre;
  int order = 16;
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int initial_panels = 1;
  int max_panels = 1 << 18;
};

struct Result {
  std::complex<double> value;
  double error = 0.0;
  std::size_t evaluations = 0;
  int panels = 0;
};

using ComplexFn = std::function<std::complex<double>(double)>;

std::complex<double> composite(const ComplexFn& f, double a, double b, int panels, const Rule& rule);

// Composite rule with panel doubling until two successive values agree to tolerance.
// Throws ToleranceError carrying the last difference when max_panels is reached.
Result integrate(const ComplexFn& f, double a, double b, const Options& opt);

// int_a^b g(x) e^{i omega x} dx with g smooth: g is interpolated at Gauss nodes on each panel and
// the products with e^{i omega x} are integrated exactly, so panel width follows g only.
Result integrate_oscillatory(const ComplexFn& g, double omega, double a, double b,
                             const Options& opt);

// Weights W_k(nu) = int_{-1}^{1} l_k(u) e^{i nu u} du for the Lagrange basis on the Gauss nodes.
std::vector<std::complex<double>> filon_weights(const Rule& gauss, double nu);

}  // namespace sparse_jacobi::quad
