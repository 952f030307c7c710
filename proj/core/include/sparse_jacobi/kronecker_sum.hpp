#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sparse_jacobi/bigint.hpp"
#include "sparse_jacobi/sparse_model.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

namespace sparse_jacobi::kron {

using model::SparseModel;
using spectral::TestFunction;

inline constexpr int kMaxTruncation = 4096;

// p_0..p_{L-2} of the leading L x L block.
std::vector<double> jacobi_offdiagonal(const SparseModel& model, int L);

// Eigenvalues of the L x L block with weights |<delta_0, v_i>|^2.
struct TruncatedSpectrum {
  std::vector<double> values;
  std::vector<double> weights;
};

TruncatedSpectrum truncated_spectrum(int L, const SparseModel& model);
std::vector<double> truncated_eigenvalues(int L, const SparseModel& model);

// Sorted {a_i + b_j}.
std::vector<double> minkowski_sum(std::span<const double> a, std::span<const double> b);

enum class Source { SquaredTransform, EigenHistogram, DirectConvolution };

struct ConvolutionDensity {
  Source source = Source::SquaredTransform;
  std::vector<double> grid;
  std::vector<double> values;
  double mass = 0.0;          // trapezoid mass over the grid
  double gamma0 = 0.0;        // gamma(0); the full mass is gamma0^2
  double l2_indicator = 0.0;  // int_{-T}^{T} |gamma|^2 dt
  double t_max = 0.0;
  double tail_fraction = 0.0;  // share of the L2 mass in the last tenth of [0, T]
};

struct TransformOptions {
  double t_max = 100.0;
  double panel_width = 1.0;
  double tail_tol = 1e-6;
  spectral::IntegrationOptions integration{};
};

// gamma at Gauss nodes on [0, T] with matching weights.
struct GammaSamples {
  double t_max = 0.0;
  std::vector<double> t;
  std::vector<double> weights;
  std::vector<std::complex<double>> gamma;
};

GammaSamples gamma_samples(const TestFunction& f, const BigInt& N, const SparseModel& model,
                           const TransformOptions& opt = {});

// (1/2pi) int |gamma|^2 e^{-i t lambda} dt from samples on [0, T]; |gamma|^2 is even in t.
// Throws ToleranceError naming the needed T when the tail share exceeds tail_tol.
ConvolutionDensity inverse_transform_squared(const GammaSamples& s, std::span<const double> lambda_grid,
                                             double tail_tol = 1e-6);

ConvolutionDensity convolution_density(const TestFunction& f, const BigInt& N,
                                       const SparseModel& model, std::span<const double> lambda_grid,
                                       const TransformOptions& opt = {});

// Running int_0^t |gamma|^2 at the end of each panel.
std::vector<double> l2_cumulative(const GammaSamples& s, int nodes_per_panel = 16);

// int m(x) m(lambda - x) dx with m = f^2 times the density of rho_N.
ConvolutionDensity direct_self_convolution(const TestFunction& f, const BigInt& N,
                                           const SparseModel& model,
                                           std::span<const double> lambda_grid);

struct HistogramComparison {
  int L = 0;
  double ks = 0.0;  // Kolmogorov-Smirnov distance of the normalised distributions
  std::vector<double> bin_edges;
  std::vector<double> histogram;  // weighted pair mass per bin, normalised to 1
  std::size_t pairs = 0;          // pairs with nonzero weight
  double discrete_mass = 0.0;     // before normalisation
  double continuous_mass = 0.0;
};

// Pairwise sums lambda_i + lambda_j weighted by w_i f(lambda_i)^2 w_j f(lambda_j)^2, against
// the squared-transform density.
HistogramComparison histogram_vs_convolution(int L, const SparseModel& model, const TestFunction& f,
                                             const BigInt& N, int bins,
                                             const TransformOptions& opt = {});

}  // namespace sparse_jacobi::kron
