#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "sparse_jacobi/bigint.hpp"
#include "sparse_jacobi/quadrature.hpp"
#include "sparse_jacobi/sparse_model.hpp"

namespace sparse_jacobi::spectral {

using model::SparseModel;

// w(lambda) = lambda/2 + i sqrt(1 - lambda^2/4) on [-2, 2].
std::complex<double> herglotz_w(double lambda);

// (1/pi) Im w / |y_N - w y_{N+1}|^2
double ac_density(const BigInt& N, double lambda, const SparseModel& model);
// Same density written in phi: returns sin(phi) / R^2, i.e. pi * density.
double density_kernel(const BigInt& N, double phi, const SparseModel& model);

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);

// Flat-top bump on [center - half_width, center + half_width]; the plateau covers the inner
// fraction `flatness` of the half-width. mirrored adds the reflection lambda -> -lambda.
class TestFunction {
 public:
  TestFunction(double center, double half_width, double flatness = 0.5, bool mirrored = false);

  double operator()(double lambda) const;
  double center() const { return center_; }
  double half_width() const { return half_width_; }
  double flatness() const { return flatness_; }
  bool mirrored() const { return mirrored_; }
  double lo() const { return center_ - half_width_; }
  double hi() const { return center_ + half_width_; }
  std::vector<std::pair<double, double>> support() const;

 private:
  double bump(double lambda) const;

  double center_;
  double half_width_;
  double flatness_;
  bool mirrored_;
};

enum class Form { Lambda, Phi };

struct IntegrationOptions {
  quad::Kind kind = quad::Kind::GaussLegendre;
  int order = 16;
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_panels = 1 << 20;
  double filon_threshold = 1e3;
};

struct IntegralResult {
  std::complex<double> value;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool filon = false;
};

// int f^2 e^{i t lambda} d rho_N, in the lambda variable or after lambda = 2 cos phi.
IntegralResult integrate_against(const TestFunction& f, const BigInt& N, const SparseModel& model,
                                 double t, Form form = Form::Lambda,
                                 const IntegrationOptions& opt = {});

// Mass of rho_N over (-2, 2), computed in phi (no endpoint singularity).
IntegralResult total_mass(const BigInt& N, const SparseModel& model,
                          const IntegrationOptions& opt = {});

struct DensityApproximation {
  BigInt N;
  std::vector<double> lambda_grid;
  std::vector<double> values;
  quad::Kind quadrature = quad::Kind::GaussLegendre;
  int nodes = 0;
  double mass = 0.0;
  double mass_error = 0.0;
};

DensityApproximation density_table(const BigInt& N, const SparseModel& model,
                                   std::span<const double> lambda_grid,
                                   const IntegrationOptions& opt = {});

}  // namespace sparse_jacobi::spectral
