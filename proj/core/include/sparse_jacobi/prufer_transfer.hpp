#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "sparse_jacobi/bigint.hpp"
#include "sparse_jacobi/sparse_model.hpp"

namespace sparse_jacobi::prufer {

using model::SparseModel;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Mat2 {
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

  double det() const { return m00 * m11 - m01 * m10; }
  double trace() const { return m00 + m11; }
  Vec2 operator*(Vec2 v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
};

// Maps (y_{-1}, y_0) to (y_N, y_{N+1}).
struct TransferMatrix {
  Mat2 entries;
  BigInt n_steps;
  double det() const { return entries.det(); }
};

// (y_N, y_{N+1}) with y_{-1} = 0, y_0 = 1.
std::pair<double, double> eigen_solution(const BigInt& N, double lambda, const SparseModel& model);
TransferMatrix transfer_matrix(const BigInt& N, double lambda, const SparseModel& model);

// One site step (y_{n-1}, y_n) -> (y_n, y_{n+1}) for couplings p_{n-1}, p_n.
Mat2 site_step(double p_prev, double p_n, double lambda);
// k free steps in closed form (Chebyshev polynomials of the second kind), k may be huge.
Mat2 free_steps(const BigInt& k, double phi);
// Both steps touched by a barrier of coupling p.
Mat2 barrier_block(double p, double lambda);

// U = [[0, sin phi], [1, -cos phi]]; |U (y_n, y_{n+1})| = |y_n - w y_{n+1}|.
Mat2 prufer_frame(double phi);

// Barrier action in the Prufer frame: rotation by 2 phi after L = [[p, 0], [-k/p, 1/p]],
// k = (1 - p^2) cot phi.
Mat2 barrier_shear(double phi, double p);

// Angle map tan g = (tan theta + cot phi) / p^2 - cot phi, lifted continuously in theta.
double prufer_step_g(double theta, double phi, double p);

// Angle change produced by the barrier shear on a unit vector at angle theta. The barrier map
// is theta -> theta + barrier_shift(theta).
double barrier_shift(double theta, double phi, double p);

struct RatioCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double delta_phase = 0.0;  // atan2(c, b)
  double p = 1.0;
  double residual = 0.0;

  double modulus() const;  // |A|
  std::complex<double> A() const;
  // R_k^2 / R_{k+1}^2 = p^2 / (a + b cos 2theta + c sin 2theta)
  double ratio(double theta) const;
};

RatioCoefficients fit_ratio_coefficients(double phi, double p);
double ratio_H(double phi, double theta, double p);
double ratio_H(const RatioCoefficients& rc, double theta);
// Direct one-barrier ratio |v|^2 / |L v|^2 at angle theta (the fit's sampling oracle).
double barrier_radius_ratio(double theta, double phi, double p);

// Coefficient of e^{2 i n theta} of H, n = 0..n_max, by discrete Fourier analysis.
std::vector<std::complex<double>> fourier_coeffs_H(double phi, double p, int n_max,
                                                   int samples = 2048);

struct PruferTrajectory {
  double phi = 0.0;
  std::vector<double> theta;      // continuous lift, entry j = pre-barrier angle before barrier j
  std::vector<double> theta_mod;  // same angles reduced to [0, 2pi) with exact phase reduction
  std::vector<double> log_R2;     // ln R_j^2 after barrier j
  int first_index = 0;
  int last_index = 0;
};

PruferTrajectory prufer_trajectory(double phi, const SparseModel& model, int j_max);

// U T(N) b for the Dirichlet start, evaluated by rotations and shears in the Prufer frame.
Vec2 prufer_vector(const BigInt& N, double phi, const SparseModel& model);
double log_R2_at(const BigInt& N, double phi, const SparseModel& model);

// Direct transfer evaluation of |y_N - w y_{N+1}|^2 and the most contracted direction of
// T^T T (angle psi with start vector (sin psi, cos psi) in (y_{-1}, y_0) order).
struct ContractionCheck {
  double direct_norm2 = 0.0;
  double frame_norm2 = 0.0;
  double contracting_angle = 0.0;
  double contracting_norm2 = 0.0;
};
ContractionCheck contraction_check(const BigInt& N, double lambda, const SparseModel& model);

}  // namespace sparse_jacobi::prufer
