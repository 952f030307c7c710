#include "sparse_jacobi/prufer_transfer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/phase.hpp"

namespace sparse_jacobi::prufer {
namespace {

constexpr double kPi = std::numbers::pi;

double phi_of(double lambda) {
  if (!(std::fabs(lambda) < 2.0)) throw DomainError("lambda must lie in (-2, 2)");
  return std::acos(lambda / 2.0);
}

void check_phi(double phi) {
  if (!(phi > 0.0 && phi < kPi)) throw DomainError("phi must lie in (0, pi)");
}

Mat2 rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

Mat2 inverse(const Mat2& m) {
  const double d = m.det();
  return {m.m11 / d, -m.m01 / d, -m.m10 / d, m.m00 / d};
}

double kappa(double phi, double p) { return (1.0 - p * p) * std::cos(phi) / std::sin(phi); }

// Walks pairs -1 .. N, calling free(k) for k free steps and barrier(full) at each barrier;
// full is false when N stops between the two steps of the last barrier.
template <class Free, class Barrier>
void walk(const BigInt& N, const SparseModel& model, Free&& on_free, Barrier&& on_barrier) {
  if (N < 0) throw DomainError("truncation index must be >= 0");
  BigInt cur = -1;
  if (!model.is_free()) {
    for (const BigInt& a : model.positions()) {
      if (a > N) break;
      on_free(BigInt(a - 1 - cur));
      if (a + 1 <= N) {
        on_barrier(true);
        cur = a + 1;
      } else {
        on_barrier(false);
        cur = a;
      }
    }
  }
  on_free(BigInt(N - cur));
}

}  // namespace

Mat2 site_step(double p_prev, double p_n, double lambda) {
  return {0.0, 1.0, -p_prev / p_n, lambda / p_n};
}

Mat2 free_steps(const BigInt& k, double phi) {
  if (k == 0) return {};
  if (k < 0) throw DomainError("negative free step count");
  const double s = std::sin(phi);
  const double u_km2 = std::sin(reduce_phase(BigInt(k - 1), phi)) / s;
  const double u_km1 = std::sin(reduce_phase(k, phi)) / s;
  const double u_k = std::sin(reduce_phase(BigInt(k + 1), phi)) / s;
  return {-u_km2, u_km1, -u_km1, u_k};
}

Mat2 barrier_block(double p, double lambda) {
  return site_step(p, 1.0, lambda) * site_step(1.0, p, lambda);
}

TransferMatrix transfer_matrix(const BigInt& N, double lambda, const SparseModel& model) {
  const double phi = phi_of(lambda);
  const double p = model.p();
  Mat2 t;
  walk(
      N, model, [&](const BigInt& k) { t = free_steps(k, phi) * t; },
      [&](bool full) {
        t = (full ? barrier_block(p, lambda) : site_step(1.0, p, lambda)) * t;
      });
  return {t, BigInt(N + 1)};
}

std::pair<double, double> eigen_solution(const BigInt& N, double lambda,
                                         const SparseModel& model) {
  const Mat2 t = transfer_matrix(N, lambda, model).entries;
  return {t.m01, t.m11};
}

Mat2 prufer_frame(double phi) { return {0.0, std::sin(phi), 1.0, -std::cos(phi)}; }

Mat2 barrier_shear(double phi, double p) {
  check_phi(phi);
  const double k = kappa(phi, p);
  return rotation(2.0 * phi) * Mat2{p, 0.0, -k / p, 1.0 / p};
}

double prufer_step_g(double theta, double phi, double p) {
  check_phi(phi);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double mx = p * p * c;
  const double my = kappa(phi, p) * c + s;
  return theta + std::atan2(c * my - s * mx, c * mx + s * my);
}

double barrier_shift(double theta, double phi, double p) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double lx = p * c;
  const double ly = (s - kappa(phi, p) * c) / p;
  return std::atan2(c * ly - s * lx, c * lx + s * ly);
}

double barrier_radius_ratio(double theta, double phi, double p) {
  check_phi(phi);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double lx = p * c;
  const double ly = (s - kappa(phi, p) * c) / p;
  return 1.0 / (lx * lx + ly * ly);
}

double RatioCoefficients::modulus() const {
  const double rho = std::hypot(b, c);
  if (rho == 0.0) return 0.0;
  return (a - std::sqrt((a - rho) * (a + rho))) / rho;
}

std::complex<double> RatioCoefficients::A() const {
  return std::polar(modulus(), delta_phase + kPi);
}

double RatioCoefficients::ratio(double theta) const {
  return p * p / (a + b * std::cos(2.0 * theta) + c * std::sin(2.0 * theta));
}

RatioCoefficients fit_ratio_coefficients(double phi, double p) {
  check_phi(phi);
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  double u[4];
  for (int k = 0; k < 4; ++k) u[k] = p * p / barrier_radius_ratio(k * kPi / 4.0, phi, p);
  RatioCoefficients rc;
  rc.p = p;
  rc.a = (u[0] + u[1] + u[2] + u[3]) / 4.0;
  rc.b = (u[0] - u[2]) / 2.0;
  rc.c = (u[1] - u[3]) / 2.0;
  rc.delta_phase = std::atan2(rc.c, rc.b);
  double worst = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double theta = (k + 0.5) * kPi / 256.0 + 0.1234;
    const double direct = barrier_radius_ratio(theta, phi, p);
    worst = std::max(worst, std::fabs(rc.ratio(theta) / direct - 1.0));
  }
  rc.residual = worst;
  if (worst > 1e-10)
    throw ToleranceError("ratio coefficient fit residual " + std::to_string(worst), worst);
  if (!(rc.a > std::hypot(rc.b, rc.c)))
    throw ToleranceError("ratio coefficients lost positivity", rc.a - std::hypot(rc.b, rc.c));
  return rc;
}

double ratio_H(const RatioCoefficients& rc, double theta) { return rc.ratio(theta) - 1.0; }

double ratio_H(double phi, double theta, double p) {
  return ratio_H(fit_ratio_coefficients(phi, p), theta);
}

std::vector<std::complex<double>> fourier_coeffs_H(double phi, double p, int n_max, int samples) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  const auto rc = fit_ratio_coefficients(phi, p);
  std::vector<double> h(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) h[static_cast<std::size_t>(k)] = ratio_H(rc, k * kPi / samples);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < samples; ++k) {
      // e^{+2 i n theta_k}, theta_k = k pi / samples; index reduced to keep the angle small
      const double angle = 2.0 * kPi * static_cast<double>((static_cast<long>(n) * k) % samples) /
                           samples;
      acc += h[static_cast<std::size_t>(k)] * std::polar(1.0, angle);
    }
    out[static_cast<std::size_t>(n)] = acc / static_cast<double>(samples);
  }
  return out;
}

PruferTrajectory prufer_trajectory(double phi, const SparseModel& model, int j_max) {
  check_phi(phi);
  if (j_max < 0 || j_max > model.barrier_count())
    throw DomainError("j_max outside the model's barrier range");
  const double p = model.p();
  const auto rc = fit_ratio_coefficients(phi, p);
  const auto gaps = model.gaps();

  PruferTrajectory tr;
  tr.phi = phi;
  tr.first_index = 0;
  tr.last_index = j_max;
  tr.theta.reserve(static_cast<std::size_t>(j_max) + 1);
  tr.theta_mod.reserve(static_cast<std::size_t>(j_max) + 1);
  tr.log_R2.reserve(static_cast<std::size_t>(j_max) + 1);

  const double theta0 = phi - kPi / 2.0;
  tr.theta.push_back(theta0);
  tr.theta_mod.push_back(wrap_two_pi(theta0));
  tr.log_R2.push_back(0.0);
  const double p2 = p * p;
  for (int j = 1; j <= j_max; ++j) {
    const BigInt& beta = gaps[static_cast<std::size_t>(j - 1)];
    const double prev_mod = tr.theta_mod.back();
    const double shift = (j == 1 || p == 1.0) ? 0.0 : barrier_shift(prev_mod, phi, p);
    tr.theta.push_back(tr.theta.back() + shift + beta.get_d() * phi);
    const double mod = wrap_two_pi(prev_mod + shift + reduce_phase(beta, phi));
    tr.theta_mod.push_back(mod);
    const double q = rc.a + rc.b * std::cos(2.0 * mod) + rc.c * std::sin(2.0 * mod);
    tr.log_R2.push_back(tr.log_R2.back() + std::log(q / p2));
  }
  return tr;
}

Vec2 prufer_vector(const BigInt& N, double phi, const SparseModel& model) {
  check_phi(phi);
  const double p = model.p();
  const double lambda = 2.0 * std::cos(phi);
  const Mat2 frame = prufer_frame(phi);
  const Mat2 shear = barrier_shear(phi, p);
  Vec2 x{std::sin(phi), -std::cos(phi)};
  walk(
      N, model, [&](const BigInt& k) { x = rotation(reduce_phase(k, phi)) * x; },
      [&](bool full) {
        x = full ? shear * x : (frame * site_step(1.0, p, lambda) * inverse(frame)) * x;
      });
  return x;
}

double log_R2_at(const BigInt& N, double phi, const SparseModel& model) {
  const Vec2 x = prufer_vector(N, phi, model);
  return std::log(x.x * x.x + x.y * x.y);
}

ContractionCheck contraction_check(const BigInt& N, double lambda, const SparseModel& model) {
  const double phi = phi_of(lambda);
  const Mat2 t = transfer_matrix(N, lambda, model).entries;
  const auto [yn, yn1] = std::pair{t.m01, t.m11};
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  ContractionCheck out;
  out.direct_norm2 = (yn - c * yn1) * (yn - c * yn1) + s * s * yn1 * yn1;
  const Mat2 m = prufer_frame(phi) * t;
  const Vec2 v = m * Vec2{0.0, 1.0};
  out.frame_norm2 = v.x * v.x + v.y * v.y;
  // Smallest eigenpair of M^T M.
  const double g00 = m.m00 * m.m00 + m.m10 * m.m10;
  const double g01 = m.m00 * m.m01 + m.m10 * m.m11;
  const double g11 = m.m01 * m.m01 + m.m11 * m.m11;
  const double mean = 0.5 * (g00 + g11);
  const double rad = std::hypot(0.5 * (g00 - g11), g01);
  const double det = m.det() * m.det();
  out.contracting_norm2 = det / (mean + rad);
  // eigenvector for the small eigenvalue, written as (sin psi, cos psi)
  const double ex = g01;
  const double ey = out.contracting_norm2 - g00;
  const double ang = (ex == 0.0 && ey == 0.0) ? 0.0 : std::atan2(ex, ey);
  out.contracting_angle = ang;
  return out;
}

}  // namespace sparse_jacobi::prufer
