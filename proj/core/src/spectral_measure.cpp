#include "sparse_jacobi/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/prufer_transfer.hpp"

namespace sparse_jacobi::spectral {
namespace {

constexpr double kPi = std::numbers::pi;

// Largest barrier position not beyond N (0 when none); sets the oscillation rate of 1/R^2.
double active_extent(const BigInt& N, const SparseModel& model) {
  if (model.is_free()) return 0.0;
  double extent = 0.0;
  for (const BigInt& a : model.positions()) {
    if (a > N) break;
    extent = a.get_d();
  }
  return extent;
}

int initial_panels(double length, double rate, double resolution) {
  const double by_rate = length * rate / 3.0;
  const double by_shape = length / resolution;
  return static_cast<int>(std::ceil(std::max({1.0, by_rate, by_shape})));
}

quad::Options to_quad(const IntegrationOptions& opt, int panels) {
  quad::Options q;
  q.kind = opt.kind;
  q.order = opt.order;
  q.abs_tol = opt.abs_tol;
  q.rel_tol = opt.rel_tol;
  q.initial_panels = panels;
  q.max_panels = std::max(opt.max_panels, 2 * panels);
  return q;
}

}  // namespace

std::complex<double> herglotz_w(double lambda) {
  if (!(std::fabs(lambda) <= 2.0)) throw DomainError("herglotz_w: |lambda| must be <= 2");
  return {lambda / 2.0, std::sqrt(std::max(0.0, 1.0 - lambda * lambda / 4.0))};
}

double density_kernel(const BigInt& N, double phi, const SparseModel& model) {
  const auto x = prufer::prufer_vector(N, phi, model);
  return std::sin(phi) / (x.x * x.x + x.y * x.y);
}

double ac_density(const BigInt& N, double lambda, const SparseModel& model) {
  if (!(std::fabs(lambda) < 2.0)) throw DomainError("ac_density: |lambda| must be < 2");
  return density_kernel(N, std::acos(lambda / 2.0), model) / kPi;
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

TestFunction::TestFunction(double center, double half_width, double flatness, bool mirrored)
    : center_(center), half_width_(half_width), flatness_(flatness), mirrored_(mirrored) {
  if (!(half_width > 0.0)) throw DomainError("test function half-width must be > 0");
  if (!(flatness >= 0.0 && flatness < 1.0)) throw DomainError("flatness must lie in [0, 1)");
  const double a = lo();
  const double b = hi();
  if (!(a > -2.0 && b < 2.0)) throw DomainError("test function support must lie inside (-2, 2)");
  if (a <= 0.0 && b >= 0.0) throw DomainError("test function support must exclude 0");
  if (mirrored && a < 0.0) throw DomainError("mirrored test functions are given by their positive half");
}

double TestFunction::bump(double lambda) const {
  const double ramp = half_width_ * (1.0 - flatness_);
  return smooth_step((lambda - lo()) / ramp) * smooth_step((hi() - lambda) / ramp);
}

double TestFunction::operator()(double lambda) const {
  return mirrored_ ? bump(lambda) + bump(-lambda) : bump(lambda);
}

std::vector<std::pair<double, double>> TestFunction::support() const {
  if (mirrored_) return {{-hi(), -lo()}, {lo(), hi()}};
  return {{lo(), hi()}};
}

IntegralResult integrate_against(const TestFunction& f, const BigInt& N, const SparseModel& model,
                                 double t, Form form, const IntegrationOptions& opt) {
  const double extent = active_extent(N, model);
  const double ramp = f.half_width() * (1.0 - f.flatness());
  IntegralResult out;
  for (const auto& [a, b] : f.support()) {
    const double phi_a = std::acos(b / 2.0);
    const double phi_b = std::acos(a / 2.0);
    const double min_sin = std::min(std::sin(phi_a), std::sin(phi_b));
    quad::Result r;
    if (form == Form::Phi) {
      auto integrand = [&](double phi) {
        const double lambda = 2.0 * std::cos(phi);
        const double fv = f(lambda);
        if (fv == 0.0) return std::complex<double>(0.0);
        const double w = fv * fv * (2.0 / kPi) * std::sin(phi) * density_kernel(N, phi, model);
        return w * std::polar(1.0, t * lambda);
      };
      const int p0 = initial_panels(phi_b - phi_a, 2.0 * extent + 2.0 * std::fabs(t), ramp / 4.0);
      r = quad::integrate(integrand, phi_a, phi_b, to_quad(opt, p0));
    } else if (std::fabs(t) > opt.filon_threshold) {
      auto amplitude = [&](double lambda) {
        const double fv = f(lambda);
        if (fv == 0.0) return std::complex<double>(0.0);
        return std::complex<double>(fv * fv * density_kernel(N, std::acos(lambda / 2.0), model) / kPi);
      };
      const int p0 = initial_panels(b - a, extent / min_sin, ramp / 2.0);
      r = quad::integrate_oscillatory(amplitude, t, a, b, to_quad(opt, p0));
      out.filon = true;
    } else {
      auto integrand = [&](double lambda) {
        const double fv = f(lambda);
        if (fv == 0.0) return std::complex<double>(0.0);
        const double w = fv * fv * density_kernel(N, std::acos(lambda / 2.0), model) / kPi;
        return w * std::polar(1.0, t * lambda);
      };
      const int p0 = initial_panels(b - a, extent / min_sin + std::fabs(t), ramp / 2.0);
      r = quad::integrate(integrand, a, b, to_quad(opt, p0));
    }
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
  }
  return out;
}

IntegralResult total_mass(const BigInt& N, const SparseModel& model, const IntegrationOptions& opt) {
  const double extent = active_extent(N, model);
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    if (s <= 0.0) return std::complex<double>(0.0);
    return std::complex<double>((2.0 / kPi) * s * density_kernel(N, phi, model));
  };
  const int p0 = initial_panels(kPi, 2.0 * extent, 0.5);
  const auto r = quad::integrate(integrand, 0.0, kPi, to_quad(opt, p0));
  return {r.value, r.error, r.evaluations, false};
}

DensityApproximation density_table(const BigInt& N, const SparseModel& model,
                                   std::span<const double> lambda_grid,
                                   const IntegrationOptions& opt) {
  DensityApproximation out;
  out.N = N;
  out.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  out.values.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) out.values.push_back(ac_density(N, lambda, model));
  out.quadrature = opt.kind;
  const auto m = total_mass(N, model, opt);
  out.mass = m.value.real();
  out.mass_error = m.error;
  out.nodes = static_cast<int>(m.evaluations);
  return out;
}

}  // namespace sparse_jacobi::spectral
