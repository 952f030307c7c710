#include "sparse_jacobi/kronecker_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/fourier_decay.hpp"
#include "sparse_jacobi/parallel.hpp"
#include "sparse_jacobi/quadrature.hpp"
#include "sparse_jacobi/tridiagonal.hpp"

namespace sparse_jacobi::kron {
namespace {

constexpr int kNodes = 16;

void check_L(int L) {
  if (L < 1) throw ConfigError("kronecker: truncation L must be >= 1");
  if (L > kMaxTruncation)
    throw ConfigError("kronecker: truncation L = " + std::to_string(L) + " exceeds the limit " +
                      std::to_string(kMaxTruncation));
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("kronecker: empty lambda grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(std::fabs(grid[i]) < 4.0)) throw DomainError("kronecker: lambda grid must lie in (-4, 4)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("kronecker: lambda grid must increase");
  }
}

}  // namespace

std::vector<double> jacobi_offdiagonal(const SparseModel& model, int L) {
  check_L(L);
  std::vector<double> off(static_cast<std::size_t>(L - 1));
  for (int n = 0; n + 1 < L; ++n) off[static_cast<std::size_t>(n)] = model.coupling(BigInt(n));
  return off;
}

TruncatedSpectrum truncated_spectrum(int L, const SparseModel& model) {
  const auto off = jacobi_offdiagonal(model, L);
  const std::vector<double> diag(static_cast<std::size_t>(L), 0.0);
  auto es = tridiag::symmetric_tridiagonal(diag, off);
  TruncatedSpectrum out;
  out.values = std::move(es.values);
  out.weights.reserve(es.first.size());
  for (double v : es.first) out.weights.push_back(v * v);
  return out;
}

std::vector<double> truncated_eigenvalues(int L, const SparseModel& model) {
  return truncated_spectrum(L, model).values;
}

std::vector<double> minkowski_sum(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a)
    for (double y : b) out.push_back(x + y);
  std::sort(out.begin(), out.end());
  return out;
}

GammaSamples gamma_samples(const TestFunction& f, const BigInt& N, const SparseModel& model,
                           const TransformOptions& opt) {
  if (!(opt.t_max > 0.0) || !(opt.panel_width > 0.0))
    throw ConfigError("kronecker: t_max and panel_width must be positive");
  const int panels = std::max(1, static_cast<int>(std::ceil(opt.t_max / opt.panel_width)));
  const double h = opt.t_max / panels;
  const auto rule = quad::gauss_legendre(kNodes);
  GammaSamples s;
  s.t_max = opt.t_max;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < kNodes; ++k) {
      s.t.push_back(h * (p + 0.5 * (rule.nodes[static_cast<std::size_t>(k)] + 1.0)));
      s.weights.push_back(0.5 * h * rule.weights[static_cast<std::size_t>(k)]);
    }
  s.gamma.resize(s.t.size());
  parallel_for(s.t.size(), [&](std::size_t i) { s.gamma[i] = decay::gamma(s.t[i], f, N, model, opt.integration); });
  return s;
}

std::vector<double> l2_cumulative(const GammaSamples& s, int nodes_per_panel) {
  if (nodes_per_panel < 1 || s.t.size() % static_cast<std::size_t>(nodes_per_panel) != 0)
    throw ConfigError("kronecker: samples do not split into whole panels");
  std::vector<double> out;
  double acc = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    acc += s.weights[i] * std::norm(s.gamma[i]);
    if ((i + 1) % static_cast<std::size_t>(nodes_per_panel) == 0) out.push_back(acc);
  }
  return out;
}

ConvolutionDensity inverse_transform_squared(const GammaSamples& s, std::span<const double> lambda_grid,
                                             double tail_tol) {
  check_grid(lambda_grid);
  if (s.t.empty()) throw ConfigError("kronecker: no gamma samples");
  ConvolutionDensity d;
  d.source = Source::SquaredTransform;
  d.t_max = s.t_max;

  double total = 0.0, last = 0.0, before_last = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double m = s.weights[i] * std::norm(s.gamma[i]);
    total += m;
    if (s.t[i] > 0.9 * d.t_max) last += m;
    else if (s.t[i] > 0.8 * d.t_max) before_last += m;
  }
  d.l2_indicator = 2.0 * total;
  d.tail_fraction = total > 0.0 ? last / total : 0.0;
  if (d.tail_fraction > tail_tol) {
    std::string need = "beyond " + std::to_string(2.0 * d.t_max);
    if (last > 0.0 && before_last > last) {
      const double rate = std::log(before_last / last) / (0.1 * d.t_max);
      need = "about [0, " + std::to_string(d.t_max + std::log(d.tail_fraction / tail_tol) / rate) + "]";
    }
    throw ToleranceError("kronecker: |gamma|^2 tail share " + std::to_string(d.tail_fraction) +
                             " on [0, " + std::to_string(d.t_max) + "] exceeds " +
                             std::to_string(tail_tol) + "; t range needed " + need,
                         d.tail_fraction);
  }

  d.grid.assign(lambda_grid.begin(), lambda_grid.end());
  d.values.resize(d.grid.size());
  parallel_for(d.grid.size(), [&](std::size_t j) {
    // the real part of |gamma|^2 e^{-i t lambda} doubled over t < 0
    double acc = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i)
      acc += s.weights[i] * std::norm(s.gamma[i]) * std::cos(s.t[i] * d.grid[j]);
    d.values[j] = acc / std::numbers::pi;
  });
  d.mass = trapezoid(d.grid, d.values);
  return d;
}

ConvolutionDensity convolution_density(const TestFunction& f, const BigInt& N,
                                       const SparseModel& model, std::span<const double> lambda_grid,
                                       const TransformOptions& opt) {
  check_grid(lambda_grid);
  const auto s = gamma_samples(f, N, model, opt);
  auto d = inverse_transform_squared(s, lambda_grid, opt.tail_tol);
  d.gamma0 = decay::gamma(0.0, f, N, model, opt.integration).real();
  return d;
}

ConvolutionDensity direct_self_convolution(const TestFunction& f, const BigInt& N,
                                           const SparseModel& model,
                                           std::span<const double> lambda_grid) {
  check_grid(lambda_grid);
  auto m = [&](double x) {
    if (!(std::fabs(x) < 2.0)) return 0.0;
    const double fv = f(x);
    return fv == 0.0 ? 0.0 : fv * fv * spectral::ac_density(N, x, model);
  };
  const auto support = f.support();
  ConvolutionDensity d;
  d.source = Source::DirectConvolution;
  d.grid.assign(lambda_grid.begin(), lambda_grid.end());
  d.values.resize(d.grid.size());
  quad::Options qo;
  qo.abs_tol = 1e-13;
  qo.rel_tol = 1e-10;
  qo.initial_panels = 8;
  parallel_for(d.grid.size(), [&](std::size_t j) {
    const double lambda = d.grid[j];
    double acc = 0.0;
    for (const auto& [a, b] : support) {
      // x and lambda - x both need to sit in the support
      double lo = a, hi = b;
      double reach_lo = 4.0, reach_hi = -4.0;
      for (const auto& [c, e] : support) {
        reach_lo = std::min(reach_lo, lambda - e);
        reach_hi = std::max(reach_hi, lambda - c);
      }
      lo = std::max(lo, reach_lo);
      hi = std::min(hi, reach_hi);
      if (!(hi > lo)) continue;
      acc += quad::integrate([&](double x) { return std::complex<double>(m(x) * m(lambda - x)); },
                             lo, hi, qo)
                 .value.real();
    }
    d.values[j] = acc;
  });
  d.mass = trapezoid(d.grid, d.values);
  double g0 = 0.0;
  for (const auto& [a, b] : support)
    g0 += quad::integrate([&](double x) { return std::complex<double>(m(x)); }, a, b, qo).value.real();
  d.gamma0 = g0;
  return d;
}

HistogramComparison histogram_vs_convolution(int L, const SparseModel& model, const TestFunction& f,
                                             const BigInt& N, int bins,
                                             const TransformOptions& opt) {
  check_L(L);
  if (bins < 2) throw ConfigError("kronecker: bins must be >= 2");
  const auto spec = truncated_spectrum(L, model);

  std::vector<double> lam, w;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double fv = f(spec.values[i]);
    const double wi = spec.weights[i] * fv * fv;
    if (wi > 0.0) {
      lam.push_back(spec.values[i]);
      w.push_back(wi);
    }
  }
  HistogramComparison out;
  out.L = L;
  out.pairs = lam.size() * lam.size();
  if (out.pairs < static_cast<std::size_t>(bins))
    throw ConfigError("kronecker: bin underflow, " + std::to_string(out.pairs) +
                      " weighted pairs for " + std::to_string(bins) + " bins");

  std::vector<std::pair<double, double>> pts;
  pts.reserve(out.pairs);
  double wsum = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i)
    for (std::size_t j = 0; j < lam.size(); ++j) {
      pts.emplace_back(lam[i] + lam[j], w[i] * w[j]);
      wsum += w[i] * w[j];
    }
  std::sort(pts.begin(), pts.end());
  out.discrete_mass = wsum;

  out.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) out.bin_edges[static_cast<std::size_t>(k)] = -4.0 + 8.0 * k / bins;
  out.histogram.assign(static_cast<std::size_t>(bins), 0.0);
  for (const auto& [x, wx] : pts) {
    auto k = static_cast<std::size_t>(std::clamp(static_cast<int>((x + 4.0) / 8.0 * bins), 0, bins - 1));
    out.histogram[k] += wx / wsum;
  }

  // continuous CDF on a fine grid strictly inside (-4, 4)
  constexpr int kGrid = 8001;
  std::vector<double> grid(kGrid);
  for (int k = 0; k < kGrid; ++k) grid[static_cast<std::size_t>(k)] = -3.999 + 7.998 * k / (kGrid - 1);
  const auto dens = convolution_density(f, N, model, grid, opt);
  out.continuous_mass = dens.mass;
  std::vector<double> cdf(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k)
    cdf[k] = cdf[k - 1] + 0.5 * (grid[k] - grid[k - 1]) * (dens.values[k] + dens.values[k - 1]);
  const double total = cdf.back();
  if (!(total > 0.0)) throw ToleranceError("kronecker: convolution density has no mass", total);
  auto F = [&](double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const auto k = static_cast<std::size_t>(it - grid.begin());
    const double u = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return (cdf[k - 1] + u * (cdf[k] - cdf[k - 1])) / total;
  };

  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size();) {
    const double x = pts[i].first;
    const double Fc = F(x);
    out.ks = std::max(out.ks, std::fabs(acc - Fc));
    while (i < pts.size() && pts[i].first == x) acc += pts[i++].second / wsum;
    out.ks = std::max(out.ks, std::fabs(acc - Fc));
  }
  return out;
}

}  // namespace sparse_jacobi::kron
