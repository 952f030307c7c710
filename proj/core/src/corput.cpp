#include "sparse_jacobi/corput.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/parallel.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

namespace sparse_jacobi::decay {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

double slope_at(double lambda) { return 1.0 / (kPi * std::sqrt(4.0 - lambda * lambda)); }
double curvature_at(double lambda) {
  return std::fabs(lambda) / std::pow(4.0 - lambda * lambda, 1.5);
}

int panels_for(double length, double rate, double per_panel) {
  return static_cast<int>(std::ceil(length * rate / per_panel)) + 1;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

// K' from the first-derivative estimate with kappa = r t, t > 0, taken over |tau| > Delta t.
double k_prime_apriori(double r, const KernelConstants& kc) {
  const double Delta = 1.0 + r * kc.slope_sup;
  const double neg = Delta / (Delta - 1.0 + r * kc.slope_inf);
  return 3.0 / (2.0 * kPi) * std::max({1.0, Delta / 2.0, neg});
}

}  // namespace

void check_window(const Window& w) {
  if (!(w.a < w.b)) throw DomainError("window needs a < b");
  if (!(w.a > -2.0 && w.b < 2.0)) throw DomainError("window must lie inside (-2, 2)");
  if (w.a <= 0.0 && w.b >= 0.0) throw DomainError("window must not contain 0");
}

double phase_tx(double t, double kappa, double lambda) {
  return t * lambda + kappa / kPi * std::acos(lambda / 2.0);
}

KernelConstants kernel_constants(const Window& w) {
  check_window(w);
  // |lambda| / (4 - lambda^2)^{3/2} and 1/sqrt(4 - lambda^2) both grow with |lambda|
  const double near = std::min(std::fabs(w.a), std::fabs(w.b));
  const double far = std::max(std::fabs(w.a), std::fabs(w.b));
  const double s = 2.0 * kPi * kPi;
  return {curvature_at(far) / s, curvature_at(near) / s, slope_at(far), slope_at(near)};
}

double delta_cutoff(double t, double kappa, const Window& w) {
  const auto kc = kernel_constants(w);
  return 1.0 + std::fabs(kappa / t) * kc.slope_sup;
}

KernelSample corput_kernel(double t, double tau, double kappa, const Window& w,
                           const KernelOptions& opt) {
  const auto kc = kernel_constants(w);
  KernelSample s;
  s.t = t;
  s.tau = tau;
  s.kappa = kappa;
  // Filon in tau + t; panels follow the acos part only
  quad::Options q;
  q.abs_tol = opt.abs_tol;
  q.rel_tol = opt.rel_tol;
  q.initial_panels = panels_for(w.b - w.a, std::fabs(kappa) * kc.slope_sup, 1.5);
  const auto res = quad::integrate_oscillatory(
      [&](double lambda) { return std::exp(kI * (kappa / kPi * std::acos(lambda / 2.0))); }, t + tau,
      w.a, w.b, q);
  s.Lambda = res.value / (2.0 * kPi);
  s.error = res.error / (2.0 * kPi);
  s.Delta_cutoff = t == 0.0 ? std::numeric_limits<double>::infinity()
                            : 1.0 + std::fabs(kappa / t) * kc.slope_sup;
  s.large_tau = t != 0.0 && std::fabs(tau) > s.Delta_cutoff * std::fabs(t);
  const double ak = std::fabs(kappa);
  s.bound_small_tau = ak > 0.0 ? 4.0 / std::sqrt(kc.rho_sup * ak) : std::numeric_limits<double>::infinity();
  s.bound_small_tau_inf = ak > 0.0 ? 4.0 / std::sqrt(kc.rho_inf * ak) : std::numeric_limits<double>::infinity();
  // F' is monotone on the window, so its extreme values sit at the ends
  const double fa = t + tau - kappa * slope_at(w.a);
  const double fb = t + tau - kappa * slope_at(w.b);
  const double min_abs = (fa > 0.0) == (fb > 0.0) ? std::min(std::fabs(fa), std::fabs(fb)) : 0.0;
  s.first_derivative_bound = min_abs > 0.0 ? 3.0 / (2.0 * kPi * min_abs)
                                           : std::numeric_limits<double>::infinity();
  return s;
}

CorputScan corput_scan(const CorputScanOptions& opt) {
  check_window(opt.window);
  if (opt.t_points < 1 || opt.tau_points < 1 || !(opt.t_min > 0.0) || opt.t_max < opt.t_min)
    throw ConfigError("corput scan: bad grid");
  const auto ts = log_grid(opt.t_min, opt.t_max, opt.t_points);
  const auto nt = ts.size();
  const auto ntau = static_cast<std::size_t>(opt.tau_points);
  CorputScan scan;
  scan.samples.resize(nt * ntau);
  parallel_for(nt * ntau, [&](std::size_t k) {
    const double t = ts[k / ntau];
    const auto i = static_cast<double>(k % ntau);
    const double u = ntau == 1 ? 0.0 : -1.0 + 2.0 * i / static_cast<double>(ntau - 1);
    const double tau = u * opt.tau_span * t;
    scan.samples[k] = corput_kernel(t, tau, opt.kappa_ratio * t, opt.window, opt.kernel);
  });
  for (const auto& s : scan.samples) {
    if (s.large_tau) scan.K_prime = std::max(scan.K_prime, std::fabs(s.tau) * s.first_derivative_bound);
  }
  for (const auto& s : scan.samples) {
    const double a = std::abs(s.Lambda);
    if (s.large_tau) {
      ++scan.large_cells;
      scan.K_prime_observed = std::max(scan.K_prime_observed, a * std::fabs(s.tau));
      const double r = a * std::fabs(s.tau) / scan.K_prime;
      scan.worst_large_ratio = std::max(scan.worst_large_ratio, r);
      if (r > 1.0) ++scan.large_violations;
    } else {
      ++scan.small_cells;
      scan.K_observed = std::max(scan.K_observed, a * std::sqrt(1.0 + std::fabs(s.t)));
      scan.worst_small_ratio = std::max(scan.worst_small_ratio, a / s.bound_small_tau);
      scan.worst_small_ratio_inf = std::max(scan.worst_small_ratio_inf, a / s.bound_small_tau_inf);
      if (a > s.bound_small_tau) ++scan.small_violations;
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------------------------

SyntheticMeasure::SyntheticMeasure(Kind kind, Window w, double center, double scale,
                                   double epsilon)
    : kind_(kind), window_(w), center_(center), scale_(scale), epsilon_(epsilon) {
  check_window(w);
  if (kind == Kind::Smooth && !(scale > 0.0)) throw ConfigError("smooth measure: sigma must be > 0");
  if (kind == Kind::PowerSingular) {
    if (!(center > w.a && center < w.b)) throw ConfigError("power singularity must be inside the window");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    power_ = 0;
    for (int m = 1; m <= 64 && power_ == 0; ++m) {
      const double e = m * (1.0 - epsilon);
      if (std::fabs(e - std::round(e)) < 1e-12) power_ = m;
    }
    if (power_ == 0) throw ConfigError("epsilon must be 1 - k/m with m <= 64");
  }
  norm_ = 1.0;
  const double mass = integrate([](double) { return std::complex<double>(1.0); }, 0.0).value.real();
  if (!(mass > 0.0)) throw ConfigError("synthetic measure has no mass");
  norm_ = 1.0 / mass;
}

SyntheticMeasure SyntheticMeasure::smooth(double center, double sigma, Window w) {
  return SyntheticMeasure(Kind::Smooth, w, center, sigma, 0.0);
}
SyntheticMeasure SyntheticMeasure::semicircle(Window w) {
  return SyntheticMeasure(Kind::Semicircle, w, 0.0, 1.0, 0.0);
}
SyntheticMeasure SyntheticMeasure::power_singular(double center, double epsilon, Window w) {
  return SyntheticMeasure(Kind::PowerSingular, w, center, 1.0, epsilon);
}

double SyntheticMeasure::raw_density(double lambda) const {
  if (lambda < window_.a || lambda > window_.b) return 0.0;
  switch (kind_) {
    case Kind::Smooth: {
      const double r = 0.25 * (window_.b - window_.a);
      const double cut = spectral::smooth_step((lambda - window_.a) / r) *
                         spectral::smooth_step((window_.b - lambda) / r);
      const double z = (lambda - center_) / scale_;
      return cut * std::exp(-0.5 * z * z);
    }
    case Kind::Semicircle:
      return std::sqrt(4.0 - lambda * lambda) / (2.0 * kPi);
    case Kind::PowerSingular:
      return lambda == center_ ? std::numeric_limits<double>::infinity()
                               : std::pow(std::fabs(lambda - center_), -epsilon_);
  }
  return 0.0;
}

double SyntheticMeasure::density(double lambda) const { return norm_ * raw_density(lambda); }

quad::Result SyntheticMeasure::integrate(const quad::ComplexFn& h, double rate, double abs_tol,
                                         double rel_tol) const {
  quad::Options q;
  // phases of size rate * len carry absolute rounding of about eps * rate * len per value
  q.abs_tol = std::max(abs_tol, 16.0 * std::numeric_limits<double>::epsilon() * rate * (window_.b - window_.a));
  q.rel_tol = rel_tol;
  const double len = window_.b - window_.a;
  if (kind_ != Kind::PowerSingular) {
    const double shape = kind_ == Kind::Smooth ? 4.0 * len / scale_ : 1.0;
    q.initial_panels = std::max(panels_for(len, rate, 1.5), static_cast<int>(std::ceil(shape)));
    auto r = quad::integrate([&](double x) { return raw_density(x) * h(x); }, window_.a, window_.b, q);
    r.value *= norm_;
    r.error *= norm_;
    return r;
  }
  // lambda = center +- s^m: the weight m s^{m - 1 - m eps} is a polynomial in s
  const int m = power_;
  const int k = static_cast<int>(std::lround(m * (1.0 - epsilon_))) - 1;
  quad::Result total;
  for (int side : {-1, 1}) {
    const double L = side < 0 ? center_ - window_.a : window_.b - center_;
    const double top = std::pow(L, 1.0 / m);
    const double srate = rate * m * std::pow(L, (m - 1.0) / m);
    q.initial_panels = panels_for(top, srate, 1.5);
    const auto r = quad::integrate(
        [&](double s) { return static_cast<double>(m) * std::pow(s, k) * h(center_ + side * std::pow(s, m)); },
        0.0, top, q);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.panels += r.panels;
  }
  total.value *= norm_;
  total.error *= norm_;
  return total;
}

quad::Result SyntheticMeasure::integrate_oscillatory(const quad::ComplexFn& g, double omega,
                                                     double g_rate, double abs_tol,
                                                     double rel_tol) const {
  if (kind_ == Kind::PowerSingular)
    return integrate([&](double x) { return g(x) * std::exp(kI * (omega * x)); },
                     std::fabs(omega) + g_rate, abs_tol, rel_tol);
  quad::Options q;
  q.abs_tol = abs_tol;
  q.rel_tol = rel_tol;
  const double len = window_.b - window_.a;
  const double shape = kind_ == Kind::Smooth ? 4.0 * len / scale_ : 1.0;
  q.initial_panels = std::max(panels_for(len, g_rate, 1.5), static_cast<int>(std::ceil(shape)));
  auto r = quad::integrate_oscillatory([&](double x) { return raw_density(x) * g(x); }, omega,
                                       window_.a, window_.b, q);
  r.value *= norm_;
  r.error *= norm_;
  return r;
}

std::complex<double> SyntheticMeasure::transform(double tau) const {
  return integrate_oscillatory([](double) { return std::complex<double>(1.0); }, tau, 0.0).value;
}

std::complex<double> gamma_synthetic(const SyntheticMeasure& G, double t, double kappa) {
  const auto kc = kernel_constants(G.window());
  return G
      .integrate_oscillatory([&](double x) { return std::exp(kI * (kappa / kPi * std::acos(x / 2.0))); },
                             t, std::fabs(kappa) * kc.slope_sup)
      .value;
}

double ls_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("slope fit needs >= 2 paired points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ConfigError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

LemmaTable lemma_main_bound(const SyntheticMeasure& G, std::span<const double> t_grid,
                            const LemmaOptions& opt) {
  if (t_grid.empty()) throw ConfigError("lemma-main: empty t grid");
  for (double t : t_grid)
    if (!(t >= 2.0)) throw ConfigError("lemma-main: t values must be >= 2");
  if (!(opt.kappa_ratio > 0.0)) throw ConfigError("lemma-main: kappa ratio must be > 0");
  const auto kc = kernel_constants(G.window());
  LemmaTable tab;
  tab.epsilon = G.epsilon();
  const double e1 = 1.0 - tab.epsilon;

  const auto ns = static_cast<std::size_t>(std::max(2, opt.tau_samples));
  std::vector<double> weighted(ns);
  parallel_for(ns, [&](std::size_t i) {
    const double tau = opt.tau_max * static_cast<double>(i) / static_cast<double>(ns - 1);
    weighted[i] = std::abs(G.transform(tau)) * std::pow(1.0 + tau, e1);
  });
  tab.C = *std::max_element(weighted.begin(), weighted.end());
  tab.K = 4.0 * std::sqrt(1.5 / (kc.rho_sup * opt.kappa_ratio));
  tab.K_prime = k_prime_apriori(opt.kappa_ratio, kc);
  const double Delta = 1.0 + opt.kappa_ratio * kc.slope_sup;

  tab.rows.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    LemmaRow& r = tab.rows[i];
    r.t = t_grid[i];
    r.kappa = opt.kappa_ratio * r.t;
    r.gamma = gamma_synthetic(G, r.t, r.kappa);
    const double a = std::abs(r.gamma);
    r.ratio = a * std::sqrt(r.t) / std::log(r.t);
    r.ratio_eps = a * std::pow(r.t, 0.5 - tab.epsilon);
    const double X = Delta * r.t;
    if (tab.epsilon == 0.0) {
      r.piece_small = tab.K / std::sqrt(1.0 + r.t) * 2.0 * tab.C * std::log1p(X);
      r.piece_large = 2.0 * tab.K_prime * tab.C * std::log1p(1.0 / X);
    } else {
      r.piece_small = tab.K / std::sqrt(1.0 + r.t) * 2.0 * tab.C *
                      (std::pow(1.0 + X, tab.epsilon) - 1.0) / tab.epsilon;
      r.piece_large = 2.0 * tab.K_prime * tab.C * std::pow(X, -e1) / e1;
    }
    r.within_split = a <= r.piece_small + r.piece_large;
  });

  std::vector<double> lt, lr, le;
  for (const auto& r : tab.rows) {
    tab.sup_ratio = std::max(tab.sup_ratio, r.ratio);
    tab.sup_ratio_eps = std::max(tab.sup_ratio_eps, r.ratio_eps);
    tab.all_within_split = tab.all_within_split && r.within_split;
    lt.push_back(std::log(r.t));
    // floor keeps an exact zero out of the logarithm
    lr.push_back(std::log(std::max(r.ratio, std::numeric_limits<double>::min())));
    le.push_back(std::log(std::max(r.ratio_eps, std::numeric_limits<double>::min())));
  }
  if (lt.size() >= 2) {
    tab.trend_slope = ls_slope(lt, lr);
    tab.trend_slope_eps = ls_slope(lt, le);
  }
  return tab;
}

std::vector<PlancherelCheck> plancherel_check(const SyntheticMeasure& G,
                                              std::span<const double> t_values,
                                              const PlancherelOptions& opt) {
  if (!(opt.panel_width > 0.0) || !(opt.T_limit > opt.panel_width))
    throw ConfigError("plancherel: bad tau discretisation");
  const Window w = G.window();
  const auto kc = kernel_constants(w);

  // T_max: the last unit-spaced tau where |G^| is still above the floor
  const auto nprobe = static_cast<std::size_t>(std::ceil(opt.T_limit)) + 1;
  std::vector<double> probe(nprobe);
  parallel_for(nprobe, [&](std::size_t i) { probe[i] = std::abs(G.transform(static_cast<double>(i))); });
  double last = 0.0;
  for (std::size_t i = 0; i < nprobe; ++i)
    if (probe[i] >= opt.transform_floor * probe[0]) last = static_cast<double>(i);
  if (last + 1.0 >= opt.T_limit)
    throw ToleranceError("plancherel: transform does not fall below the floor before T_limit", last);
  const double T = opt.panel_width * std::ceil((last + 1.0) / opt.panel_width);

  double C = 0.0;
  for (std::size_t i = 0; i < nprobe; ++i) C = std::max(C, probe[i] * (1.0 + static_cast<double>(i)));

  // tau nodes for widths h and h/2
  const quad::Rule gl = quad::gauss_legendre(16);
  auto tau_nodes = [&](double h, std::vector<double>& x, std::vector<double>& wt) {
    const int panels = static_cast<int>(std::lround(2.0 * T / h));
    for (int p = 0; p < panels; ++p) {
      const double mid = -T + (p + 0.5) * h;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        x.push_back(mid + 0.5 * h * gl.nodes[k]);
        wt.push_back(0.5 * h * gl.weights[k]);
      }
    }
  };
  std::vector<double> xc, wc, xf, wf;
  tau_nodes(opt.panel_width, xc, wc);
  tau_nodes(0.5 * opt.panel_width, xf, wf);
  std::vector<std::complex<double>> gc(xc.size()), gf(xf.size());
  // G real: conj(G^(tau)) = G^(-tau)
  parallel_for(xc.size(), [&](std::size_t i) { gc[i] = std::conj(G.transform(xc[i])); });
  parallel_for(xf.size(), [&](std::size_t i) { gf[i] = std::conj(G.transform(xf[i])); });

  std::vector<PlancherelCheck> out(t_values.size());
  parallel_for(t_values.size(), [&](std::size_t it) {
    PlancherelCheck& c = out[it];
    c.t = t_values[it];
    const double kappa = opt.kappa_ratio * c.t;
    c.direct = gamma_synthetic(G, c.t, kappa);
    c.T_max = T;
    // fixed lambda rule fine enough for the largest tau
    const double rate = std::fabs(c.t) + T + kappa * kc.slope_sup;
    const int lp = panels_for(w.b - w.a, rate, 1.5);
    const double lh = (w.b - w.a) / lp;
    const std::size_t nk = gl.nodes.size();
    std::vector<std::complex<double>> base;  // panel-major, weights and e^{i t x} folded in
    for (int p = 0; p < lp; ++p) {
      const double mid = w.a + (p + 0.5) * lh;
      for (std::size_t k = 0; k < nk; ++k) {
        const double x = mid + 0.5 * lh * gl.nodes[k];
        base.push_back(0.5 * lh * gl.weights[k] * std::exp(kI * phase_tx(c.t, kappa, x)) / (2.0 * kPi));
      }
    }
    // e^{i tau lambda} split as e^{i tau mid_p} e^{i tau offset_k}, mid_p stepped by lh
    auto route = [&](const std::vector<double>& x, const std::vector<double>& wt,
                     const std::vector<std::complex<double>>& g) {
      std::complex<double> acc = 0.0;
      std::vector<std::complex<double>> off(nk);
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t k = 0; k < nk; ++k) off[k] = std::exp(kI * (x[i] * 0.5 * lh * gl.nodes[k]));
        const auto step = std::exp(kI * (x[i] * lh));
        auto cur = std::exp(kI * (x[i] * (w.a + 0.5 * lh)));
        std::complex<double> Lambda = 0.0;
        for (int p = 0; p < lp; ++p) {
          std::complex<double> s = 0.0;
          const auto* b = &base[static_cast<std::size_t>(p) * nk];
          for (std::size_t k = 0; k < nk; ++k) s += b[k] * off[k];
          Lambda += cur * s;
          cur *= step;
        }
        acc += wt[i] * Lambda * g[i];
      }
      return acc;
    };
    const auto coarse = route(xc, wc, gc);
    c.plancherel = route(xf, wf, gf);
    c.resolution_change = std::abs(c.plancherel - coarse);
    c.tail_bound = 2.0 * k_prime_apriori(opt.kappa_ratio, kc) * C / T;
    c.rel_error = std::abs(c.plancherel - c.direct) / std::abs(c.direct);
  });
  return out;
}

}  // namespace sparse_jacobi::decay
