#include "sparse_jacobi/fourier_decay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/gevrey_calculus.hpp"
#include "sparse_jacobi/parallel.hpp"

namespace sparse_jacobi::decay {
namespace {

double theta_prime(double phi, const SparseModel& model, int j) {
  return gevrey::prufer_jets<double>(phi, model, j, 1).theta[static_cast<std::size_t>(j)][1];
}

double log_log_sq(double t) {
  const double ll = std::log(std::log(t));
  return ll * ll;
}

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::complex<double> gamma(double t, const TestFunction& f, const BigInt& N,
                           const SparseModel& model, const spectral::IntegrationOptions& opt) {
  return spectral::integrate_against(f, N, model, t, spectral::Form::Lambda, opt).value;
}

PhiWindow phi_window_of(const TestFunction& f) {
  return {std::acos(f.hi() / 2.0), std::acos(f.lo() / 2.0)};
}

std::optional<ResonanceInfo> resonance_info(double t, const SparseModel& model,
                                            const ResonanceOptions& opt) {
  const auto gaps = model.gaps();
  if (gaps.empty()) throw ConfigError("resonance: model has no barriers");
  if (!(opt.window.lo < opt.window.hi) || opt.window.lo < 0.0 || opt.window.hi > std::numbers::pi)
    throw ConfigError("resonance: phi window must be an interval inside [0, pi]");
  if (opt.scan_points < 2) throw ConfigError("resonance: scan_points must be >= 2");
  if (!(t >= gaps.front().get_d())) return std::nullopt;

  ResonanceInfo info;
  info.t = t;
  const int J = static_cast<int>(gaps.size());
  for (int j = 1; j <= J; ++j)
    if (gaps[static_cast<std::size_t>(j - 1)].get_d() <= t) info.j_star = j;
  const double beta = gaps[static_cast<std::size_t>(info.j_star - 1)].get_d();
  info.last_barrier = info.j_star == J;
  info.n_star = static_cast<int>(std::floor(t / beta)) + 1;
  info.L = t / beta;
  info.omega_unit = std::exp(opt.c * log_log_sq(t));
  info.L_bound = opt.E.value_or(info.L / info.omega_unit) * info.omega_unit;

  const auto n = static_cast<std::size_t>(opt.scan_points);
  std::vector<double> phis(n), dth(n);
  for (std::size_t i = 0; i < n; ++i)
    phis[i] = opt.window.lo + (opt.window.hi - opt.window.lo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
  parallel_for(n, [&](std::size_t i) { dth[i] = theta_prime(phis[i], model, info.j_star); });
  info.theta_prime_min = *std::min_element(dth.begin(), dth.end());
  info.theta_prime_max = *std::max_element(dth.begin(), dth.end());

  // sin phi <= 1 caps l at t / min theta'
  for (int l = 1; l * info.theta_prime_min <= t; ++l) {
    auto F = [&](double phi) { return -std::sin(phi) + l * theta_prime(phi, model, info.j_star) / t; };
    bool any = false;
    double prev = -std::sin(phis[0]) + l * dth[0] / t;
    if (prev == 0.0) {
      info.critical_phis.push_back({l, phis[0]});
      any = true;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double cur = -std::sin(phis[i]) + l * dth[i] / t;
      if (cur == 0.0) {
        info.critical_phis.push_back({l, phis[i]});
        any = true;
      } else if (prev != 0.0 && (cur > 0.0) != (prev > 0.0)) {
        info.critical_phis.push_back({l, bisect(F, phis[i - 1], phis[i], prev)});
        any = true;
      }
      prev = cur;
    }
    if (any) ++info.distinct_l;
  }
  return info;
}

DecayFit decay_fit(std::span<const double> t_grid, std::span<const double> gamma_abs,
                   const FitOptions& opt) {
  if (t_grid.size() != gamma_abs.size()) throw ConfigError("decay fit: t and gamma sizes differ");
  if (!opt.omega.empty() && opt.omega.size() != t_grid.size())
    throw ConfigError("decay fit: omega size differs from the t grid");
  DecayFit fit;
  fit.first = opt.first;
  fit.last = opt.last == 0 ? t_grid.size() : opt.last;
  fit.omega_corrected = !opt.omega.empty();
  if (fit.first >= fit.last || fit.last > t_grid.size()) throw ConfigError("decay fit: bad window");

  std::vector<double> x, y;
  for (std::size_t i = fit.first; i < fit.last; ++i) {
    if (!(t_grid[i] > 0.0)) throw ConfigError("decay fit: t values must be positive");
    if (gamma_abs[i] < 0.0) throw ConfigError("decay fit: negative |gamma|");
    if (gamma_abs[i] == 0.0) continue;
    const double w = opt.omega.empty() ? 1.0 : opt.omega[i];
    x.push_back(std::log(t_grid[i]));
    y.push_back(std::log(gamma_abs[i] / w));
  }
  if (x.empty()) throw ConfigError("decay fit: degenerate scan, every |gamma| is zero");
  fit.used = x.size();
  if (x.size() < 10) throw ConfigError("decay fit: needs at least 10 nonzero points");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi - *lo < 2.0 * std::log(10.0) - 1e-12) throw ConfigError("decay fit: window spans less than 2 decades");

  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.exponent * x[i];
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / m);
  const boost::math::students_t dist(m - 2.0);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.half_width = q * std::sqrt(sse / (m - 2.0) / sxx);
  return fit;
}

DecayScan decay_scan(const TestFunction& f, const BigInt& N, const SparseModel& model,
                     std::span<const double> t_grid, const DecayScanOptions& opt) {
  if (t_grid.empty()) throw ConfigError("decay scan: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 2.0)) throw ConfigError("decay scan: t values must be >= 2");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ConfigError("decay scan: t grid must increase");
  }
  DecayScan scan;
  scan.t_grid.assign(t_grid.begin(), t_grid.end());
  const std::size_t n = t_grid.size();
  scan.gamma.resize(n);
  scan.gamma_abs.resize(n);
  scan.resonance_marks.resize(n);
  scan.gamma0 = gamma(0.0, f, N, model, opt.integration).real();
  const bool marks = opt.resonance_marks && !model.is_free();
  ResonanceOptions ro = opt.resonance;
  ro.E.reset();
  parallel_for(n, [&](std::size_t i) {
    scan.gamma[i] = gamma(t_grid[i], f, N, model, opt.integration);
    scan.gamma_abs[i] = std::abs(scan.gamma[i]);
  });
  if (marks)
    for (std::size_t i = 0; i < n; ++i) scan.resonance_marks[i] = resonance_info(t_grid[i], model, ro);

  scan.E = 0.0;
  for (const auto& r : scan.resonance_marks)
    if (r) scan.E = std::max(scan.E, r->L / r->omega_unit);
  if (scan.E == 0.0) scan.E = 1.0;
  for (auto& r : scan.resonance_marks)
    if (r) r->L_bound = scan.E * r->omega_unit;
  scan.omega.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    scan.omega[i] = std::sqrt(scan.E) * std::exp(0.5 * ro.c * log_log_sq(t_grid[i]));

  try {
    scan.fit = decay_fit(scan.t_grid, scan.gamma_abs);
    FitOptions fo;
    fo.omega = scan.omega;
    scan.fit_omega = decay_fit(scan.t_grid, scan.gamma_abs, fo);
  } catch (const ConfigError&) {
    // too few points or decades for a fit; the samples are still reported
  }
  return scan;
}

DecayFit decay_fit(const DecayScan& scan, bool omega_correction) {
  FitOptions fo;
  if (omega_correction) fo.omega = scan.omega;
  return decay_fit(scan.t_grid, scan.gamma_abs, fo);
}

OmegaGrowth omega_growth_check(double c, double epsilon, std::span<const double> t_grid, double E) {
  if (!(epsilon > 0.0)) throw ConfigError("omega growth: epsilon must be > 0");
  if (!(E > 0.0)) throw ConfigError("omega growth: E must be > 0");
  OmegaGrowth g;
  g.c = c;
  g.epsilon = epsilon;
  g.E = E;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t > 1.0)) throw ConfigError("omega growth: t values must be > 1");
    if (i > 0 && !(t > t_grid[i - 1])) throw ConfigError("omega growth: t grid must increase");
    OmegaRow r;
    r.t = t;
    r.ln_omega_sq = c * log_log_sq(t) + std::log(E);
    r.ratio = std::exp(0.5 * r.ln_omega_sq - epsilon * std::log(t));
    const double u = std::log(t);
    r.dlog = c * std::log(u) / u - epsilon;
    g.rows.push_back(r);
  }
  // c ln u = eps u has roots only for 0 < eps / c < 1/e; the larger one ends the increase
  if (c > 0.0 && epsilon / c < std::exp(-1.0)) {
    const double w = boost::math::lambert_wm1(-epsilon / c);
    g.turning_point = std::exp(-c / epsilon * w);
  }
  g.first_after = 0;
  if (g.turning_point) {
    while (g.first_after < g.rows.size() && g.rows[g.first_after].t <= *g.turning_point) ++g.first_after;
  }
  for (std::size_t i = g.first_after + 1; i < g.rows.size(); ++i)
    if (!(g.rows[i].ratio < g.rows[i - 1].ratio)) g.decreasing_after = false;
  for (std::size_t i = 1; i < g.rows.size(); ++i) {
    const auto& a = g.rows[i - 1];
    const auto& b = g.rows[i];
    if ((a.dlog > 0.0) != (b.dlog > 0.0)) continue;  // a sign change inside the step
    const double step = std::log(b.ratio) - std::log(a.ratio);
    if ((step > 0.0) != (a.dlog > 0.0)) g.derivative_signs_agree = false;
  }
  return g;
}

}  // namespace sparse_jacobi::decay
