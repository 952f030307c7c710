#include "sparse_jacobi/gevrey_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/parallel.hpp"
#include "sparse_jacobi/phase.hpp"

namespace sparse_jacobi::gevrey {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
std::vector<T> sincos_series(T x, int n, bool want_sin) {
  using std::cos;
  using std::sin;
  std::vector<T> c(static_cast<std::size_t>(n) + 1);
  const T s0 = sin(x), c0 = cos(x);
  // d^k sin = sin(x + k pi/2)
  T fact(1);
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= T(k);
    const int r = k % 4;
    T v;
    if (want_sin)
      v = r == 0 ? s0 : r == 1 ? c0 : r == 2 ? -s0 : -c0;
    else
      v = r == 0 ? c0 : r == 1 ? -s0 : r == 2 ? -c0 : s0;
    c[static_cast<std::size_t>(k)] = v / fact;
  }
  return c;
}

template <class T>
TaylorJet<T> kappa_jet(double phi, double p, int n) {
  auto x = TaylorJet<T>::variable(phi, n);
  auto [s, c] = jet::sincos(x);
  return T(1.0 - p * p) * c / s;
}

template <class T>
std::pair<TaylorJet<T>, TaylorJet<T>> sheared(const TaylorJet<T>& theta, const TaylorJet<T>& kappa,
                                              double p, TaylorJet<T>& s, TaylorJet<T>& c) {
  const int n = theta.order();
  const T t0 = theta[0];
  auto ss = sincos_series<T>(t0, n, true);
  auto cs = sincos_series<T>(t0, n, false);
  s = scott_compose<T>(ss, theta);
  c = scott_compose<T>(cs, theta);
  const T pt = T(p);
  auto lx = pt * c;
  auto ly = (s - kappa * c) / pt;
  return {std::move(lx), std::move(ly)};
}

double checked_ratio(double value, double bound) {
  if (bound == kInf) return 0.0;
  if (bound <= 0.0) return value == 0.0 ? 0.0 : kInf;
  return value / bound;
}

CertificateCell make_cell(int m, int n, double value, double bound, std::string what) {
  CertificateCell cell;
  cell.m = m;
  cell.n = n;
  cell.value = value;
  cell.bound = bound;
  const double r = checked_ratio(value, bound);
  cell.margin = 1.0 - r;
  cell.pass = std::isfinite(value) && r <= 1.0;
  cell.inequality = std::move(what);
  return cell;
}

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

}  // namespace

std::vector<double> sin_series(double x, int n) { return sincos_series<double>(x, n, true); }
std::vector<double> cos_series(double x, int n) { return sincos_series<double>(x, n, false); }

std::vector<double> exp_series(double x, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  double v = std::exp(x);
  for (int k = 0; k <= n; ++k) {
    if (k > 0) v /= k;
    c[static_cast<std::size_t>(k)] = v;
  }
  return c;
}

std::vector<double> reciprocal_series(double x, int n) {
  if (x == 0.0) throw DomainError("reciprocal series at 0");
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  double v = 1.0 / x;
  for (int k = 0; k <= n; ++k) {
    c[static_cast<std::size_t>(k)] = v;
    v *= -1.0 / x;
  }
  return c;
}

template <class T>
TaylorJet<T> barrier_map_jet(const TaylorJet<T>& theta, const TaylorJet<T>& kappa, double p) {
  if (p == 1.0) return theta;
  TaylorJet<T> s, c;
  auto [lx, ly] = sheared(theta, kappa, p, s, c);
  auto num = c * ly - s * lx;
  auto den = c * lx + s * ly;
  return theta + jet::atan2(num, den);
}

template <class T>
TaylorJet<T> radius_ratio_jet(const TaylorJet<T>& theta, const TaylorJet<T>& kappa, double p) {
  if (p == 1.0) return TaylorJet<T>::constant(theta.base_point(), T(1), theta.order());
  TaylorJet<T> s, c;
  auto [lx, ly] = sheared(theta, kappa, p, s, c);
  return T(1) / (lx * lx + ly * ly);
}

template <class T>
PruferJets<T> prufer_jets(double phi, const SparseModel& model, int m, int n_max) {
  if (!(phi > 0.0 && phi < kPi)) throw DomainError("phi must lie in (0, pi)");
  if (m < 0 || m > model.barrier_count()) throw DomainError("m outside the model's barrier range");
  if (n_max < 1) throw jet::OrderError("jet order must be >= 1");
  const double p = model.p();
  const auto gaps = model.gaps();
  const auto kappa = kappa_jet<T>(phi, p, n_max);

  PruferJets<T> out;
  auto theta0 = TaylorJet<T>::variable(phi, n_max) - T(kPi / 2.0);
  theta0[0] = T(wrap_two_pi(phi - kPi / 2.0));
  out.theta.push_back(theta0);
  out.log_R2.push_back(TaylorJet<T>::constant(phi, T(0), n_max));
  for (int j = 1; j <= m; ++j) {
    const auto& prev = out.theta.back();
    auto next = (j == 1) ? prev : barrier_map_jet(prev, kappa, p);
    const BigInt& beta = gaps[static_cast<std::size_t>(j - 1)];
    next[1] += T(beta.get_d());
    next[0] = T(wrap_two_pi(static_cast<double>(next[0]) + reduce_phase(beta, phi)));
    auto ratio = radius_ratio_jet(next, kappa, p);
    out.log_R2.push_back(out.log_R2.back() - jet::log(ratio));
    out.theta.push_back(std::move(next));
  }
  return out;
}

template TaylorJet<double> barrier_map_jet(const TaylorJet<double>&, const TaylorJet<double>&, double);
template TaylorJet<long double> barrier_map_jet(const TaylorJet<long double>&,
                                                const TaylorJet<long double>&, double);
template TaylorJet<double> radius_ratio_jet(const TaylorJet<double>&, const TaylorJet<double>&, double);
template TaylorJet<long double> radius_ratio_jet(const TaylorJet<long double>&,
                                                 const TaylorJet<long double>&, double);
template PruferJets<double> prufer_jets(double, const SparseModel&, int, int);
template PruferJets<long double> prufer_jets(double, const SparseModel&, int, int);

ConvolutionCheck check_convolution_lemma(double K, bool c0_is_K, long n_max, int k_max) {
  if (!(K > 0.0)) throw ConfigError("K must be positive");
  if (n_max < 1 || n_max > 10000) throw ConfigError("n_max must lie in [1, 10^4]");
  if (k_max < 2) throw ConfigError("k_max must be >= 2");
  const CSequence C{K, c0_is_K};
  const auto len = static_cast<std::size_t>(n_max) + 1;
  std::vector<double> c(len);
  for (std::size_t n = 0; n < len; ++n) c[n] = C[static_cast<long>(n)];

  ConvolutionCheck out;
  out.stated_double_bound = c0_is_K ? 2.0 * K * (1.0 + kPi * kPi / 3.0) : 2.0 * kPi * kPi * K / 3.0;
  std::vector<double> conv = c;
  std::vector<double> next(len);
  constexpr std::size_t kBlock = 256;
  for (int k = 2; k <= k_max; ++k) {
    parallel_for((len + kBlock - 1) / kBlock, [&](std::size_t b) {
      const std::size_t hi = std::min(len, (b + 1) * kBlock);
      for (std::size_t n = b * kBlock; n < hi; ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= n; ++i) acc += conv[i] * c[n - i];
        next[n] = acc;
      }
    });
    conv.swap(next);
    for (std::size_t n = 0; n < len; ++n) {
      if (c[n] == 0.0) {
        // only n = 0 with C_0 = 0, where every convolution vanishes as well
        continue;
      }
      const double ratio = conv[n] / c[n];
      if (k == 2 && ratio > out.sup_double_ratio) {
        out.sup_double_ratio = ratio;
        out.sup_double_at = static_cast<long>(n);
      }
      const double margin = 1.0 - ratio;
      if (margin < out.worst_margin) {
        out.worst_margin = margin;
        out.worst_k = k;
        out.worst_n = static_cast<long>(n);
      }
      // relative slack for summation rounding
      if (ratio > 1.0 + 1e-12 && !out.witness) {
        out.pass = false;
        out.witness = std::pair{k, static_cast<long>(n)};
      }
    }
  }
  return out;
}

bool GevreyCertificate::cells_pass() const {
  return complete && std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.pass; });
}

namespace {

struct PhiSample {
  std::vector<std::vector<double>> theta_abs;  // [m][n]
  double Delta = 0.0;
  std::vector<double> g_sup;  // |h^[k]| in theta, k = 0..n
  std::vector<double> F_sup;  // |F^[k]|
  std::vector<std::vector<double>> eg_sup;                 // [harmonic][N]
  std::vector<std::vector<std::vector<double>>> egt_sup;  // [harmonic][q][N]
  bool finite = true;
};

template <class T>
PhiSample sample_phi(double phi, const SparseModel& model, int m_max, int n_max,
                     const CertifyOptions& opt) {
  PhiSample out;
  const double p = model.p();
  const auto gaps = model.gaps();
  const auto jets = prufer_jets<T>(phi, model, m_max, n_max);
  out.theta_abs.assign(static_cast<std::size_t>(m_max) + 1,
                       std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0));
  for (int m = 1; m <= m_max; ++m) {
    const auto& th = jets.theta[static_cast<std::size_t>(m)];
    for (int n = 1; n <= n_max; ++n) {
      const double v = std::fabs(static_cast<double>(th[n]));
      if (!std::isfinite(v)) out.finite = false;
      out.theta_abs[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = v;
    }
    const double beta = gaps[static_cast<std::size_t>(m - 1)].get_d();
    out.Delta = std::max(out.Delta, std::fabs(static_cast<double>(th[1]) / beta - 1.0));
  }

  const auto sz = static_cast<std::size_t>(n_max) + 1;
  const T kap = T((1.0 - p * p) * std::cos(phi) / std::sin(phi));
  out.g_sup.assign(sz, 0.0);
  out.F_sup.assign(sz, 0.0);
  const int H = opt.harmonic_max;
  out.eg_sup.assign(static_cast<std::size_t>(H) + 1, std::vector<double>(sz, 0.0));
  out.egt_sup.assign(static_cast<std::size_t>(H) + 1,
                     std::vector<std::vector<double>>(static_cast<std::size_t>(m_max) + 1,
                                                      std::vector<double>(sz, 0.0)));
  auto eig = [&](const TaylorJet<T>& hj, int harmonic) {
    auto z = jet::jet_cast<std::complex<double>>(hj);
    z *= std::complex<double>(0.0, harmonic);
    return jet::exp(z);
  };
  for (int i = 0; i < opt.theta_samples; ++i) {
    const double th = kPi * (i + 0.5) / opt.theta_samples;
    const auto tj = TaylorJet<T>::variable(th, n_max);
    const auto kj = TaylorJet<T>::constant(th, kap, n_max);
    const auto hj = barrier_map_jet(tj, kj, p);
    const auto Fj = radius_ratio_jet(tj, kj, p);
    for (std::size_t k = 0; k < sz; ++k) {
      out.g_sup[k] = std::max(out.g_sup[k], std::fabs(static_cast<double>(hj[static_cast<int>(k)])));
      out.F_sup[k] = std::max(out.F_sup[k], std::fabs(static_cast<double>(Fj[static_cast<int>(k)])));
    }
    for (int h = 1; h <= H; ++h) {
      const auto e = eig(hj, h);
      for (std::size_t k = 1; k < sz; ++k)
        out.eg_sup[static_cast<std::size_t>(h)][k] =
            std::max(out.eg_sup[static_cast<std::size_t>(h)][k], std::abs(e[static_cast<int>(k)]));
    }
  }
  // exp(i n h) composed with theta_q: Scott's formula with the outer series taken at theta_q(phi)
  for (int q = 1; q <= m_max; ++q) {
    const auto& thq = jets.theta[static_cast<std::size_t>(q)];
    const double t0 = static_cast<double>(thq[0]);
    const auto tj = TaylorJet<T>::variable(t0, n_max);
    const auto kj = TaylorJet<T>::constant(t0, kap, n_max);
    const auto hj = barrier_map_jet(tj, kj, p);
    const auto inner = jet::jet_cast<std::complex<double>>(thq);
    for (int h = 1; h <= H; ++h) {
      const auto e = eig(hj, h);
      const auto comp = scott_compose<std::complex<double>>(e.coeffs(), inner);
      for (std::size_t k = 1; k < sz; ++k)
        out.egt_sup[static_cast<std::size_t>(h)][static_cast<std::size_t>(q)][k] =
            std::abs(comp[static_cast<int>(k)]);
    }
  }
  return out;
}

// Smallest zeta with sup|F^[k]| <= ((1 - delta/zeta)/delta) (zeta/delta)^k for all k.
double fit_zeta(const std::vector<double>& F_sup, double delta) {
  auto ok = [&](double z) {
    for (std::size_t k = 0; k < F_sup.size(); ++k) {
      const double lhs = std::log(F_sup[k]);
      const double rhs = std::log((1.0 - delta / z) / delta) + static_cast<double>(k) * std::log(z / delta);
      if (F_sup[k] > 0.0 && lhs > rhs) return false;
    }
    return true;
  };
  if (F_sup[0] * delta >= 1.0) return kInf;
  double lo = delta, hi = 2.0 * delta;
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

GevreyCertificate certify_gevrey(std::span<const double> phi_grid, const SparseModel& model,
                                 int m_max, int n_max, const CertifyOptions& opt) {
  if (phi_grid.empty()) throw ConfigError("empty phi grid");
  if (m_max < 1 || m_max > model.barrier_count()) throw ConfigError("m_max outside the barrier range");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (!(opt.delta > 0.0 && opt.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const auto gaps = model.gaps();
  for (int j = 2; j <= m_max; ++j) {
    const double r = gaps[static_cast<std::size_t>(j - 2)].get_d() / gaps[static_cast<std::size_t>(j - 1)].get_d();
    if (r > opt.delta * (1.0 + 1e-15))
      throw ConfigError("increment ratio beta_" + std::to_string(j - 1) + "/beta_" + std::to_string(j) +
                        " exceeds delta");
  }

  std::vector<PhiSample> samples(phi_grid.size());
  parallel_for(phi_grid.size(), [&](std::size_t i) {
    samples[i] = opt.extended ? sample_phi<long double>(phi_grid[i], model, m_max, n_max, opt)
                              : sample_phi<double>(phi_grid[i], model, m_max, n_max, opt);
  });

  GevreyCertificate cert;
  cert.m_max = m_max;
  cert.n_max = n_max;
  cert.delta = opt.delta;
  cert.K = opt.K;
  const auto sz = static_cast<std::size_t>(n_max) + 1;
  std::vector<std::vector<double>> theta_sup(static_cast<std::size_t>(m_max) + 1, std::vector<double>(sz, 0.0));
  std::vector<double> g_sup(sz, 0.0), F_sup(sz, 0.0);
  const int H = opt.harmonic_max;
  std::vector<std::vector<double>> eg(static_cast<std::size_t>(H) + 1, std::vector<double>(sz, 0.0));
  std::vector<std::vector<std::vector<double>>> egt(
      static_cast<std::size_t>(H) + 1,
      std::vector<std::vector<double>>(static_cast<std::size_t>(m_max) + 1, std::vector<double>(sz, 0.0)));
  for (const auto& s : samples) {
    if (!s.finite) {
      cert.complete = false;
      cert.stop_reason = "non-finite jet coefficient";
    }
    cert.Delta = std::max(cert.Delta, s.Delta);
    for (std::size_t m = 1; m < theta_sup.size(); ++m)
      for (std::size_t n = 1; n < sz; ++n) theta_sup[m][n] = std::max(theta_sup[m][n], s.theta_abs[m][n]);
    for (std::size_t k = 0; k < sz; ++k) {
      g_sup[k] = std::max(g_sup[k], s.g_sup[k]);
      F_sup[k] = std::max(F_sup[k], s.F_sup[k]);
    }
    for (std::size_t h = 1; h < eg.size(); ++h)
      for (std::size_t k = 1; k < sz; ++k) {
        eg[h][k] = std::max(eg[h][k], s.eg_sup[h][k]);
        for (std::size_t q = 1; q < egt[h].size(); ++q) egt[h][q][k] = std::max(egt[h][q][k], s.egt_sup[h][q][k]);
      }
  }

  const double delta = opt.delta;
  const double K = opt.K;
  const CSequence C{K, false};
  cert.eta = (1.0 + cert.Delta) / (delta * K);

  if (opt.xi) {
    cert.xi = *opt.xi;
  } else {
    double rate = 0.0;
    for (int k = std::max(1, (n_max + 1) / 2); k <= n_max; ++k)
      rate = std::max(rate, std::pow(g_sup[static_cast<std::size_t>(k)], 1.0 / k));
    cert.xi = std::max(rate, 1.0) * (1.0 + opt.xi_slack);
  }
  for (int k = 1; k <= n_max; ++k)
    cert.c1 = std::max(cert.c1, g_sup[static_cast<std::size_t>(k)] / std::pow(cert.xi, k));
  cert.zeta = fit_zeta(F_sup, delta);

  double sup_root = 0.0;
  for (int i = 2; i <= 10000; ++i)
    sup_root = std::max(sup_root, std::pow((i - 1.0) * (i - 1.0) / i, 1.0 / i));
  cert.eta_tilde = cert.eta * sup_root;
  if (cert.Delta < 1.0) {
    cert.eta_hat = delta * cert.eta_tilde * cert.eta_tilde / (1.0 - cert.Delta);
    cert.d = delta * cert.eta_tilde / (delta * cert.eta_tilde + cert.Delta - 1.0);
  } else {
    cert.eta_hat = kInf;
    cert.d = kInf;
  }
  cert.D = cert.d * std::max(cert.eta_hat, cert.zeta * cert.eta);

  // smallness conditions of the induction
  const double xi = cert.xi, c1 = cert.c1;
  {
    const double a = c1 * xi * delta * delta;
    const double v = a < 1.0 ? 2.0 * K * c1 * xi * xi * delta * delta / (1.0 - a) : kInf;
    cert.small_delta_n2 = a < 1.0 && v <= 1.0;
    cert.smallness.push_back(make_cell(0, 2, v, 1.0, "c1 (n = 2)"));
  }
  for (int n = 3; n <= n_max; ++n) {
    const double a = c1 * xi * std::pow(delta, n);
    const double v = a < 1.0 && xi > 1.0 ? c1 * xi / (xi - 1.0) * std::pow(xi * delta, n) / (1.0 - a) : kInf;
    cert.smallness.push_back(make_cell(0, n, v, 1.0, "c1"));
  }

  for (int m = 1; m <= m_max && cert.complete; ++m) {
    const double beta_m = gaps[static_cast<std::size_t>(m - 1)].get_d();
    const double beta_prev = m > 1 ? gaps[static_cast<std::size_t>(m - 2)].get_d() : 1.0;
    for (int n = 1; n <= n_max; ++n) {
      const double v = theta_sup[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
      if (n == 1) {
        cert.cells.push_back(make_cell(m, n, v, C[1] * delta * cert.eta * beta_m, "K delta eta beta_m"));
      } else {
        const double bound = C[n] * std::pow(cert.eta * beta_prev, n);
        cert.cells.push_back(make_cell(m, n, v, bound, m > 1 ? "C_n (eta beta_{m-1})^n" : "C_n eta^n (affine theta_1)"));
      }
    }
  }

  for (int h = 1; h <= H; ++h) {
    const double c2 = std::expm1(h * c1);
    const double c3 = c2 * xi / (xi - 1.0);
    for (int N = 1; N <= n_max; ++N)
      cert.exp_cells.push_back(make_cell(h, N, eg[static_cast<std::size_t>(h)][static_cast<std::size_t>(N)],
                                         c2 * std::pow(xi, N), "c2"));
    for (int q = 1; q <= m_max; ++q) {
      const double beta_q = gaps[static_cast<std::size_t>(q - 1)].get_d();
      for (int N = 1; N <= n_max; ++N) {
        const double bound = c3 * C[N] * std::pow(delta * xi * cert.eta * beta_q, N);
        auto cell = make_cell(h, N, egt[static_cast<std::size_t>(h)][static_cast<std::size_t>(q)][static_cast<std::size_t>(N)],
                              bound, "c3 (theta_" + std::to_string(q) + ")");
        cert.exp_cells.push_back(std::move(cell));
      }
    }
  }
  return cert;
}

PartsOperator iterated_parts_operator(const TaylorJet<double>& rho, const TaylorJet<double>& f0, int n) {
  if (n < 0) throw jet::OrderError("n must be >= 0");
  if (rho.order() < n || f0.order() < n) throw jet::OrderError("jets of order >= n are required");
  if (rho.base_point() != f0.base_point()) throw jet::OrderError("jets at different base points");
  PartsOperator out;

  auto g = jet::truncate(f0, n);
  for (int i = 0; i < n; ++i) g = jet::derivative(jet::truncate(rho, g.order()) * g);
  out.iteration = g[0] / factorial(n);

  // Depth-first walk over (k_1, .., k_n, p). The i-th derivative (counted from the outside) can
  // only land on factors i..n+1, so position j has j - S_{j-1} derivatives available, with
  // S the running total. Weight = prod_j avail!/(avail - k_j)! * p! / n! times the products.
  struct Walk {
    const TaylorJet<double>& rho;
    const TaylorJet<double>& f0;
    int n;
    PartsOperator& out;
    void go(int j, int used, double weighted, double unit, double unit_abs) {
      if (j == n + 1) {
        const int p = n - used;
        const double fp = f0[p];
        out.unit_weight_sum += unit * fp;
        out.unit_weight_abs += unit_abs * std::fabs(fp);
        out.partition += weighted * factorial(p) * fp;
        return;
      }
      const int avail = j - used;
      for (int k = 0; k + used <= n; ++k) {
        const double r = rho[k];
        double w = 0.0;
        if (k <= avail && weighted != 0.0) {
          w = weighted;
          for (int q = 0; q < k; ++q) w *= avail - q;
          w *= r;
        }
        go(j + 1, used + k, w, unit * r, unit_abs * std::fabs(r));
      }
    }
  };
  Walk{rho, f0, n, out}.go(1, 0, 1.0, 1.0, 1.0);
  out.partition /= factorial(n);
  return out;
}

CombinedBound combined_bound_check(std::span<const double> phi_grid, const SparseModel& model, int m,
                                   int n, const GevreyCertificate& cert) {
  if (!(cert.D > 0.0) || cert.delta <= 0.0 || cert.K <= 0.0) throw ConfigError("certificate constants missing");
  if (m < 1 || m + 1 > model.barrier_count()) throw ConfigError("combined bound needs m + 1 barriers");
  if (n < 1) throw ConfigError("n must be >= 1");
  std::vector<double> lhs(phi_grid.size());
  parallel_for(phi_grid.size(), [&](std::size_t i) {
    const auto jets = prufer_jets<double>(phi_grid[i], model, m + 1, n + 1);
    const auto rho = 1.0 / jet::derivative(jets.theta[static_cast<std::size_t>(m) + 1]);
    const auto f0 = jet::exp(-jet::truncate(jets.log_R2[static_cast<std::size_t>(m)], n));
    lhs[i] = factorial(n) * std::fabs(iterated_parts_operator(rho, f0, n).iteration);
  });
  const auto gaps = model.gaps();
  const double ratio = gaps[static_cast<std::size_t>(m - 1)].get_d() / gaps[static_cast<std::size_t>(m)].get_d();
  CombinedBound out;
  out.m = m;
  out.n = n;
  out.lhs = *std::max_element(lhs.begin(), lhs.end());
  const CSequence C{cert.K, false};
  out.rhs = C[n] * std::pow(cert.D * ratio, n) * std::pow(cert.delta, -m) * factorial(n);
  out.margin = 1.0 - checked_ratio(out.lhs, out.rhs);
  out.pass = std::isfinite(out.lhs) && out.lhs <= out.rhs;
  return out;
}

std::vector<RemarkBoundRow> remark_bounds(std::span<const double> phi_grid, const SparseModel& model, int m,
                                          int harmonic, double t, int k_max, const GevreyCertificate& cert) {
  if (phi_grid.empty()) throw ConfigError("empty phi grid");
  if (m < 1 || m + 1 > model.barrier_count()) throw ConfigError("remark bounds need m + 1 barriers");
  if (harmonic < 1 || k_max < 1 || !(t > 0.0)) throw ConfigError("harmonic, k_max and t must be positive");
  const auto sz = static_cast<std::size_t>(k_max) + 1;
  std::vector<std::vector<double>> per(phi_grid.size(), std::vector<double>(sz, 0.0));
  std::vector<std::vector<double>> dtheta(phi_grid.size(), std::vector<double>(sz, 0.0));
  parallel_for(phi_grid.size(), [&](std::size_t i) {
    const double phi = phi_grid[i];
    const auto jets = prufer_jets<double>(phi, model, m + 1, k_max + 1);
    const auto x = TaylorJet<double>::variable(phi, k_max);
    auto th = -2.0 * t * jet::sin(x) +
              static_cast<double>(harmonic) * jet::derivative(jets.theta[static_cast<std::size_t>(m) + 1]);
    const auto rho = 1.0 / th;
    const auto& th1 = jets.theta[static_cast<std::size_t>(m) + 1];
    for (std::size_t k = 0; k < sz; ++k) {
      per[i][k] = std::fabs(rho[static_cast<int>(k)]);
      // plain derivative theta^{(k+1)}
      dtheta[i][k] = std::fabs(th1[static_cast<int>(k) + 1]) * factorial(static_cast<int>(k) + 1);
    }
  });
  double cmin = kInf;
  for (double phi : phi_grid) cmin = std::min(cmin, 2.0 * std::sin(phi));
  const double d_n = 2.0 * cert.d * harmonic / cmin;
  const double beta_m = model.gaps()[static_cast<std::size_t>(m - 1)].get_d();
  const CSequence C{cert.K, false};
  std::vector<RemarkBoundRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    RemarkBoundRow r;
    r.k = k;
    for (const auto& v : per) r.value = std::max(r.value, v[static_cast<std::size_t>(k)]);
    double dmax = 0.0;
    for (const auto& v : dtheta) dmax = std::max(dmax, v[static_cast<std::size_t>(k)]);
    r.time_dominated = 2.0 * t >= harmonic * dmax;
    r.rhok = d_n / t * C[k] * std::pow(cert.eta_hat * beta_m, k);
    double s = 0.0;
    for (int l = 1; l <= k; ++l) s += std::pow(2.0, l) * std::pow(l, k) / std::pow(cmin, l + 1);
    r.rhokk = std::pow(2.0, k) / t / factorial(k) * s;
    r.rhok_pass = r.value <= r.rhok;
    r.rhokk_pass = r.value <= r.rhokk;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SparsenessRow> sparseness_condition(double c, double delta, double D, int j_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(D > 0.0)) throw ConfigError("D must be positive");
  if (j_max < 1) throw ConfigError("j_max must be >= 1");
  auto log_beta = [&](double j) {
    const double l = std::log(j);
    return -j * std::log(delta) + c * j * l * l;
  };
  std::vector<SparsenessRow> rows;
  for (int j = 1; j <= j_max; ++j) {
    const double N = j + 1.0;
    const double lb = log_beta(j), lb1 = log_beta(j + 1.0);
    SparsenessRow r;
    r.j = j;
    r.log_lhs = N * std::log(D) - j * std::log(delta) + N * (lb - lb1) + std::lgamma(N + 1.0);
    r.log_rhs = -lb1;
    r.holds = r.log_lhs <= r.log_rhs;
    r.log_exact = lb1 + N * (lb - lb1) + std::lgamma(N + 1.0);
    r.log_stirling = -0.5 * std::log(2.0 * kPi * N) + N * (std::log(N) - 1.0) - 2.0 * c * N * std::log(N);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sparse_jacobi::gevrey
