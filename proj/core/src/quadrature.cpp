#include "sparse_jacobi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "sparse_jacobi/errors.hpp"

namespace sparse_jacobi::quad {
namespace {

constexpr double kPi = std::numbers::pi;

// Legendre P_0..P_{n-1} at x.
std::vector<double> legendre_values(int n, double x) {
  std::vector<double> p(static_cast<std::size_t>(std::max(n, 2)));
  p[0] = 1.0;
  p[1] = x;
  for (int k = 1; k + 1 < n; ++k)
    p[static_cast<std::size_t>(k + 1)] =
        ((2.0 * k + 1.0) * x * p[static_cast<std::size_t>(k)] - k * p[static_cast<std::size_t>(k - 1)]) /
        (k + 1.0);
  p.resize(static_cast<std::size_t>(n));
  return p;
}

bool converged(double diff, std::complex<double> value, const Options& opt) {
  return diff <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

Rule clenshaw_curtis(int n) {
  if (n < 2) throw DomainError("Clenshaw-Curtis order must be >= 2");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n + 1));
  r.weights.assign(static_cast<std::size_t>(n + 1), 0.0);
  for (int k = 0; k <= n; ++k) {
    const double theta = kPi * k / n;
    r.nodes[static_cast<std::size_t>(n - k)] = std::cos(theta);
    double s = 0.0;
    for (int j = 1; j <= n / 2; ++j) {
      const double b = (2 * j == n) ? 1.0 : 2.0;
      s += b * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
    }
    const double c = (k == 0 || k == n) ? 1.0 : 2.0;
    r.weights[static_cast<std::size_t>(n - k)] = c / n * (1.0 - s);
  }
  return r;
}

Rule make_rule(Kind kind, int order) {
  return kind == Kind::GaussLegendre ? gauss_legendre(order) : clenshaw_curtis(order);
}

std::complex<double> composite(const ComplexFn& f, double a, double b, int panels, const Rule& rule) {
  const double h = (b - a) / panels;
  std::complex<double> total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

Result integrate(const ComplexFn& f, double a, double b, const Options& opt) {
  const Rule rule = make_rule(opt.kind, opt.order);
  Result res;
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + h * rule.nodes[i]);
    res.evaluations += rule.nodes.size();
    return h * s;
  };
  struct Piece {
    double lo, hi;
    std::complex<double> left, right;
    double err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto make = [&](double lo, double hi, std::complex<double> whole) {
    const double mid = 0.5 * (lo + hi);
    Piece p{lo, hi, panel(lo, mid), panel(mid, hi), 0.0};
    p.err = std::abs(p.left + p.right - whole);
    return p;
  };

  const int initial = std::max(1, opt.initial_panels);
  const double h0 = (b - a) / initial;
  std::priority_queue<Piece> queue;
  std::complex<double> total = 0.0;
  double err = 0.0;
  for (int k = 0; k < initial; ++k) {
    const double lo = a + k * h0;
    const double hi = (k + 1 == initial) ? b : lo + h0;
    Piece p = make(lo, hi, panel(lo, hi));
    total += p.left + p.right;
    err += p.err;
    queue.push(p);
  }
  int panels = initial;
  while (!converged(err, total, opt)) {
    if (panels >= opt.max_panels) {
      throw ToleranceError("quadrature did not reach tolerance within " +
                               std::to_string(opt.max_panels) + " panels",
                           err);
    }
    Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Piece l = make(worst.lo, mid, worst.left);
    Piece r = make(mid, worst.hi, worst.right);
    total += (l.left + l.right + r.left + r.right) - (worst.left + worst.right);
    err += l.err + r.err - worst.err;
    queue.push(l);
    queue.push(r);
    ++panels;
    if (panels % 4096 == 0) {
      // re-accumulate to keep rounding drift out of the stopping test
      std::complex<double> t = 0.0;
      double e = 0.0;
      auto copy = queue;
      while (!copy.empty()) {
        t += copy.top().left + copy.top().right;
        e += copy.top().err;
        copy.pop();
      }
      total = t;
      err = e;
    }
  }
  res.value = total;
  res.error = err;
  res.panels = panels;
  return res;
}

std::vector<std::complex<double>> filon_weights(const Rule& gauss, double nu) {
  const int n = static_cast<int>(gauss.nodes.size());
  // int_{-1}^{1} P_m(u) e^{i nu u} du = 2 i^m j_m(nu)
  std::vector<std::complex<double>> moment(static_cast<std::size_t>(n));
  std::complex<double> im = 1.0;
  for (int m = 0; m < n; ++m) {
    const double jm = (nu == 0.0) ? (m == 0 ? 1.0 : 0.0)
                                  : std::sph_bessel(static_cast<unsigned>(m), std::fabs(nu)) *
                                        ((nu < 0 && m % 2 == 1) ? -1.0 : 1.0);
    moment[static_cast<std::size_t>(m)] = 2.0 * im * jm;
    im *= std::complex<double>(0.0, 1.0);
  }
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto pk = legendre_values(n, gauss.nodes[static_cast<std::size_t>(k)]);
    std::complex<double> s = 0.0;
    for (int m = 0; m < n; ++m)
      s += (m + 0.5) * pk[static_cast<std::size_t>(m)] * moment[static_cast<std::size_t>(m)];
    w[static_cast<std::size_t>(k)] = gauss.weights[static_cast<std::size_t>(k)] * s;
  }
  return w;
}

Result integrate_oscillatory(const ComplexFn& g, double omega, double a, double b,
                             const Options& opt) {
  const Rule rule = gauss_legendre(opt.order);
  auto eval = [&](int panels) {
    const double h = (b - a) / panels;
    const auto w = filon_weights(rule, omega * h / 2.0);
    std::complex<double> total = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double mid = a + (k + 0.5) * h;
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += w[i] * g(mid + 0.5 * h * rule.nodes[i]);
      total += 0.5 * h * std::polar(1.0, std::fmod(omega * mid, 2.0 * kPi)) * s;
    }
    return total;
  };
  int panels = std::max(1, opt.initial_panels);
  Result res;
  std::complex<double> prev = eval(panels);
  res.evaluations += static_cast<std::size_t>(panels) * rule.nodes.size();
  for (;;) {
    const int next = panels * 2;
    if (next > opt.max_panels)
      throw ToleranceError("oscillatory quadrature did not reach tolerance", res.error);
    const std::complex<double> cur = eval(next);
    res.evaluations += static_cast<std::size_t>(next) * rule.nodes.size();
    res.error = std::abs(cur - prev);
    panels = next;
    prev = cur;
    if (converged(res.error, cur, opt)) break;
  }
  res.value = prev;
  res.panels = panels;
  return res;
}

}  // namespace sparse_jacobi::quad
