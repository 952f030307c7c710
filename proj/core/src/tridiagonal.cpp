#include "sparse_jacobi/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparse_jacobi/errors.hpp"

namespace sparse_jacobi::tridiag {

Eigensystem symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (off.size() + 1 != diag.size()) throw ConfigError("tridiagonal: off-diagonal needs n - 1 entries");
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(off.begin(), off.end(), e.begin());
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  z[0] = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  auto at = [](std::vector<double>& v, int i) -> double& { return v[static_cast<std::size_t>(i)]; };

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(at(d, m)) + std::fabs(at(d, m + 1));
        if (std::fabs(at(e, m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > 60)
        throw ToleranceError("tridiagonal QL: no convergence at index " + std::to_string(l),
                             std::fabs(at(e, l)));
      double g = (at(d, l + 1) - at(d, l)) / (2.0 * at(e, l));
      double r = std::hypot(g, 1.0);
      g = at(d, m) - at(d, l) + at(e, l) / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      bool deflated = false;
      for (; i >= l; --i) {
        double f = s * at(e, i);
        const double b = c * at(e, i);
        r = std::hypot(f, g);
        at(e, i + 1) = r;
        if (r == 0.0) {
          at(d, i + 1) -= p;
          at(e, m) = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = at(d, i + 1) - p;
        r = (at(d, i) - g) * s + 2.0 * c * b;
        p = s * r;
        at(d, i + 1) = g + p;
        g = c * r - b;
        f = at(z, i + 1);
        at(z, i + 1) = s * at(z, i) + c * f;
        at(z, i) = c * at(z, i) - s * f;
      }
      if (deflated) continue;
      at(d, l) -= p;
      at(e, l) = g;
      at(e, m) = 0.0;
    } while (m != l);
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  Eigensystem out;
  out.values.reserve(order.size());
  out.first.reserve(order.size());
  for (std::size_t k : order) {
    out.values.push_back(d[k]);
    out.first.push_back(z[k]);
  }
  return out;
}

}  // namespace sparse_jacobi::tridiag
