#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sparse_jacobi/errors.hpp"

namespace sparse_jacobi::jet {

// Operands with different base points or orders.
class OrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Truncated Taylor series at a real base point. Entry k is h^(k)(x) / k!.
template <class T>
class TaylorJet {
 public:
  using value_type = T;

  TaylorJet() : c_(1, T(0)) {}
  TaylorJet(double base, std::vector<T> coeffs) : base_(base), c_(std::move(coeffs)) {
    if (c_.empty()) throw OrderError("jet needs at least the order-0 coefficient");
  }

  static TaylorJet constant(double base, T value, int n_max) {
    std::vector<T> c(static_cast<std::size_t>(n_max) + 1, T(0));
    c[0] = value;
    return TaylorJet(base, std::move(c));
  }
  // The identity x -> x expanded at base.
  static TaylorJet variable(double base, int n_max) {
    auto j = constant(base, T(base), n_max);
    if (n_max >= 1) j.c_[1] = T(1);
    return j;
  }

  double base_point() const { return base_; }
  int order() const { return static_cast<int>(c_.size()) - 1; }
  std::span<const T> coeffs() const { return c_; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  T value() const { return c_[0]; }

  TaylorJet operator-() const {
    TaylorJet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  TaylorJet& operator+=(const TaylorJet& o) {
    check(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  TaylorJet& operator-=(const TaylorJet& o) {
    check(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  TaylorJet& operator*=(const TaylorJet& o) {
    check(o);
    std::vector<T> r(c_.size(), T(0));
    for (std::size_t k = 0; k < c_.size(); ++k)
      for (std::size_t j = 0; j <= k; ++j) r[k] += c_[j] * o.c_[k - j];
    c_ = std::move(r);
    return *this;
  }
  TaylorJet& operator/=(const TaylorJet& o) {
    check(o);
    if (o.c_[0] == T(0)) throw DomainError("jet division by a series with zero constant term");
    std::vector<T> q(c_.size(), T(0));
    for (std::size_t k = 0; k < c_.size(); ++k) {
      T acc = c_[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= o.c_[j] * q[k - j];
      q[k] = acc / o.c_[0];
    }
    c_ = std::move(q);
    return *this;
  }
  TaylorJet& operator+=(T s) { c_[0] += s; return *this; }
  TaylorJet& operator-=(T s) { c_[0] -= s; return *this; }
  TaylorJet& operator*=(T s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  TaylorJet& operator/=(T s) {
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
  friend TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
  friend TaylorJet operator*(TaylorJet a, const TaylorJet& b) { return a *= b; }
  friend TaylorJet operator/(TaylorJet a, const TaylorJet& b) { return a /= b; }
  friend TaylorJet operator+(TaylorJet a, T s) { return a += s; }
  friend TaylorJet operator+(T s, TaylorJet a) { return a += s; }
  friend TaylorJet operator-(TaylorJet a, T s) { return a -= s; }
  friend TaylorJet operator-(T s, const TaylorJet& a) { return -a + s; }
  friend TaylorJet operator*(TaylorJet a, T s) { return a *= s; }
  friend TaylorJet operator*(T s, TaylorJet a) { return a *= s; }
  friend TaylorJet operator/(TaylorJet a, T s) { return a /= s; }
  friend TaylorJet operator/(T s, const TaylorJet& a) {
    return constant(a.base_, s, a.order()) / a;
  }

  void check(const TaylorJet& o) const {
    if (o.base_ != base_ || o.c_.size() != c_.size())
      throw OrderError("jets differ in base point or order (" + std::to_string(order()) +
                       " vs " + std::to_string(o.order()) + ")");
  }

 private:
  double base_ = 0.0;
  std::vector<T> c_;
};

using Jet = TaylorJet<double>;
using JetL = TaylorJet<long double>;
using JetC = TaylorJet<std::complex<double>>;

// Same coefficients, different scalar type.
template <class U, class T>
TaylorJet<U> jet_cast(const TaylorJet<T>& a) {
  std::vector<U> c;
  c.reserve(a.coeffs().size());
  for (const T& v : a.coeffs()) c.push_back(static_cast<U>(v));
  return TaylorJet<U>(a.base_point(), std::move(c));
}

// (h')^[k] = (k+1) h^[k+1]; one order is lost.
template <class T>
TaylorJet<T> derivative(const TaylorJet<T>& a) {
  const int n = a.order();
  if (n < 1) throw OrderError("derivative of an order-0 jet");
  std::vector<T> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = T(k + 1) * a[k + 1];
  return TaylorJet<T>(a.base_point(), std::move(c));
}

// Antiderivative with value c0 at the base point; one order is gained.
template <class T>
TaylorJet<T> integral(const TaylorJet<T>& a, T c0) {
  const int n = a.order();
  std::vector<T> c(static_cast<std::size_t>(n) + 2);
  c[0] = c0;
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k) + 1] = a[k] / T(k + 1);
  return TaylorJet<T>(a.base_point(), std::move(c));
}

template <class T>
TaylorJet<T> truncate(const TaylorJet<T>& a, int n_max) {
  if (n_max > a.order()) throw OrderError("cannot raise the order of a jet by truncation");
  auto s = a.coeffs().first(static_cast<std::size_t>(n_max) + 1);
  return TaylorJet<T>(a.base_point(), std::vector<T>(s.begin(), s.end()));
}

template <class T>
TaylorJet<T> exp(const TaylorJet<T>& a) {
  using std::exp;
  const int n = a.order();
  TaylorJet<T> e = TaylorJet<T>::constant(a.base_point(), exp(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += T(j) * a[j] * e[k - j];
    e[k] = acc / T(k);
  }
  return e;
}

template <class T>
TaylorJet<T> log(const TaylorJet<T>& a) {
  using std::log;
  if (a[0] == T(0)) throw DomainError("log of a jet with zero constant term");
  const int n = a.order();
  TaylorJet<T> l = TaylorJet<T>::constant(a.base_point(), log(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j < k; ++j) acc += T(j) * l[j] * a[k - j];
    l[k] = (a[k] - acc / T(k)) / a[0];
  }
  return l;
}

template <class T>
TaylorJet<T> sqrt(const TaylorJet<T>& a) {
  using std::sqrt;
  if (a[0] == T(0)) throw DomainError("sqrt of a jet with zero constant term");
  const int n = a.order();
  TaylorJet<T> s = TaylorJet<T>::constant(a.base_point(), sqrt(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j < k; ++j) acc += s[j] * s[k - j];
    s[k] = (a[k] - acc) / (T(2) * s[0]);
  }
  return s;
}

// Returns {sin a, cos a}.
template <class T>
std::pair<TaylorJet<T>, TaylorJet<T>> sincos(const TaylorJet<T>& a) {
  using std::cos;
  using std::sin;
  const int n = a.order();
  auto s = TaylorJet<T>::constant(a.base_point(), sin(a[0]), n);
  auto c = TaylorJet<T>::constant(a.base_point(), cos(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    T as(0), ac(0);
    for (int j = 1; j <= k; ++j) {
      as += T(j) * a[j] * c[k - j];
      ac += T(j) * a[j] * s[k - j];
    }
    s[k] = as / T(k);
    c[k] = -ac / T(k);
  }
  return {std::move(s), std::move(c)};
}

template <class T>
TaylorJet<T> sin(const TaylorJet<T>& a) {
  return sincos(a).first;
}
template <class T>
TaylorJet<T> cos(const TaylorJet<T>& a) {
  return sincos(a).second;
}

// Angle of (x, y), continued from the principal value at the base point.
template <class T>
TaylorJet<T> atan2(const TaylorJet<T>& y, const TaylorJet<T>& x) {
  static_assert(std::is_floating_point_v<T>, "atan2 needs a real scalar");
  y.check(x);
  const T v0 = std::atan2(y[0], x[0]);
  if (y.order() == 0) return TaylorJet<T>::constant(y.base_point(), v0, 0);
  const auto yd = derivative(y);
  const auto xd = derivative(x);
  const auto y1 = truncate(y, y.order() - 1);
  const auto x1 = truncate(x, x.order() - 1);
  return integral((x1 * yd - y1 * xd) / (x1 * x1 + y1 * y1), v0);
}

// Substitution route for g o f: sum_k g^[k] (f - f^[0])^k by Horner's scheme.
// outer[k] = g^[k] at the point f^[0].
template <class T>
TaylorJet<T> compose_series(std::span<const T> outer, const TaylorJet<T>& inner) {
  const int n = inner.order();
  if (static_cast<int>(outer.size()) < n + 1) throw OrderError("outer series shorter than inner jet");
  TaylorJet<T> d = inner;
  d[0] = T(0);
  auto acc = TaylorJet<T>::constant(inner.base_point(), outer[static_cast<std::size_t>(n)], n);
  for (int k = n - 1; k >= 0; --k) {
    acc *= d;
    acc[0] += outer[static_cast<std::size_t>(k)];
  }
  return acc;
}

}  // namespace sparse_jacobi::jet
