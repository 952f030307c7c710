#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparse_jacobi/sparse_model.hpp"
#include "sparse_jacobi/taylor_jet.hpp"

namespace sparse_jacobi::gevrey {

using jet::TaylorJet;
using model::SparseModel;

// P[k][n] = sum over i_1 + ... + i_k = n, i_j >= 1, of f^[i_1] ... f^[i_k]; k, n = 0..order.
template <class T>
std::vector<std::vector<T>> partition_table(const TaylorJet<T>& inner) {
  const int n = inner.order();
  const auto sz = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<T>> P(sz, std::vector<T>(sz, T(0)));
  P[0][0] = T(1);
  for (std::size_t k = 1; k < sz; ++k)
    for (std::size_t m = k; m < sz; ++m) {
      T acc(0);
      for (std::size_t i = 1; i + k - 1 <= m; ++i) acc += inner[static_cast<int>(i)] * P[k - 1][m - i];
      P[k][m] = acc;
    }
  return P;
}

// (g o f)^[n] = sum_k g^[k](f) P[k][n]. outer[k] = g^[k] at f^[0], k = 0..order.
template <class T>
TaylorJet<T> scott_compose(std::span<const T> outer, const TaylorJet<T>& inner) {
  const int n = inner.order();
  if (static_cast<int>(outer.size()) != n + 1)
    throw jet::OrderError("outer coefficients must match the inner jet order");
  const auto P = partition_table(inner);
  auto r = TaylorJet<T>::constant(inner.base_point(), outer[0], n);
  for (int m = 1; m <= n; ++m) {
    T acc(0);
    for (int k = 1; k <= m; ++k)
      acc += outer[static_cast<std::size_t>(k)] * P[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
    r[m] = acc;
  }
  return r;
}

// Outer coefficient generators at the point x, orders 0..n.
std::vector<double> sin_series(double x, int n);
std::vector<double> cos_series(double x, int n);
std::vector<double> exp_series(double x, int n);
// (1/x)^[k] = (-1)^k / x^{k+1}
std::vector<double> reciprocal_series(double x, int n);

// Jets in phi of theta_j (pre-barrier angle, constant term reduced to [0, 2pi)) and ln R_j^2,
// j = 0..m.
template <class T>
struct PruferJets {
  std::vector<TaylorJet<T>> theta;
  std::vector<TaylorJet<T>> log_R2;
};

template <class T>
PruferJets<T> prufer_jets(double phi, const SparseModel& model, int m, int n_max);

// Barrier map h(theta) = theta + shift(theta) as a jet in theta at fixed phi.
template <class T>
TaylorJet<T> barrier_map_jet(const TaylorJet<T>& theta, const TaylorJet<T>& kappa, double p);
// R_k^2 / R_{k+1}^2 at a barrier hit at angle theta.
template <class T>
TaylorJet<T> radius_ratio_jet(const TaylorJet<T>& theta, const TaylorJet<T>& kappa, double p);

// C_0 in {0, K}, C_n = K / n^2.
struct CSequence {
  double K = 0.0;
  bool c0_is_K = false;
  double operator[](long n) const {
    if (n == 0) return c0_is_K ? K : 0.0;
    return K / (static_cast<double>(n) * static_cast<double>(n));
  }
};

struct ConvolutionCheck {
  bool pass = true;
  double worst_margin = 1.0;  // min over (k, n) of 1 - (C^{*k})_n / C_n
  int worst_k = 0;
  long worst_n = 0;
  std::optional<std::pair<int, long>> witness;  // first violating (k, n)
  double sup_double_ratio = 0.0;                // sup_n (C*C)_n / C_n
  long sup_double_at = 0;
  double stated_double_bound = 0.0;  // 2K(1 + pi^2/3) with C_0 = K, 2 pi^2 K / 3 with C_0 = 0
};

// k-fold convolutions for k = 2..k_max, compared with C pointwise for n <= n_max.
ConvolutionCheck check_convolution_lemma(double K, bool c0_is_K, long n_max, int k_max);

inline constexpr double kScottK = 3.0 / (2.0 * std::numbers::pi * std::numbers::pi);
inline constexpr double kLemmaK = 1.0 / (2.0 + 2.0 * std::numbers::pi * std::numbers::pi / 3.0);

struct CertificateCell {
  int m = 0;
  int n = 0;
  double value = 0.0;  // sup over the phi grid
  double bound = 0.0;
  double margin = 0.0;  // 1 - value / bound
  bool pass = false;
  std::string inequality;
};

struct CertifyOptions {
  double delta = 0.125;
  double K = kScottK;
  double xi_slack = 0.05;  // xi = (1 + slack) * measured root rate
  std::optional<double> xi;  // fixes xi instead of measuring it
  int theta_samples = 128;
  int harmonic_max = 8;  // exp(i n g o theta) checks for n = 1..harmonic_max
  bool extended = false;  // long double jets
};

struct GevreyCertificate {
  int m_max = 0;
  int n_max = 0;
  double delta = 0.0;
  double K = 0.0;
  double Delta = 0.0;
  double eta = 0.0;
  double xi = 0.0;
  double c1 = 0.0;
  double zeta = 0.0;
  double eta_tilde = 0.0;
  double eta_hat = 0.0;
  double d = 0.0;
  double D = 0.0;
  // smallness conditions on delta for the induction; reported, not enforced
  bool small_delta_n2 = false;
  std::vector<CertificateCell> smallness;  // one row per n >= 2
  std::vector<CertificateCell> cells;      // theta jets, one row per (m, n)
  std::vector<CertificateCell> exp_cells;  // exp(i n g) and exp(i n g o theta_m)
  bool complete = true;
  std::string stop_reason;

  bool cells_pass() const;
};

GevreyCertificate certify_gevrey(std::span<const double> phi_grid, const SparseModel& model,
                                 int m_max, int n_max, const CertifyOptions& opt = {});

// Value at the base point of f_n = (1/n!) (d/dx rho)^n f_0.
struct PartsOperator {
  double iteration = 0.0;  // direct application of the operator
  double partition = 0.0;  // expansion over (k_1..k_n, p) with exact multiplicities
  double unit_weight_sum = 0.0;  // same expansion with every weight set to 1
  double unit_weight_abs = 0.0;  // sum of |rho^[k_1]| ... |f_0^[p]|
};

PartsOperator iterated_parts_operator(const TaylorJet<double>& rho, const TaylorJet<double>& f0,
                                      int n);

struct CombinedBound {
  int m = 0;
  int n = 0;
  double lhs = 0.0;  // sup over phi of n! |f_n|
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

// rho = 1 / theta'_{m+1}, f_0 = 1 / R_m^2, R_0 = 1; needs m + 1 barriers.
CombinedBound combined_bound_check(std::span<const double> phi_grid, const SparseModel& model,
                                   int m, int n, const GevreyCertificate& cert);

struct RemarkBoundRow {
  int k = 0;
  double value = 0.0;  // sup |rho^[k]|, rho = 1/(t h'_{m+1})
  double rhok = 0.0;
  double rhokk = 0.0;
  bool rhok_pass = false;
  bool rhokk_pass = false;
  // 2|t| >= harmonic * sup |theta_{m+1}^{(k+1)}|, the range where the second bound is meant to apply
  bool time_dominated = false;
};

// t h_{m+1}(phi) = 2 t cos phi + harmonic * theta_{m+1}(phi), for t above the scale of theta'.
std::vector<RemarkBoundRow> remark_bounds(std::span<const double> phi_grid, const SparseModel& model,
                                          int m, int harmonic, double t, int k_max,
                                          const GevreyCertificate& cert);

struct SparsenessRow {
  int j = 0;
  double log_lhs = 0.0;  // N ln D - j ln delta + N ln(beta_j / beta_{j+1}) + ln N!
  double log_rhs = 0.0;  // -ln beta_{j+1}
  bool holds = false;
  double log_exact = 0.0;     // ln(beta_{j+1} (beta_j / beta_{j+1})^N N!)
  double log_stirling = 0.0;  // leading Stirling form of the same quantity
};

// beta_j = delta^{-j} exp(c j ln^2 j), N_j = j + 1, everything in logarithms.
std::vector<SparsenessRow> sparseness_condition(double c, double delta, double D, int j_max);

}  // namespace sparse_jacobi::gevrey
