#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparse_jacobi/bigint.hpp"
#include "sparse_jacobi/sparse_model.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

namespace sparse_jacobi::decay {

using model::PhiWindow;
using model::SparseModel;
using spectral::TestFunction;

// int f^2 e^{i t lambda} d rho_N
std::complex<double> gamma(double t, const TestFunction& f, const BigInt& N,
                           const SparseModel& model, const spectral::IntegrationOptions& opt = {});

// Phi interval covered by the support of f (positive half for mirrored f).
PhiWindow phi_window_of(const TestFunction& f);

struct CriticalPhi {
  int l = 0;
  double phi = 0.0;
};

struct ResonanceInfo {
  double t = 0.0;
  int j_star = 0;  // beta_{j*} <= t < beta_{j*+1}
  int n_star = 0;  // (n* - 1) beta_{j*} <= t < n* beta_{j*}
  bool last_barrier = false;  // j* = J, no beta_{j*+1} to bound n* with
  std::vector<CriticalPhi> critical_phis;  // roots of -sin phi + l theta'_{j*}(phi) / t
  int distinct_l = 0;  // number of l with at least one root
  double theta_prime_min = 0.0;  // over the scanned window
  double theta_prime_max = 0.0;
  double L = 0.0;  // t / beta_{j*}, slope 1 / beta_{j*} on each bracket
  double omega_unit = 0.0;  // e^{c ln^2 ln t}
  double L_bound = 0.0;  // E e^{c ln^2 ln t}
};

struct ResonanceOptions {
  PhiWindow window{0.6, 2.5};
  int scan_points = 2048;
  double c = 1.0;  // exponent in e^{c ln^2 ln t}
  std::optional<double> E;  // when unset, E = L / omega_unit at this t
};

// nullopt when t < beta_1: no bracket, hence no resonance structure.
std::optional<ResonanceInfo> resonance_info(double t, const SparseModel& model,
                                            const ResonanceOptions& opt = {});

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;    // RMS of the fit residuals in ln |gamma|
  double half_width = 0.0;  // 95% Student-t half-width of the exponent
  std::size_t first = 0;    // fit window [first, last)
  std::size_t last = 0;
  std::size_t used = 0;  // points with gamma_abs > 0
  bool omega_corrected = false;
};

struct FitOptions {
  std::size_t first = 0;
  std::size_t last = 0;  // 0 means the whole grid
  // divides |gamma| by these values (Omega(t)) before the fit
  std::span<const double> omega{};
};

// Least squares of ln |gamma| against ln t; needs >= 10 positive points spanning >= 2 decades.
DecayFit decay_fit(std::span<const double> t_grid, std::span<const double> gamma_abs,
                   const FitOptions& opt = {});

struct DecayScan {
  std::vector<double> t_grid;
  std::vector<double> gamma_abs;
  std::vector<std::complex<double>> gamma;
  double gamma0 = 0.0;
  std::vector<std::optional<ResonanceInfo>> resonance_marks;
  double E = 0.0;  // sup of L / e^{c ln^2 ln t} over the grid
  std::vector<double> omega;  // sqrt(E) e^{(c/2) ln^2 ln t}
  std::optional<DecayFit> fit;
  std::optional<DecayFit> fit_omega;
};

struct DecayScanOptions {
  ResonanceOptions resonance{};
  bool resonance_marks = true;
  spectral::IntegrationOptions integration{};
};

DecayScan decay_scan(const TestFunction& f, const BigInt& N, const SparseModel& model,
                     std::span<const double> t_grid, const DecayScanOptions& opt = {});

DecayFit decay_fit(const DecayScan& scan, bool omega_correction = false);

struct OmegaRow {
  double t = 0.0;
  double ln_omega_sq = 0.0;  // c ln^2 ln t + ln E
  double ratio = 0.0;        // Omega(t) / t^eps
  double dlog = 0.0;  // d ln ratio / d ln t = c ln ln t / ln t - eps
};

struct OmegaGrowth {
  double c = 0.0;
  double epsilon = 0.0;
  double E = 1.0;
  std::vector<OmegaRow> rows;
  // last t where the ratio turns from increasing to decreasing; nullopt when it never increases
  std::optional<double> turning_point;
  std::size_t first_after = 0;  // first grid index beyond the turning point
  bool decreasing_after = true;  // on the grid, from first_after on
  bool derivative_signs_agree = true;  // grid differences vs the symbolic derivative
};

OmegaGrowth omega_growth_check(double c, double epsilon, std::span<const double> t_grid,
                               double E = 1.0);

}  // namespace sparse_jacobi::decay
