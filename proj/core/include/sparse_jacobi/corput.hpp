#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "sparse_jacobi/quadrature.hpp"

namespace sparse_jacobi::decay {

// Closed interval inside (-2, 0) or (0, 2).
struct Window {
  double a = 0.5;
  double b = 1.5;
};

// Throws DomainError when [a, b] is empty, reaches +-2 or contains 0.
void check_window(const Window& w);

// t x(t, lambda) = t lambda + (kappa / pi) acos(lambda / 2)
double phase_tx(double t, double kappa, double lambda);

// Window constants for the curvature and slope of acos(lambda / 2).
struct KernelConstants {
  double rho_sup = 0.0;  // 2 pi^2 rho = sup |lambda| / (4 - lambda^2)^{3/2}
  double rho_inf = 0.0;  // same with inf, the one that lower-bounds |f''|
  double slope_sup = 0.0;  // sup 1 / (pi sqrt(4 - lambda^2))
  double slope_inf = 0.0;
};

KernelConstants kernel_constants(const Window& w);

// Delta = 1 + |kappa / t| slope_sup
double delta_cutoff(double t, double kappa, const Window& w);

struct KernelSample {
  double t = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  std::complex<double> Lambda;
  double error = 0.0;
  double Delta_cutoff = 0.0;
  bool large_tau = false;  // |tau| > Delta |t|
  double bound_small_tau = 0.0;      // 4 / sqrt(rho_sup kappa)
  double bound_small_tau_inf = 0.0;  // 4 / sqrt(rho_inf kappa)
  // 3 / (2 pi min |F'|) with F the full phase; infinite if F' vanishes on the window
  double first_derivative_bound = 0.0;
};

struct KernelOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
};

// Lambda(t, tau) = (1/2pi) int_a^b exp(i (t x(t, lambda) + tau lambda)) d lambda
KernelSample corput_kernel(double t, double tau, double kappa, const Window& w,
                           const KernelOptions& opt = {});

struct CorputScanOptions {
  Window window{};
  double t_min = 10.0;
  double t_max = 1e4;
  int t_points = 20;
  double tau_span = 5.0;  // tau in [-span t, span t]
  int tau_points = 41;
  double kappa_ratio = 1.0;  // kappa = ratio * t
  KernelOptions kernel{};
};

struct CorputScan {
  std::vector<KernelSample> samples;
  double K_prime = 0.0;           // sup over large-tau cells of |tau| * first_derivative_bound
  double K_prime_observed = 0.0;  // sup over large-tau cells of |tau| |Lambda|
  double K_observed = 0.0;        // sup over small-tau cells of sqrt(1 + t) |Lambda|
  double worst_small_ratio = 0.0;      // max |Lambda| / bound_small_tau
  double worst_small_ratio_inf = 0.0;  // max |Lambda| / bound_small_tau_inf
  double worst_large_ratio = 0.0;      // max |Lambda| |tau| / K_prime
  int small_cells = 0;
  int large_cells = 0;
  int small_violations = 0;
  int large_violations = 0;
};

CorputScan corput_scan(const CorputScanOptions& opt = {});

// Absolutely continuous probability measure dG = g d lambda supported in a window.
class SyntheticMeasure {
 public:
  enum class Kind { Smooth, Semicircle, PowerSingular };

  // Gaussian(center, sigma) times a flat-top cutoff on the window.
  static SyntheticMeasure smooth(double center = 1.0, double sigma = 0.06, Window w = {});
  // (1/2pi) sqrt(4 - lambda^2) restricted to the window.
  static SyntheticMeasure semicircle(Window w = {});
  // |lambda - center|^{-epsilon}; epsilon must make m (1 - epsilon) an integer for some m <= 64.
  static SyntheticMeasure power_singular(double center = 1.0, double epsilon = 0.2, Window w = {});

  Kind kind() const { return kind_; }
  const Window& window() const { return window_; }
  double epsilon() const { return kind_ == Kind::PowerSingular ? epsilon_ : 0.0; }
  double density(double lambda) const;

  // int h dG; rate bounds |d/d lambda arg h| and sets the starting panel count.
  quad::Result integrate(const quad::ComplexFn& h, double rate, double abs_tol = 1e-14,
                         double rel_tol = 1e-11) const;
  // int g e^{i omega lambda} dG; g_rate bounds |d/d lambda arg g|.
  quad::Result integrate_oscillatory(const quad::ComplexFn& g, double omega, double g_rate,
                                     double abs_tol = 1e-15, double rel_tol = 1e-11) const;
  // int e^{i tau lambda} dG
  std::complex<double> transform(double tau) const;

 private:
  SyntheticMeasure(Kind kind, Window w, double center, double scale, double epsilon);
  double raw_density(double lambda) const;

  Kind kind_;
  Window window_;
  double center_;
  double scale_;  // sigma for Smooth
  double epsilon_;
  int power_ = 1;  // substitution exponent for PowerSingular
  double norm_ = 1.0;
};

// int e^{i t x(t, lambda)} dG with kappa = kappa_ratio * t
std::complex<double> gamma_synthetic(const SyntheticMeasure& G, double t, double kappa);

struct LemmaRow {
  double t = 0.0;
  double kappa = 0.0;
  std::complex<double> gamma;
  double ratio = 0.0;      // |gamma| sqrt(t) / ln t
  double ratio_eps = 0.0;  // |gamma| t^{1/2 - epsilon}
  double piece_small = 0.0;  // K / sqrt(1 + t) int_{|tau| <= Delta t} C (1 + |tau|)^{eps - 1}
  double piece_large = 0.0;  // int_{|tau| > Delta t} K' C / (|tau| (1 + |tau|)^{1 - eps})
  bool within_split = false;  // |gamma| <= piece_small + piece_large
};

struct LemmaOptions {
  double kappa_ratio = 0.5;
  double tau_max = 400.0;  // range used to measure C
  int tau_samples = 4001;
};

struct LemmaTable {
  double epsilon = 0.0;
  double C = 0.0;   // sup |G^(tau)| (1 + |tau|)^{1 - eps} over the sampled taus
  double K = 0.0;   // 4 / sqrt(rho_sup kappa) <= K / sqrt(1 + t) for t >= 2
  double K_prime = 0.0;
  std::vector<LemmaRow> rows;
  double sup_ratio = 0.0;
  double sup_ratio_eps = 0.0;
  double trend_slope = 0.0;      // least-squares slope of ln ratio against ln t
  double trend_slope_eps = 0.0;  // same for ratio_eps
  bool all_within_split = true;
};

LemmaTable lemma_main_bound(const SyntheticMeasure& G, std::span<const double> t_grid,
                            const LemmaOptions& opt = {});

struct PlancherelCheck {
  double t = 0.0;
  std::complex<double> direct;
  std::complex<double> plancherel;  // int_{-T}^{T} Lambda(t, tau) conj(G^(tau)) d tau
  double T_max = 0.0;
  double tail_bound = 0.0;  // 2 K' C / T_max, from |Lambda| <= K'/|tau|, |G^| <= C / |tau|
  double rel_error = 0.0;
  double resolution_change = 0.0;  // |difference| between node sets of spacing h and h/2
};

struct PlancherelOptions {
  double kappa_ratio = 0.5;
  double transform_floor = 1e-9;   // T_max is where |G^| stays below floor * |G^(0)|
  double T_limit = 2000.0;
  double panel_width = 1.0;
};

// T_max is shared across the t values; conj(G^) is used because G is real.
std::vector<PlancherelCheck> plancherel_check(const SyntheticMeasure& G,
                                              std::span<const double> t_values,
                                              const PlancherelOptions& opt = {});

// Least-squares slope of ys against xs.
double ls_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace sparse_jacobi::decay
