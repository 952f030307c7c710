#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sparse_jacobi/bigint.hpp"

namespace sparse_jacobi::model {

struct Exponential {
  double beta;
};
struct LogSquared {
  double c;
  double delta;
};
struct Factorial {
  double epsilon;
  double delta;
};
struct Explicit {
  std::vector<BigInt> increments;
};

using Family = std::variant<Exponential, LogSquared, Factorial, Explicit>;

struct SparsenessSpec {
  Family family;
  int j_max = 1;
  bool random_offsets = false;
  std::uint64_t seed = 0;
};

struct PhiWindow {
  double lo;
  double hi;
};

struct ModelParams {
  double p = 1.0;
  PhiWindow phi_window{0.1, 3.0};
};

std::string family_name(const Family& family);

// Unrounded beta_j as a decimal-free natural logarithm (j >= 1).
double log_increment(const Family& family, int j);

// beta_1..beta_{j_max}: families rounded to nearest integer, floored at 2.
std::vector<BigInt> build_increments(const SparsenessSpec& spec);

// beta_j divided by the unrounded family value, evaluated in multi-precision.
double increment_rounding_ratio(const SparsenessSpec& spec, int j);

// Barrier positions a_1..a_{j_max} (a_0 = 0 is implicit and is not a barrier).
std::vector<BigInt> build_positions(const SparsenessSpec& spec);

// Offsets omega_1..omega_{j_max}, zero unless random_offsets.
std::vector<long> build_offsets(const SparsenessSpec& spec);

double coupling_at(const BigInt& n, std::span<const BigInt> positions, double p);

double theta_p(double p);
double r_factor(double p, double lambda);
double hausdorff_dim(double p, double beta, double lambda);

// Immutable lattice model: barrier positions with coupling p, everything else 1.
class SparseModel {
 public:
  SparseModel(std::vector<BigInt> positions, double p);
  SparseModel(const SparsenessSpec& spec, double p);

  static SparseModel free_model() { return SparseModel(std::vector<BigInt>{}, 1.0); }

  std::span<const BigInt> positions() const { return positions_; }
  // Gaps a_j - a_{j-1}, j = 1..J, with a_0 = 0.
  std::span<const BigInt> gaps() const { return gaps_; }
  double p() const { return p_; }
  int barrier_count() const { return static_cast<int>(positions_.size()); }
  bool is_free() const { return positions_.empty() || p_ == 1.0; }

  double coupling(const BigInt& n) const { return coupling_at(n, positions_, p_); }
  // N_j = a_j + 1; N_0 = 1.
  BigInt truncation(int j) const;

 private:
  std::vector<BigInt> positions_;
  std::vector<BigInt> gaps_;
  double p_;
};

}  // namespace sparse_jacobi::model
