#pragma once

#include <span>
#include <vector>

namespace sparse_jacobi::tridiag {

// Eigenvalues in increasing order with the first components of the normalised eigenvectors.
struct Eigensystem {
  std::vector<double> values;
  std::vector<double> first;
};

// Implicit QL with Wilkinson shifts; only row 0 of the eigenvector matrix is carried, so the
// cost is O(n^2). off[k] couples k and k + 1.
Eigensystem symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off);

}  // namespace sparse_jacobi::tridiag
