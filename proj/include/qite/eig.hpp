#pragma once

#include <vector>

namespace qite {

// Full eigendecomposition of a real symmetric matrix (cyclic Jacobi).
// Eigenvalues ascending; eigenvector k occupies vectors[k*n .. k*n+n).
struct EighResult {
  int n = 0;
  std::vector<double> values;
  std::vector<double> vectors;
};

EighResult eigh(const double* a, int n);

}  // namespace qite
