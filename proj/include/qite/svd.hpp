#pragma once

#include <complex>
#include <vector>

namespace qite {

using cplx = std::complex<double>;

// Policy for discarding singular values after a two-site gate: keep at
// most chi_max values, drop values below sv_cutoff relative to the
// largest. Exact zeros are always dropped; at least one value is kept.
struct TruncationPolicy {
  int chi_max = 64;
  double sv_cutoff = 1e-12;
  void validate() const;
};

// Thin SVD a = u · diag(s) · vh with s sorted descending. rank is the
// number of returned values: min(m, n) minus exact-zero columns (at
// least 1). Deterministic for a fixed input; ties keep backend order.
struct SvdResult {
  int m = 0, n = 0, rank = 0;
  std::vector<cplx> u;    // m × rank, row-major
  std::vector<double> s;  // length rank, descending
  std::vector<cplx> vh;   // rank × n, row-major
};

SvdResult svd(const cplx* a, int m, int n);

struct TruncatedSvd {
  int rank = 0;
  std::vector<cplx> u;    // m × rank
  std::vector<double> s;  // kept values, descending
  std::vector<cplx> vh;   // rank × n
  double discarded_weight = 0.0;  // Σ dropped s² / Σ all s²
};

TruncatedSvd svd_truncate(const cplx* a, int m, int n,
                          const TruncationPolicy& policy);

}  // namespace qite
