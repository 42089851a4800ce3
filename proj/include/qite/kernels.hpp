#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace qite::kern {

using cplx = std::complex<double>;

struct Gram2 {
  double xx;  // ‖x‖²
  double yy;  // ‖y‖²
  cplx xy;    // Σ conj(x)·y
};

// Complex vector/matrix kernels over interleaved (re,im) double arrays.
// One scalar reference implementation and one AVX2+FMA implementation;
// the active table is picked at runtime from CPU features, overridable
// with QITE_SIMD={auto,scalar,avx2}. Both backends are deterministic for
// a fixed input, but round differently; tests compare them to tolerance.
struct Ops {
  const char* name;
  // y += a·x
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // Σ conj(x)·y
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
  // Σ |x|²
  double (*nrm2sq)(std::size_t n, const cplx* x);
  // x *= a
  void (*scal)(std::size_t n, cplx a, cplx* x);
  // plane rotation, c real: (x, y) <- (c·x + s·y, -conj(s)·x + c·y)
  void (*rot)(std::size_t n, cplx* x, cplx* y, double c, cplx s);
  // single-pass column Gram data for the Jacobi SVD
  Gram2 (*gram2)(std::size_t n, const cplx* x, const cplx* y);
  // C(m×n) += A(m×k)·B(k×n), all row-major
  void (*gemm_acc)(std::size_t m, std::size_t k, std::size_t n, const cplx* a,
                   const cplx* b, cplx* c);
  // C(m×n) += A^H·B with A stored (k×m) row-major, B (k×n) row-major
  void (*gemm_ct_acc)(std::size_t m, std::size_t k, std::size_t n,
                      const cplx* a, const cplx* b, cplx* c);
};

const Ops& scalar_ops();
bool avx2_available();
const Ops& avx2_ops();  // only valid to use when avx2_available()

// Backend chosen on first call; QITE_SIMD=avx2 on an unsupported CPU throws.
const Ops& active_ops();
std::string_view active_backend_name();

inline void zaxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  active_ops().axpy(n, a, x, y);
}
inline cplx zdotc(std::size_t n, const cplx* x, const cplx* y) {
  return active_ops().dotc(n, x, y);
}
inline double znrm2sq(std::size_t n, const cplx* x) {
  return active_ops().nrm2sq(n, x);
}
inline void zscal(std::size_t n, cplx a, cplx* x) { active_ops().scal(n, a, x); }
inline void zrot(std::size_t n, cplx* x, cplx* y, double c, cplx s) {
  active_ops().rot(n, x, y, c, s);
}
inline Gram2 zgram2(std::size_t n, const cplx* x, const cplx* y) {
  return active_ops().gram2(n, x, y);
}
inline void zgemm_acc(std::size_t m, std::size_t k, std::size_t n,
                      const cplx* a, const cplx* b, cplx* c) {
  active_ops().gemm_acc(m, k, n, a, b, c);
}
inline void zgemm_ct_acc(std::size_t m, std::size_t k, std::size_t n,
                         const cplx* a, const cplx* b, cplx* c) {
  active_ops().gemm_ct_acc(m, k, n, a, b, c);
}

}  // namespace qite::kern
