// AVX2+FMA variants of the complex kernels. Interleaved (re,im) pairs,
// two complex doubles per 256-bit register. This translation unit is the
// only one compiled with -mavx2 -mfma; callers go through the dispatch
// table after the CPU check in avx2_available().

#include "qite/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define QITE_X86_64 1
#include <immintrin.h>
#else
#define QITE_X86_64 0
#endif

namespace qite::kern {

#if QITE_X86_64

namespace {

inline __m256d swap_halves(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (ar + i·ai)·v for both complex lanes of v
inline __m256d cmul(__m256d ar, __m256d ai, __m256d v) {
  return _mm256_fmaddsub_pd(ar, v, _mm256_mul_pd(ai, swap_halves(v)));
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    _mm256_storeu_pd(ys + 2 * i, _mm256_add_pd(yv, cmul(ar, ai, xv)));
  }
  if (i < n) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += a.real() * xr - a.imag() * xi;
    ys[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  const __m256d signs = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    // lanes (-xi, xr): summing gives Σ (xr·yi - xi·yr)
    acc_im = _mm256_fmadd_pd(_mm256_xor_pd(swap_halves(xv), signs), yv, acc_im);
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  if (i < n) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double nrm2sq_avx2(std::size_t n, const cplx* x) {
  const double* xs = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  double r = hsum(acc);
  if (i < n) {
    r += xs[2 * i] * xs[2 * i] + xs[2 * i + 1] * xs[2 * i + 1];
  }
  return r;
}

void scal_avx2(std::size_t n, cplx a, cplx* x) {
  double* xs = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    _mm256_storeu_pd(xs + 2 * i, cmul(ar, ai, xv));
  }
  if (i < n) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    xs[2 * i] = a.real() * xr - a.imag() * xi;
    xs[2 * i + 1] = a.real() * xi + a.imag() * xr;
  }
}

void rot_avx2(std::size_t n, cplx* x, cplx* y, double c, cplx s) {
  double* xs = reinterpret_cast<double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    __m256d sy = cmul(sr, si, yv);
    // conj(s)·x: even lanes sr·xr + si·xi, odd lanes sr·xi - si·xr
    __m256d csx =
        _mm256_fmsubadd_pd(sr, xv, _mm256_mul_pd(si, swap_halves(xv)));
    _mm256_storeu_pd(xs + 2 * i, _mm256_fmadd_pd(cv, xv, sy));
    _mm256_storeu_pd(ys + 2 * i, _mm256_fmsub_pd(cv, yv, csx));
  }
  if (i < n) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    xs[2 * i] = c * xr + s.real() * yr - s.imag() * yi;
    xs[2 * i + 1] = c * xi + s.real() * yi + s.imag() * yr;
    ys[2 * i] = c * yr - (s.real() * xr + s.imag() * xi);
    ys[2 * i + 1] = c * yi - (s.real() * xi - s.imag() * xr);
  }
}

Gram2 gram2_avx2(std::size_t n, const cplx* x, const cplx* y) {
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  const __m256d signs = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  __m256d acc_xx = _mm256_setzero_pd();
  __m256d acc_yy = _mm256_setzero_pd();
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xs + 2 * i);
    __m256d yv = _mm256_loadu_pd(ys + 2 * i);
    acc_xx = _mm256_fmadd_pd(xv, xv, acc_xx);
    acc_yy = _mm256_fmadd_pd(yv, yv, acc_yy);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(_mm256_xor_pd(swap_halves(xv), signs), yv, acc_im);
  }
  Gram2 g{hsum(acc_xx), hsum(acc_yy), {hsum(acc_re), hsum(acc_im)}};
  if (i < n) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    g.xx += xr * xr + xi * xi;
    g.yy += yr * yr + yi * yi;
    g.xy += cplx{xr * yr + xi * yi, xr * yi - xi * yr};
  }
  return g;
}

void gemm_acc_avx2(std::size_t m, std::size_t k, std::size_t n, const cplx* a,
                   const cplx* b, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* ci = c + i * n;
    const cplx* ai = a + i * k;
    for (std::size_t t = 0; t < k; ++t) {
      cplx av = ai[t];
      if (av.real() == 0.0 && av.imag() == 0.0) continue;
      axpy_avx2(n, av, b + t * n, ci);
    }
  }
}

void gemm_ct_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                      const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t t = 0; t < k; ++t) {
    const cplx* at = a + t * m;
    const cplx* bt = b + t * n;
    for (std::size_t i = 0; i < m; ++i) {
      cplx av = std::conj(at[i]);
      if (av.real() == 0.0 && av.imag() == 0.0) continue;
      axpy_avx2(n, av, bt, c + i * n);
    }
  }
}

const Ops avx2_table = {
    "avx2",        axpy_avx2, dotc_avx2,     nrm2sq_avx2,
    scal_avx2,     rot_avx2,  gram2_avx2,    gemm_acc_avx2,
    gemm_ct_acc_avx2,
};

}  // namespace

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& avx2_ops() { return avx2_table; }

#else  // !QITE_X86_64

bool avx2_available() { return false; }
const Ops& avx2_ops() { return scalar_ops(); }

#endif

}  // namespace qite::kern
