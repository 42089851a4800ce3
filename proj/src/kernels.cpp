#include "qite/kernels.hpp"

#include <cstdlib>
#include <string>

#include "qite/errors.hpp"

namespace qite::kern {

namespace {

// All scalar kernels spell out the re/im arithmetic instead of using
// std::complex operators; this keeps them free of the __muldc3 NaN
// fixups and semantically identical to the vector paths.

void axpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    ys[2 * i] += ar * xr - ai * xi;
    ys[2 * i + 1] += ar * xi + ai * xr;
  }
}

cplx dotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0, im = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double nrm2sq_scalar(std::size_t n, const cplx* x) {
  double acc = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < 2 * n; ++i) acc += xs[i] * xs[i];
  return acc;
}

void scal_scalar(std::size_t n, cplx a, cplx* x) {
  const double ar = a.real(), ai = a.imag();
  double* xs = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    xs[2 * i] = ar * xr - ai * xi;
    xs[2 * i + 1] = ar * xi + ai * xr;
  }
}

void rot_scalar(std::size_t n, cplx* x, cplx* y, double c, cplx s) {
  const double sr = s.real(), si = s.imag();
  double* xs = reinterpret_cast<double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    xs[2 * i] = c * xr + sr * yr - si * yi;
    xs[2 * i + 1] = c * xi + sr * yi + si * yr;
    // y' = -conj(s)·x + c·y, conj(s)·x = (sr·xr + si·xi) + i(sr·xi - si·xr)
    ys[2 * i] = c * yr - (sr * xr + si * xi);
    ys[2 * i + 1] = c * yi - (sr * xi - si * xr);
  }
}

Gram2 gram2_scalar(std::size_t n, const cplx* x, const cplx* y) {
  double xx = 0.0, yy = 0.0, re = 0.0, im = 0.0;
  const double* xs = reinterpret_cast<const double*>(x);
  const double* ys = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xs[2 * i], xi = xs[2 * i + 1];
    double yr = ys[2 * i], yi = ys[2 * i + 1];
    xx += xr * xr + xi * xi;
    yy += yr * yr + yi * yi;
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {xx, yy, {re, im}};
}

void gemm_acc_scalar(std::size_t m, std::size_t k, std::size_t n,
                     const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* ci = c + i * n;
    const cplx* ai = a + i * k;
    for (std::size_t t = 0; t < k; ++t) {
      cplx av = ai[t];
      if (av.real() == 0.0 && av.imag() == 0.0) continue;
      axpy_scalar(n, av, b + t * n, ci);
    }
  }
}

void gemm_ct_acc_scalar(std::size_t m, std::size_t k, std::size_t n,
                        const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t t = 0; t < k; ++t) {
    const cplx* at = a + t * m;
    const cplx* bt = b + t * n;
    for (std::size_t i = 0; i < m; ++i) {
      cplx av = std::conj(at[i]);
      if (av.real() == 0.0 && av.imag() == 0.0) continue;
      axpy_scalar(n, av, bt, c + i * n);
    }
  }
}

const Ops scalar_table = {
    "scalar",        axpy_scalar, dotc_scalar,     nrm2sq_scalar,
    scal_scalar,     rot_scalar,  gram2_scalar,    gemm_acc_scalar,
    gemm_ct_acc_scalar,
};

const Ops& choose_ops() {
  const char* env = std::getenv("QITE_SIMD");
  std::string mode = env ? env : "auto";
  if (mode == "scalar") return scalar_ops();
  if (mode == "avx2") {
    if (!avx2_available())
      throw config_error("QITE_SIMD=avx2 requested but CPU lacks AVX2+FMA");
    return avx2_ops();
  }
  if (mode != "auto" && mode != "")
    throw config_error("QITE_SIMD must be auto, scalar or avx2 (got '" + mode +
                       "')");
  return avx2_available() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& scalar_ops() { return scalar_table; }

const Ops& active_ops() {
  static const Ops& chosen = choose_ops();
  return chosen;
}

std::string_view active_backend_name() { return active_ops().name; }

}  // namespace qite::kern
