#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qite/kernels.hpp"
#include "qite/rng.hpp"
#include "support/test_helpers.hpp"

using namespace qite;
using kern::Ops;

namespace {

std::vector<const Ops*> backends() {
  std::vector<const Ops*> out{&kern::scalar_ops()};
  if (kern::avx2_available()) out.push_back(&kern::avx2_ops());
  return out;
}

}  // namespace

TEST_CASE("axpy matches naive complex arithmetic on every backend") {
  Rng rng(11);
  for (const Ops* ops : backends()) {
    for (std::size_t n : {std::size_t(1), std::size_t(2), std::size_t(7),
                          std::size_t(64), std::size_t(129)}) {
      auto x = test::random_cvec(rng, n);
      auto y = test::random_cvec(rng, n);
      cplx a{rng.normal(), rng.normal()};
      auto expect = y;
      for (std::size_t i = 0; i < n; ++i) expect[i] += a * x[i];
      ops->axpy(n, a, x.data(), y.data());
      CHECK(test::max_abs_diff(y, expect) < 1e-12);
    }
  }
}

TEST_CASE("dotc, nrm2sq and gram2 agree with naive sums") {
  Rng rng(12);
  for (const Ops* ops : backends()) {
    for (std::size_t n : {std::size_t(1), std::size_t(5), std::size_t(96),
                          std::size_t(255)}) {
      auto x = test::random_cvec(rng, n);
      auto y = test::random_cvec(rng, n);
      cplx dot_expect = 0.0;
      double xx = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot_expect += std::conj(x[i]) * y[i];
        xx += std::norm(x[i]);
        yy += std::norm(y[i]);
      }
      CHECK(std::abs(ops->dotc(n, x.data(), y.data()) - dot_expect) <
            1e-11 * (1.0 + std::abs(dot_expect)));
      CHECK(ops->nrm2sq(n, x.data()) == doctest::Approx(xx).epsilon(1e-12));
      kern::Gram2 g = ops->gram2(n, x.data(), y.data());
      CHECK(g.xx == doctest::Approx(xx).epsilon(1e-12));
      CHECK(g.yy == doctest::Approx(yy).epsilon(1e-12));
      CHECK(std::abs(g.xy - dot_expect) < 1e-11 * (1.0 + std::abs(dot_expect)));
    }
  }
}

TEST_CASE("scal and rot preserve expected algebra") {
  Rng rng(13);
  for (const Ops* ops : backends()) {
    std::size_t n = 33;
    auto x = test::random_cvec(rng, n);
    auto y = test::random_cvec(rng, n);
    cplx a{0.3, -1.2};
    auto expect = x;
    for (auto& e : expect) e *= a;
    auto xs2 = x;
    ops->scal(n, a, xs2.data());
    CHECK(test::max_abs_diff(xs2, expect) < 1e-12);

    // rot with c² + |s|² = 1 is unitary: norms preserved, and the naive
    // formula reproduced
    double c = 0.8;
    cplx s{0.36, 0.48};  // |s| = 0.6
    auto xr = x, yr = y;
    ops->rot(n, xr.data(), yr.data(), c, s);
    double before = 0.0, after = 0.0;
    std::vector<cplx> ex(n), ey(n);
    for (std::size_t i = 0; i < n; ++i) {
      ex[i] = c * x[i] + s * y[i];
      ey[i] = -std::conj(s) * x[i] + c * y[i];
      before += std::norm(x[i]) + std::norm(y[i]);
      after += std::norm(xr[i]) + std::norm(yr[i]);
    }
    CHECK(test::max_abs_diff(xr, ex) < 1e-12);
    CHECK(test::max_abs_diff(yr, ey) < 1e-12);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("gemm variants match reference triple loops") {
  Rng rng(14);
  for (const Ops* ops : backends()) {
    int m = 7, k = 5, n = 9;
    auto a = test::random_cmat(rng, m, k);
    auto b = test::random_cmat(rng, k, n);
    std::vector<cplx> c(std::size_t(m) * n, cplx{0.0, 0.0});
    ops->gemm_acc(m, k, n, a.data(), b.data(), c.data());
    std::vector<cplx> expect(std::size_t(m) * n, cplx{0.0, 0.0});
    for (int i = 0; i < m; ++i)
      for (int t = 0; t < k; ++t)
        for (int j = 0; j < n; ++j)
          expect[i * n + j] += a[i * k + t] * b[t * n + j];
    CHECK(test::max_abs_diff(c, expect) < 1e-11);

    // C += A^H B with A stored k×m
    auto ah = test::random_cmat(rng, k, m);
    std::vector<cplx> c2(std::size_t(m) * n, cplx{0.0, 0.0});
    ops->gemm_ct_acc(m, k, n, ah.data(), b.data(), c2.data());
    std::vector<cplx> expect2(std::size_t(m) * n, cplx{0.0, 0.0});
    for (int i = 0; i < m; ++i)
      for (int t = 0; t < k; ++t)
        for (int j = 0; j < n; ++j)
          expect2[i * n + j] += std::conj(ah[t * m + i]) * b[t * n + j];
    CHECK(test::max_abs_diff(c2, expect2) < 1e-11);
  }
}

TEST_CASE("scalar and avx2 backends agree on large mixed workloads") {
  if (!kern::avx2_available()) return;
  Rng rng(15);
  std::size_t n = 1023;
  auto x = test::random_cvec(rng, n);
  auto y = test::random_cvec(rng, n);
  cplx a{1.7, -0.4};

  auto ys = y, yv = y;
  kern::scalar_ops().axpy(n, a, x.data(), ys.data());
  kern::avx2_ops().axpy(n, a, x.data(), yv.data());
  CHECK(test::max_abs_diff(ys, yv) < 1e-12);

  cplx ds = kern::scalar_ops().dotc(n, x.data(), y.data());
  cplx dv = kern::avx2_ops().dotc(n, x.data(), y.data());
  CHECK(std::abs(ds - dv) < 1e-9);
}

TEST_CASE("active backend reports a known name") {
  auto name = kern::active_backend_name();
  CHECK((name == "scalar" || name == "avx2"));
}
