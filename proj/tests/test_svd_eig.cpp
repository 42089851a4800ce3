#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qite/eig.hpp"
#include "qite/errors.hpp"
#include "qite/svd.hpp"
#include "support/test_helpers.hpp"

using namespace qite;

namespace {

double reconstruction_error(const std::vector<cplx>& a, const SvdResult& r) {
  double worst = 0.0;
  for (int i = 0; i < r.m; ++i)
    for (int j = 0; j < r.n; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < r.rank; ++k)
        acc += r.u[std::size_t(i) * r.rank + k] * r.s[k] *
               r.vh[std::size_t(k) * r.n + j];
      worst = std::max(worst, std::abs(acc - a[std::size_t(i) * r.n + j]));
    }
  return worst;
}

double orthogonality_error(const std::vector<cplx>& cols, int rows, int k) {
  double worst = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      cplx acc = 0.0;
      for (int i = 0; i < rows; ++i)
        acc += std::conj(cols[std::size_t(i) * k + a]) *
               cols[std::size_t(i) * k + b];
      cplx expect = a == b ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      worst = std::max(worst, std::abs(acc - expect));
    }
  return worst;
}

}  // namespace

TEST_CASE("svd reconstructs random matrices of every aspect ratio") {
  Rng rng(21);
  for (auto [m, n] : std::vector<std::pair<int, int>>{
           {1, 1}, {4, 4}, {8, 3}, {3, 8}, {16, 16}, {32, 17}, {6, 40}}) {
    auto a = test::random_cmat(rng, m, n);
    SvdResult r = svd(a.data(), m, n);
    double scale = 0.0;
    for (const cplx& x : a) scale = std::max(scale, std::abs(x));
    CHECK(reconstruction_error(a, r) < 1e-12 * std::max(scale, 1.0) * m);
    CHECK(orthogonality_error(r.u, m, r.rank) < 1e-12);
    // rows of vh are orthonormal too
    std::vector<cplx> vcols(std::size_t(n) * r.rank);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < r.rank; ++k)
        vcols[std::size_t(i) * r.rank + k] =
            std::conj(r.vh[std::size_t(k) * n + i]);
    CHECK(orthogonality_error(vcols, n, r.rank) < 1e-12);
    for (int k = 0; k + 1 < r.rank; ++k) CHECK(r.s[k] >= r.s[k + 1]);
  }
}

TEST_CASE("svd handles rank deficiency and drops exact zeros") {
  Rng rng(22);
  // build a 6x6 matrix of rank 2
  auto u = test::random_cmat(rng, 6, 2);
  auto v = test::random_cmat(rng, 2, 6);
  std::vector<cplx> a(36, cplx{0.0, 0.0});
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 6; ++j) a[i * 6 + j] += u[i * 2 + k] * v[k * 6 + j];
  SvdResult r = svd(a.data(), 6, 6);
  CHECK(reconstruction_error(a, r) < 1e-10);
  int significant = 0;
  for (double s : r.s)
    if (s > 1e-10 * r.s[0]) ++significant;
  CHECK(significant == 2);

  std::vector<cplx> zero(12, cplx{0.0, 0.0});
  SvdResult rz = svd(zero.data(), 3, 4);
  CHECK(rz.rank == 1);
  CHECK(rz.s[0] == 0.0);
}

TEST_CASE("svd is deterministic for identical input") {
  Rng rng(23);
  auto a = test::random_cmat(rng, 12, 12);
  SvdResult r1 = svd(a.data(), 12, 12);
  SvdResult r2 = svd(a.data(), 12, 12);
  CHECK(r1.s == r2.s);
  CHECK(r1.u == r2.u);
  CHECK(r1.vh == r2.vh);
}

TEST_CASE("svd rejects non-finite input") {
  std::vector<cplx> a(4, cplx{1.0, 0.0});
  a[2] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(svd(a.data(), 2, 2), numerical_error);
}

TEST_CASE("svd_truncate keeps chi_max values and reports discarded weight") {
  // diagonal matrix with known singular values 4, 2, 1
  std::vector<cplx> a(9, cplx{0.0, 0.0});
  a[0] = 4.0;
  a[4] = 2.0;
  a[8] = 1.0;
  TruncationPolicy pol;
  pol.chi_max = 2;
  pol.sv_cutoff = 0.0;
  TruncatedSvd t = svd_truncate(a.data(), 3, 3, pol);
  CHECK(t.rank == 2);
  CHECK(t.s[0] == doctest::Approx(4.0));
  CHECK(t.s[1] == doctest::Approx(2.0));
  CHECK(t.discarded_weight == doctest::Approx(1.0 / 21.0));

  // relative cutoff drops the smallest value
  pol.chi_max = 8;
  pol.sv_cutoff = 0.3;
  TruncatedSvd t2 = svd_truncate(a.data(), 3, 3, pol);
  CHECK(t2.rank == 2);

  pol.chi_max = 0;
  CHECK_THROWS_AS(svd_truncate(a.data(), 3, 3, pol), config_error);
}

TEST_CASE("truncation discarded weight is non-increasing in chi_max") {
  Rng rng(24);
  auto a = test::random_cmat(rng, 12, 12);
  double prev = 2.0;
  for (int chi = 1; chi <= 12; ++chi) {
    TruncationPolicy pol;
    pol.chi_max = chi;
    pol.sv_cutoff = 0.0;
    TruncatedSvd t = svd_truncate(a.data(), 12, 12, pol);
    CHECK(t.discarded_weight <= prev + 1e-15);
    prev = t.discarded_weight;
  }
  CHECK(prev < 1e-12);  // chi = full rank keeps everything
}

TEST_CASE("eigh solves the 3-site path Laplacian exactly") {
  // L = [[1,-1,0],[-1,2,-1],[0,-1,1]] has eigenvalues 0, 1, 3
  std::vector<double> lap = {1, -1, 0, -1, 2, -1, 0, -1, 1};
  EighResult r = eigh(lap.data(), 3);
  CHECK(r.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.values[2] == doctest::Approx(3.0).epsilon(1e-12));
  // Fiedler vector of the path is monotone: (±)(1, 0, -1)/√2
  const double* f = r.vectors.data() + 3;
  CHECK(std::abs(f[1]) < 1e-10);
  CHECK(f[0] * f[2] < 0.0);
}

TEST_CASE("eigh residuals are small on random symmetric matrices") {
  Rng rng(25);
  int n = 24;
  std::vector<double> a(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      a[i * n + j] = a[j * n + i] = rng.normal();
  EighResult r = eigh(a.data(), n);
  for (int k = 0; k < n; ++k) {
    const double* v = r.vectors.data() + std::size_t(k) * n;
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += a[i * n + j] * v[j];
      acc -= r.values[k] * v[i];
      resid += acc * acc;
    }
    CHECK(std::sqrt(resid) < 1e-10);
  }
  for (int k = 0; k + 1 < n; ++k) CHECK(r.values[k] <= r.values[k + 1]);
}
