#include "qite/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qite/errors.hpp"
#include "qite/kernels.hpp"

namespace qite {

void TruncationPolicy::validate() const {
  if (chi_max < 1) throw config_error("chi_max must be >= 1");
  if (!(sv_cutoff >= 0.0 && sv_cutoff < 1.0))
    throw config_error("sv_cutoff must be in [0, 1)");
}

namespace {

constexpr double kJacobiTol = 1e-15;
constexpr int kMaxSweeps = 60;

// One-sided Jacobi on the columns of g (column-major, m rows, n cols),
// accumulating the rotations into v (column-major n × n, starts as
// identity). Column pairs are visited in a fixed cyclic order, so the
// result is deterministic.
void jacobi_orthogonalize(int m, int n, std::vector<cplx>& g,
                          std::vector<cplx>& v) {
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx* gp = g.data() + std::size_t(p) * m;
        cplx* gq = g.data() + std::size_t(q) * m;
        kern::Gram2 gr = kern::zgram2(m, gp, gq);
        double mag = std::abs(gr.xy);
        if (gr.xx == 0.0 || gr.yy == 0.0) continue;
        if (mag <= kJacobiTol * std::sqrt(gr.xx * gr.yy)) continue;
        rotated = true;
        cplx phase = gr.xy / mag;  // e^{iθ}
        // annihilates the Gram off-diagonal: t² - 2τt - 1 = 0, small root
        double tau = (gr.yy - gr.xx) / (2.0 * mag);
        double t = (tau >= 0.0 ? -1.0 : 1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        cplx s = t * c * std::conj(phase);
        kern::zrot(m, gp, gq, c, s);
        cplx* vp = v.data() + std::size_t(p) * n;
        cplx* vq = v.data() + std::size_t(q) * n;
        kern::zrot(n, vp, vq, c, s);
      }
    }
    if (!rotated) return;
  }
  // Leftover couplings after kMaxSweeps are at worst O(tol·‖a‖); accept.
}

std::vector<cplx> conj_transpose(const cplx* a, int m, int n) {
  std::vector<cplx> out(std::size_t(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[std::size_t(j) * m + i] = std::conj(a[std::size_t(i) * n + j]);
  return out;
}

}  // namespace

SvdResult svd(const cplx* a, int m, int n) {
  if (m <= 0 || n <= 0) throw config_error("svd: empty matrix");
  for (std::size_t i = 0, total = std::size_t(m) * n; i < total; ++i)
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag()))
      throw numerical_error("svd: non-finite input entry");

  if (m < n) {
    // A = U Σ V†  ⇔  A† = V Σ U†
    std::vector<cplx> at = conj_transpose(a, m, n);
    SvdResult t = svd(at.data(), n, m);
    SvdResult out;
    out.m = m;
    out.n = n;
    out.rank = t.rank;
    out.s = t.s;
    out.u = conj_transpose(t.vh.data(), t.rank, m);
    out.vh = conj_transpose(t.u.data(), n, t.rank);
    return out;
  }

  // Column-major working copies so every column is contiguous.
  std::vector<cplx> g(std::size_t(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      g[std::size_t(j) * m + i] = a[std::size_t(i) * n + j];
  std::vector<cplx> v(std::size_t(n) * n, cplx{0.0, 0.0});
  for (int j = 0; j < n; ++j) v[std::size_t(j) * n + j] = 1.0;

  jacobi_orthogonalize(m, n, g, v);

  std::vector<double> norms(n);
  for (int j = 0; j < n; ++j)
    norms[j] = std::sqrt(kern::znrm2sq(m, g.data() + std::size_t(j) * m));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return norms[x] > norms[y]; });

  int rank = 0;
  for (int j = 0; j < n; ++j)
    if (norms[order[j]] > 0.0) rank = j + 1;
  if (rank == 0) rank = 1;

  SvdResult out;
  out.m = m;
  out.n = n;
  out.rank = rank;
  out.s.resize(rank);
  out.u.assign(std::size_t(m) * rank, cplx{0.0, 0.0});
  out.vh.assign(std::size_t(rank) * n, cplx{0.0, 0.0});
  for (int j = 0; j < rank; ++j) {
    int src = order[j];
    double sj = norms[src];
    out.s[j] = sj;
    const cplx* gc = g.data() + std::size_t(src) * m;
    const cplx* vc = v.data() + std::size_t(src) * n;
    if (sj > 0.0) {
      double inv = 1.0 / sj;
      for (int i = 0; i < m; ++i)
        out.u[std::size_t(i) * rank + j] = gc[i] * inv;
    } else {
      out.u[std::size_t(j) * rank + j] = 1.0;  // zero matrix: unit column
    }
    for (int i = 0; i < n; ++i)
      out.vh[std::size_t(j) * n + i] = std::conj(vc[i]);
  }
  return out;
}

TruncatedSvd svd_truncate(const cplx* a, int m, int n,
                          const TruncationPolicy& policy) {
  policy.validate();
  SvdResult full = svd(a, m, n);

  double total = 0.0;
  for (double sv : full.s) total += sv * sv;

  double floor = full.s.empty() ? 0.0 : full.s[0] * policy.sv_cutoff;
  int keep = 0;
  for (int j = 0; j < full.rank && j < policy.chi_max; ++j) {
    if (full.s[j] > 0.0 && full.s[j] >= floor) keep = j + 1;
  }
  if (keep == 0) keep = 1;

  double kept_sq = 0.0;
  for (int j = 0; j < keep; ++j) kept_sq += full.s[j] * full.s[j];

  TruncatedSvd out;
  out.rank = keep;
  out.s.assign(full.s.begin(), full.s.begin() + keep);
  out.discarded_weight = total > 0.0 ? (total - kept_sq) / total : 0.0;
  out.u.resize(std::size_t(m) * keep);
  for (int i = 0; i < m; ++i)
    std::copy_n(full.u.begin() + std::size_t(i) * full.rank, keep,
                out.u.begin() + std::size_t(i) * keep);
  out.vh.assign(full.vh.begin(), full.vh.begin() + std::size_t(keep) * n);
  return out;
}

}  // namespace qite
