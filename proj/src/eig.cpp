#include "qite/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qite/errors.hpp"

namespace qite {

// Plain cyclic Jacobi; the Laplacians this sees are at most a few
// hundred rows, so there is no need for anything fancier.
EighResult eigh(const double* a, int n) {
  if (n <= 0) throw config_error("eigh: empty matrix");
  if (n > 2048) throw config_error("eigh: matrix too large (n > 2048)");

  std::vector<double> m(a, a + std::size_t(n) * n);
  std::vector<double> v(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[std::size_t(i) * n + i] = 1.0;

  auto at = [&](int i, int j) -> double& { return m[std::size_t(i) * n + j]; };

  double total = 0.0;
  for (double x : m) total += x * x;

  const int max_sweeps = 80;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off <= 1e-28 * total) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (apq == 0.0) continue;
        double app = at(p, p), aqq = at(q, q);
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq) + 1e-300)) {
          at(p, q) = at(q, p) = 0.0;
          continue;
        }
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        // M <- Jᵀ (M J), applied as two full passes with temporaries
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vpk = v[std::size_t(p) * n + k];
          double vqk = v[std::size_t(q) * n + k];
          v[std::size_t(p) * n + k] = c * vpk - s * vqk;
          v[std::size_t(q) * n + k] = s * vpk + c * vqk;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return at(x, x) < at(y, y); });

  EighResult out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(std::size_t(n) * n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = at(order[k], order[k]);
    std::copy_n(v.begin() + std::size_t(order[k]) * n, n,
                out.vectors.begin() + std::size_t(k) * n);
  }
  return out;
}

}  // namespace qite
