#include "qite/mps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qite/errors.hpp"
#include "qite/kernels.hpp"

namespace qite {

namespace {

constexpr double kNormTol = 1e-8;

bool all_finite(const std::vector<cplx>& v) {
  for (const cplx& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

void check_unitary4(const std::array<cplx, 16>& g) {
  // G†G == 1 within 1e-12
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += std::conj(g[k * 4 + i]) * g[k * 4 + j];
      cplx expect = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      if (std::abs(acc - expect) > 1e-12)
        throw config_error("two-site gate marked unitary is not unitary");
    }
  }
}

// E' = Σ_p w_p · A_p† E A_p for one site tensor; w_p = ±1 selects a Z
// insertion. E is dl×dl, the result is dr×dr.
std::vector<cplx> propagate_env(const std::vector<cplx>& env,
                                const SiteTensor& t, bool insert_z) {
  const int dl = t.dl, dr = t.dr;
  std::vector<cplx> out(std::size_t(dr) * dr, cplx{0.0, 0.0});
  std::vector<cplx> slice(std::size_t(dl) * dr);
  std::vector<cplx> tmp(std::size_t(dl) * dr);
  for (int p = 0; p < 2; ++p) {
    for (int l = 0; l < dl; ++l)
      for (int r = 0; r < dr; ++r)
        slice[std::size_t(l) * dr + r] = t.at(l, p, r);
    std::fill(tmp.begin(), tmp.end(), cplx{0.0, 0.0});
    kern::zgemm_acc(dl, dl, dr, env.data(), slice.data(), tmp.data());
    if (insert_z && p == 1)
      kern::zscal(tmp.size(), cplx{-1.0, 0.0}, tmp.data());
    kern::zgemm_ct_acc(dr, dl, dr, slice.data(), tmp.data(), out.data());
  }
  return out;
}

cplx trace_of(const std::vector<cplx>& m, int n) {
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) acc += m[std::size_t(i) * n + i];
  return acc;
}

}  // namespace

namespace gates {

TwoSiteGate identity2() {
  TwoSiteGate g;
  for (int i = 0; i < 4; ++i) g.m[i * 4 + i] = 1.0;
  g.unitary_hint = true;
  return g;
}

TwoSiteGate swap_gate() {
  TwoSiteGate g;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) g.m[(2 * q + p) * 4 + (2 * p + q)] = 1.0;
  g.unitary_hint = true;
  return g;
}

TwoSiteGate zz_ite(double dtau, double coupling, double shift) {
  static constexpr double zz[4] = {1.0, -1.0, -1.0, 1.0};
  TwoSiteGate g;
  for (int i = 0; i < 4; ++i)
    g.m[i * 4 + i] = std::exp(-dtau * coupling * (zz[i] - shift));
  return g;
}

TwoSiteGate zz_ite_then_swap(double dtau, double coupling, double shift) {
  static constexpr double zz[4] = {1.0, -1.0, -1.0, 1.0};
  TwoSiteGate g;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      int col = 2 * p + q;
      g.m[(2 * q + p) * 4 + col] =
          std::exp(-dtau * coupling * (zz[col] - shift));
    }
  return g;
}

SingleSiteGate identity1() { return {cplx{1.0}, {}, {}, cplx{1.0}}; }

SingleSiteGate hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {cplx{s}, cplx{s}, cplx{s}, cplx{-s}};
}

SingleSiteGate z_ite(double dtau, double field, double shift) {
  return {cplx{std::exp(-dtau * field * (1.0 - shift))}, {}, {},
          cplx{std::exp(-dtau * field * (-1.0 - shift))}};
}

}  // namespace gates

int MpsState::check_site(int k) const {
  if (k < 0 || k >= size())
    throw config_error("site index " + std::to_string(k) + " out of range");
  return k;
}

void MpsState::require_center() const {
  if (center_ < 0) throw config_error("canonical form not established");
}

void MpsState::require_normalized() const {
  double nrm = norm();
  if (std::abs(nrm - 1.0) > kNormTol)
    throw config_error("state is not normalized (norm = " +
                       std::to_string(nrm) + ")");
}

MpsState MpsState::plus_state(int n) {
  if (n < 1) throw config_error("plus_state: qubit count must be >= 1");
  MpsState st;
  st.sites_.resize(n);
  const double amp = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    SiteTensor t(1, 1);
    t.at(0, 0, 0) = amp;
    t.at(0, 1, 0) = amp;
    st.sites_[k] = std::move(t);
  }
  st.center_ = 0;
  st.site_to_logical_.resize(n);
  std::iota(st.site_to_logical_.begin(), st.site_to_logical_.end(), 0);
  return st;
}

MpsState MpsState::computational_basis(std::span<const std::uint8_t> bits) {
  if (bits.empty()) throw config_error("computational_basis: empty bitstring");
  MpsState st;
  st.sites_.resize(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    SiteTensor t(1, 1);
    t.at(0, bits[k] ? 1 : 0, 0) = 1.0;
    st.sites_[k] = std::move(t);
  }
  st.center_ = 0;
  st.site_to_logical_.resize(bits.size());
  std::iota(st.site_to_logical_.begin(), st.site_to_logical_.end(), 0);
  return st;
}

MpsState MpsState::from_amplitudes(std::span<const cplx> amps,
                                   const TruncationPolicy& policy) {
  std::size_t len = amps.size();
  if (len < 2 || (len & (len - 1)) != 0)
    throw config_error("from_amplitudes: length must be a power of two >= 2");
  int n = 0;
  while ((std::size_t(1) << n) < len) ++n;

  MpsState st;
  st.sites_.resize(n);
  // Sweep of SVDs peeling one site at a time; qubit 0 is the most
  // significant bit of the amplitude index.
  std::vector<cplx> rest(amps.begin(), amps.end());
  int rows_left = 1;  // current left bond
  for (int k = 0; k < n - 1; ++k) {
    int m = rows_left * 2;
    int cols = static_cast<int>(rest.size()) / m;
    TruncatedSvd ts = svd_truncate(rest.data(), m, cols, policy);
    SiteTensor t(rows_left, ts.rank);
    std::copy(ts.u.begin(), ts.u.end(), t.a.begin());
    st.sites_[k] = std::move(t);
    rest.assign(std::size_t(ts.rank) * cols, cplx{0.0, 0.0});
    for (int j = 0; j < ts.rank; ++j)
      for (int i = 0; i < cols; ++i)
        rest[std::size_t(j) * cols + i] = ts.s[j] * ts.vh[std::size_t(j) * cols + i];
    rows_left = ts.rank;
  }
  SiteTensor last(rows_left, 1);
  std::copy(rest.begin(), rest.end(), last.a.begin());
  st.sites_[n - 1] = std::move(last);
  st.center_ = n - 1;
  st.site_to_logical_.resize(n);
  std::iota(st.site_to_logical_.begin(), st.site_to_logical_.end(), 0);
  st.move_center(0);
  return st;
}

MpsState MpsState::from_tensors(std::vector<SiteTensor> tensors) {
  if (tensors.empty()) throw config_error("from_tensors: no tensors");
  int n = static_cast<int>(tensors.size());
  if (tensors.front().dl != 1 || tensors.back().dr != 1)
    throw config_error("from_tensors: boundary bonds must have dimension 1");
  for (int k = 0; k < n; ++k) {
    const SiteTensor& t = tensors[k];
    if (t.dl < 1 || t.dr < 1 ||
        t.a.size() != std::size_t(t.dl) * 2 * t.dr)
      throw config_error("from_tensors: inconsistent tensor shape at site " +
                         std::to_string(k));
    if (k + 1 < n && t.dr != tensors[k + 1].dl)
      throw config_error("from_tensors: bond mismatch at bond " +
                         std::to_string(k));
    if (!all_finite(t.a))
      throw numerical_error("from_tensors: non-finite entry at site " +
                            std::to_string(k));
  }
  MpsState st;
  st.sites_ = std::move(tensors);
  st.site_to_logical_.resize(n);
  std::iota(st.site_to_logical_.begin(), st.site_to_logical_.end(), 0);
  for (int k = n - 1; k >= 1; --k) st.right_orthogonalize_step(k);
  st.center_ = 0;
  return st;
}

int MpsState::bond_dim(int bond) const {
  if (bond < 0 || bond >= size() - 1)
    throw config_error("bond index out of range");
  return sites_[bond].dr;
}

int MpsState::max_bond_dim() const {
  int m = 1;
  for (const SiteTensor& t : sites_) m = std::max(m, t.dr);
  return m;
}

std::vector<int> MpsState::logical_to_site() const {
  std::vector<int> inv(site_to_logical_.size());
  for (std::size_t s = 0; s < site_to_logical_.size(); ++s)
    inv[site_to_logical_[s]] = static_cast<int>(s);
  return inv;
}

void MpsState::set_site_to_logical(std::vector<int> perm) {
  if (perm.size() != sites_.size())
    throw config_error("site_to_logical size mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int q : perm) {
    if (q < 0 || q >= size() || seen[q])
      throw config_error("site_to_logical is not a bijection");
    seen[q] = true;
  }
  site_to_logical_ = std::move(perm);
}

void MpsState::swap_site_labels(int left_site) {
  check_site(left_site);
  check_site(left_site + 1);
  std::swap(site_to_logical_[left_site], site_to_logical_[left_site + 1]);
}

void MpsState::right_orthogonalize_step(int k) {
  SiteTensor& t = sites_[k];
  // view (dl × 2·dr); Vh keeps the site, U·diag(s) moves left
  SvdResult r = svd(t.a.data(), t.dl, 2 * t.dr);
  SiteTensor vt(r.rank, t.dr);
  std::copy(r.vh.begin(), r.vh.end(), vt.a.begin());

  std::vector<cplx> carry(std::size_t(t.dl) * r.rank);
  for (int i = 0; i < t.dl; ++i)
    for (int j = 0; j < r.rank; ++j)
      carry[std::size_t(i) * r.rank + j] =
          r.u[std::size_t(i) * r.rank + j] * r.s[j];

  SiteTensor& prev = sites_[k - 1];
  SiteTensor merged(prev.dl, r.rank);
  kern::zgemm_acc(std::size_t(prev.dl) * 2, prev.dr, r.rank, prev.a.data(),
                  carry.data(), merged.a.data());
  prev = std::move(merged);
  t = std::move(vt);
}

void MpsState::move_center_right() {
  int k = center_;
  SiteTensor& t = sites_[k];
  SvdResult r = svd(t.a.data(), t.dl * 2, t.dr);
  SiteTensor ut(t.dl, r.rank);
  std::copy(r.u.begin(), r.u.end(), ut.a.begin());

  std::vector<cplx> carry(std::size_t(r.rank) * t.dr);
  for (int j = 0; j < r.rank; ++j)
    for (int i = 0; i < t.dr; ++i)
      carry[std::size_t(j) * t.dr + i] = r.s[j] * r.vh[std::size_t(j) * t.dr + i];

  SiteTensor& next = sites_[k + 1];
  SiteTensor merged(r.rank, next.dr);
  kern::zgemm_acc(r.rank, next.dl, std::size_t(next.dr) * 2, carry.data(),
                  next.a.data(), merged.a.data());
  sites_[k] = std::move(ut);
  sites_[k + 1] = std::move(merged);
  ++center_;
}

void MpsState::move_center_left() {
  right_orthogonalize_step(center_);
  --center_;
}

void MpsState::move_center(int k) {
  require_center();
  check_site(k);
  while (center_ < k) move_center_right();
  while (center_ > k) move_center_left();
}

GateResult MpsState::apply_two_site_gate(int left_site, const TwoSiteGate& gate,
                                         const TruncationPolicy& policy) {
  policy.validate();
  check_site(left_site);
  if (left_site + 1 >= size())
    throw config_error("two-site gate needs a right neighbour");
  require_center();
  if (center_ != left_site && center_ != left_site + 1)
    throw config_error("orthogonality center must sit on one of the gate sites");
  for (const cplx& x : gate.m)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw numerical_error("two-site gate has non-finite entries");
  if (gate.unitary_hint) check_unitary4(gate.m);

  const SiteTensor& lt = sites_[left_site];
  const SiteTensor& rt = sites_[left_site + 1];
  const int a = lt.dl, b = lt.dr, c = rt.dr;
  const std::size_t ac = std::size_t(a) * c;

  // two-site block (a·2 × 2·c)
  std::vector<cplx> block(std::size_t(a) * 2 * 2 * c, cplx{0.0, 0.0});
  kern::zgemm_acc(std::size_t(a) * 2, b, std::size_t(c) * 2, lt.a.data(),
                  rt.a.data(), block.data());

  // regroup to (pq × ac), contract the gate, regroup back
  std::vector<cplx> t2(4 * ac);
  for (int ai = 0; ai < a; ++ai)
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int ci = 0; ci < c; ++ci)
          t2[std::size_t(2 * p + q) * ac + std::size_t(ai) * c + ci] =
              block[(std::size_t(ai) * 2 + p) * 2 * c + std::size_t(q) * c + ci];
  std::vector<cplx> t3(4 * ac, cplx{0.0, 0.0});
  kern::zgemm_acc(4, 4, ac, gate.m.data(), t2.data(), t3.data());
  std::vector<cplx> theta(std::size_t(2 * a) * 2 * c);
  for (int ai = 0; ai < a; ++ai)
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int ci = 0; ci < c; ++ci)
          theta[(std::size_t(ai) * 2 + p) * 2 * c + std::size_t(q) * c + ci] =
              t3[std::size_t(2 * p + q) * ac + std::size_t(ai) * c + ci];

  TruncatedSvd ts = svd_truncate(theta.data(), 2 * a, 2 * c, policy);

  double kept_sq = 0.0;
  for (double sv : ts.s) kept_sq += sv * sv;
  double scale = std::sqrt(kept_sq);
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw numerical_error("two-site gate produced a degenerate state");

  SiteTensor nl(a, ts.rank);
  for (int i = 0; i < 2 * a; ++i)
    for (int j = 0; j < ts.rank; ++j)
      nl.a[std::size_t(i) * ts.rank + j] =
          ts.u[std::size_t(i) * ts.rank + j] * (ts.s[j] / scale);
  SiteTensor nr(ts.rank, c);
  std::copy(ts.vh.begin(), ts.vh.end(), nr.a.begin());

  if (!all_finite(nl.a))
    throw numerical_error("two-site gate produced non-finite tensor entries");

  sites_[left_site] = std::move(nl);
  sites_[left_site + 1] = std::move(nr);
  norm_log_ += std::log(scale);
  center_ = left_site;

  return {ts.discarded_weight, std::move(ts.s)};
}

void MpsState::apply_single_site_gate(int site, const SingleSiteGate& gate) {
  check_site(site);
  require_center();
  for (const cplx& x : gate)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw numerical_error("single-site gate has non-finite entries");
  move_center(site);

  SiteTensor& t = sites_[site];
  SiteTensor out(t.dl, t.dr);
  for (int l = 0; l < t.dl; ++l) {
    const cplx* row0 = &t.at(l, 0, 0);
    const cplx* row1 = &t.at(l, 1, 0);
    for (int p = 0; p < 2; ++p) {
      cplx* dst = &out.at(l, p, 0);
      kern::zaxpy(t.dr, gate[p * 2 + 0], row0, dst);
      kern::zaxpy(t.dr, gate[p * 2 + 1], row1, dst);
    }
  }
  t = std::move(out);
  fold_scale(t.a);
}

double MpsState::fold_scale(std::vector<cplx>& data) {
  double s = std::sqrt(kern::znrm2sq(data.size(), data.data()));
  if (!(s > 0.0) || !std::isfinite(s))
    throw numerical_error("state norm degenerated to zero or non-finite");
  kern::zscal(data.size(), cplx{1.0 / s, 0.0}, data.data());
  norm_log_ += std::log(s);
  return s;
}

double MpsState::norm() const {
  require_center();
  const SiteTensor& c = sites_[center_];
  return std::exp(norm_log_) * std::sqrt(kern::znrm2sq(c.a.size(), c.a.data()));
}

double MpsState::log_norm() const {
  require_center();
  const SiteTensor& c = sites_[center_];
  return norm_log_ + 0.5 * std::log(kern::znrm2sq(c.a.size(), c.a.data()));
}

double MpsState::renormalize() {
  require_center();
  SiteTensor& c = sites_[center_];
  double f = std::sqrt(kern::znrm2sq(c.a.size(), c.a.data()));
  if (!(f > 0.0) || !std::isfinite(f))
    throw numerical_error("cannot renormalize a degenerate state");
  double nrm = std::exp(norm_log_) * f;
  kern::zscal(c.a.size(), cplx{1.0 / f, 0.0}, c.a.data());
  norm_log_ = 0.0;
  return nrm;
}

double MpsState::expectation_z(int site) const {
  check_site(site);
  require_normalized();
  int lo = std::min(site, center_), hi = std::max(site, center_);
  std::vector<cplx> env(std::size_t(sites_[lo].dl) * sites_[lo].dl,
                        cplx{0.0, 0.0});
  for (int i = 0; i < sites_[lo].dl; ++i)
    env[std::size_t(i) * sites_[lo].dl + i] = 1.0;
  for (int k = lo; k <= hi; ++k) env = propagate_env(env, sites_[k], k == site);
  double denom = kern::znrm2sq(sites_[center_].a.size(),
                               sites_[center_].a.data());
  return trace_of(env, sites_[hi].dr).real() / denom;
}

double MpsState::correlator_zz(int site_i, int site_j) const {
  check_site(site_i);
  check_site(site_j);
  if (site_i == site_j)
    throw config_error("correlator_zz needs two distinct sites");
  require_normalized();
  int lo = std::min({site_i, site_j, center_});
  int hi = std::max({site_i, site_j, center_});
  std::vector<cplx> env(std::size_t(sites_[lo].dl) * sites_[lo].dl,
                        cplx{0.0, 0.0});
  for (int i = 0; i < sites_[lo].dl; ++i)
    env[std::size_t(i) * sites_[lo].dl + i] = 1.0;
  for (int k = lo; k <= hi; ++k)
    env = propagate_env(env, sites_[k], k == site_i || k == site_j);
  double denom = kern::znrm2sq(sites_[center_].a.size(),
                               sites_[center_].a.data());
  return trace_of(env, sites_[hi].dr).real() / denom;
}

std::vector<double> MpsState::bond_entropies() const {
  require_normalized();
  MpsState work = *this;
  work.move_center(0);
  std::vector<double> out;
  out.reserve(size() - 1);
  for (int k = 0; k + 1 < size(); ++k) {
    // the SVD of the center move exposes the Schmidt values at bond k
    SiteTensor& t = work.sites_[k];
    SvdResult r = svd(t.a.data(), t.dl * 2, t.dr);
    double total = 0.0;
    for (double sv : r.s) total += sv * sv;
    double entropy = 0.0;
    if (total > 0.0) {
      for (double sv : r.s) {
        double p = sv * sv / total;
        if (p > 0.0) entropy -= p * std::log2(p);
      }
    }
    out.push_back(entropy);

    SiteTensor ut(t.dl, r.rank);
    std::copy(r.u.begin(), r.u.end(), ut.a.begin());
    std::vector<cplx> carry(std::size_t(r.rank) * t.dr);
    for (int j = 0; j < r.rank; ++j)
      for (int i = 0; i < t.dr; ++i)
        carry[std::size_t(j) * t.dr + i] =
            r.s[j] * r.vh[std::size_t(j) * t.dr + i];
    SiteTensor& next = work.sites_[k + 1];
    SiteTensor merged(r.rank, next.dr);
    kern::zgemm_acc(r.rank, next.dl, std::size_t(next.dr) * 2, carry.data(),
                    next.a.data(), merged.a.data());
    work.sites_[k] = std::move(ut);
    work.sites_[k + 1] = std::move(merged);
    ++work.center_;
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> MpsState::sample(Rng& rng,
                                                        int count) const {
  if (count < 1) throw config_error("sample count must be >= 1");
  require_normalized();
  MpsState work = *this;
  work.move_center(0);

  const int n = size();
  std::vector<std::vector<std::uint8_t>> out(
      count, std::vector<std::uint8_t>(n, 0));
  std::vector<cplx> v, m0, m1;
  for (int smp = 0; smp < count; ++smp) {
    v.assign(1, cplx{1.0, 0.0});
    std::vector<std::uint8_t> site_bits(n);
    for (int k = 0; k < n; ++k) {
      const SiteTensor& t = work.sites_[k];
      m0.assign(t.dr, cplx{0.0, 0.0});
      m1.assign(t.dr, cplx{0.0, 0.0});
      for (int l = 0; l < t.dl; ++l) {
        kern::zaxpy(t.dr, v[l], &t.at(l, 0, 0), m0.data());
        kern::zaxpy(t.dr, v[l], &t.at(l, 1, 0), m1.data());
      }
      double w0 = kern::znrm2sq(t.dr, m0.data());
      double w1 = kern::znrm2sq(t.dr, m1.data());
      double total = w0 + w1;
      if (!(total > 0.0) || !std::isfinite(total))
        throw numerical_error("sampling hit a zero-probability branch");
      int bit = rng.uniform01() < (w0 / total) ? 0 : 1;
      site_bits[k] = static_cast<std::uint8_t>(bit);
      std::vector<cplx>& chosen = bit ? m1 : m0;
      double w = bit ? w1 : w0;
      kern::zscal(t.dr, cplx{1.0 / std::sqrt(w), 0.0}, chosen.data());
      v = chosen;
    }
    for (int s = 0; s < n; ++s) out[smp][site_to_logical_[s]] = site_bits[s];
  }
  return out;
}

double MpsState::orth_residual_left(int k) const {
  const SiteTensor& t = sites_[check_site(k)];
  std::vector<cplx> g(std::size_t(t.dr) * t.dr, cplx{0.0, 0.0});
  kern::zgemm_ct_acc(t.dr, std::size_t(t.dl) * 2, t.dr, t.a.data(), t.a.data(),
                     g.data());
  double acc = 0.0;
  for (int i = 0; i < t.dr; ++i)
    for (int j = 0; j < t.dr; ++j) {
      cplx d = g[std::size_t(i) * t.dr + j] -
               ((i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0});
      acc += std::norm(d);
    }
  return std::sqrt(acc);
}

double MpsState::orth_residual_right(int k) const {
  const SiteTensor& t = sites_[check_site(k)];
  double acc = 0.0;
  for (int i = 0; i < t.dl; ++i)
    for (int j = 0; j < t.dl; ++j) {
      // dotc(row_j, row_i) = (T T†)(i,j) for the (dl × 2·dr) view
      cplx d = kern::zdotc(std::size_t(t.dr) * 2,
                           t.a.data() + std::size_t(j) * 2 * t.dr,
                           t.a.data() + std::size_t(i) * 2 * t.dr);
      if (i == j) d -= 1.0;
      acc += std::norm(d);
    }
  return std::sqrt(acc);
}

}  // namespace qite
