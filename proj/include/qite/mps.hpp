#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qite/rng.hpp"
#include "qite/svd.hpp"

namespace qite {

using cplx = std::complex<double>;

// Rank-3 site tensor, physical dimension fixed to 2.
// Layout: a[(l*2 + p)*dr + r] for left bond l, physical p, right bond r.
struct SiteTensor {
  int dl = 1, dr = 1;
  std::vector<cplx> a;

  SiteTensor() = default;
  SiteTensor(int dl_, int dr_) : dl(dl_), dr(dr_), a(std::size_t(dl_) * 2 * dr_) {}
  cplx& at(int l, int p, int r) { return a[(std::size_t(l) * 2 + p) * dr + r]; }
  const cplx& at(int l, int p, int r) const {
    return a[(std::size_t(l) * 2 + p) * dr + r];
  }
};

// 4×4 two-site gate, row-major over |p q⟩ with index 2p+q; p is the
// left site. unitary_hint marks gates known to be unitary (e.g. SWAP).
struct TwoSiteGate {
  std::array<cplx, 16> m{};
  bool unitary_hint = false;
};

using SingleSiteGate = std::array<cplx, 4>;  // row-major 2×2

namespace gates {
TwoSiteGate identity2();
TwoSiteGate swap_gate();
// exp(-dtau · J · (Z⊗Z - shift)), diagonal
TwoSiteGate zz_ite(double dtau, double coupling, double shift);
// SWAP ∘ zz_ite: the interaction followed by the swap
TwoSiteGate zz_ite_then_swap(double dtau, double coupling, double shift);
SingleSiteGate identity1();
SingleSiteGate hadamard();
// exp(-dtau · h · (Z - shift)), diagonal
SingleSiteGate z_ite(double dtau, double field, double shift);
}  // namespace gates

struct GateResult {
  double discarded_weight = 0.0;
  std::vector<double> kept_singular_values;
};

// Matrix product state in mixed canonical form. The represented state is
// exp(norm_log) times the tensor contraction; per-gate scale factors are
// folded into norm_log so tensor entries stay in range during
// non-unitary evolution. site_to_logical[s] names the logical qubit
// currently held by site s; gates act on sites, samples and moments are
// reported in logical order.
class MpsState {
 public:
  static MpsState plus_state(int n);
  static MpsState computational_basis(std::span<const std::uint8_t> bits);
  static MpsState from_amplitudes(std::span<const cplx> amps,
                                  const TruncationPolicy& policy);
  // takes arbitrary consistent tensors, canonicalizes with center at 0
  static MpsState from_tensors(std::vector<SiteTensor> tensors);

  int size() const { return static_cast<int>(sites_.size()); }
  int center() const { return center_; }
  const SiteTensor& site(int k) const { return sites_[check_site(k)]; }
  int bond_dim(int bond) const;  // bond between sites bond and bond+1
  int max_bond_dim() const;
  double norm_log() const { return norm_log_; }

  const std::vector<int>& site_to_logical() const { return site_to_logical_; }
  std::vector<int> logical_to_site() const;
  void set_site_to_logical(std::vector<int> perm);
  void swap_site_labels(int left_site);

  void move_center(int k);
  GateResult apply_two_site_gate(int left_site, const TwoSiteGate& gate,
                                 const TruncationPolicy& policy);
  void apply_single_site_gate(int site, const SingleSiteGate& gate);

  double norm() const;
  double log_norm() const;
  // returns the pre-renormalization norm; afterwards norm() == 1 and
  // norm_log == 0
  double renormalize();

  double expectation_z(int site) const;
  double correlator_zz(int site_i, int site_j) const;
  std::vector<double> bond_entropies() const;  // base-2, length N-1
  std::vector<std::vector<std::uint8_t>> sample(Rng& rng, int count) const;

  // Frobenius residual of the isometry condition at site k
  double orth_residual_left(int k) const;
  double orth_residual_right(int k) const;

 private:
  MpsState() = default;
  int check_site(int k) const;
  void require_center() const;
  void require_normalized() const;
  void move_center_right();
  void move_center_left();
  void right_orthogonalize_step(int k);  // absorbs into site k-1
  double fold_scale(std::vector<cplx>& data);

  std::vector<SiteTensor> sites_;
  int center_ = -1;
  double norm_log_ = 0.0;
  std::vector<int> site_to_logical_;
};

}  // namespace qite
