#include "qite/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qite/errors.hpp"
#include "qite/kernels.hpp"

namespace qite {

DenseState::DenseState(int n_qubits) : n(n_qubits) {
  if (n < 1 || n > max_qubits)
    throw config_error("dense state limited to 1..14 qubits");
  amps.assign(std::size_t(1) << n, cplx{0.0, 0.0});
}

DenseState::DenseState(int n_qubits, std::vector<cplx> amplitudes)
    : DenseState(n_qubits) {
  if (amplitudes.size() != amps.size())
    throw config_error("dense state amplitude count mismatch");
  amps = std::move(amplitudes);
  for (const cplx& a : amps)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw numerical_error("dense state has non-finite amplitudes");
}

DenseState DenseState::plus_state(int n_qubits) {
  DenseState st(n_qubits);
  double amp = std::pow(2.0, -0.5 * n_qubits);
  std::fill(st.amps.begin(), st.amps.end(), cplx{amp, 0.0});
  return st;
}

double DenseState::norm() const {
  return std::sqrt(kern::znrm2sq(amps.size(), amps.data()));
}

void DenseState::renormalize() {
  double f = norm();
  if (!(f > 0.0) || !std::isfinite(f))
    throw numerical_error("cannot renormalize a degenerate dense state");
  kern::zscal(amps.size(), cplx{1.0 / f, 0.0}, amps.data());
}

std::vector<double> ising_diagonal(const IsingModel& model) {
  model.validate();
  if (model.n > DenseState::max_qubits)
    throw config_error("ising_diagonal limited to 14 qubits");
  const int n = model.n;
  std::vector<double> diag(std::size_t(1) << n, model.constant);
  auto spin = [&](std::uint64_t basis, int q) {
    return ((basis >> (n - 1 - q)) & 1) ? -1.0 : 1.0;
  };
  for (std::uint64_t b = 0; b < diag.size(); ++b) {
    double acc = 0.0;
    for (const auto& [key, value] : model.couplings)
      acc += value * spin(b, key.first) * spin(b, key.second);
    for (int i = 0; i < n; ++i) acc += model.fields[i] * spin(b, i);
    diag[b] += acc;
  }
  return diag;
}

std::pair<double, std::vector<std::uint8_t>> brute_force_ground(
    const IsingModel& model) {
  model.validate();
  const int n = model.n;
  if (n > 24) throw config_error("brute force limited to 24 spins");

  // Gray-code walk with incremental cost updates; local[i] tracks
  // h_i + Σ_j J_ij z_j for the current assignment.
  std::vector<int> spins(n, 1);
  std::vector<double> local(model.fields.begin(), model.fields.end());
  std::vector<std::vector<std::pair<int, double>>> nbr(n);
  for (const auto& [key, value] : model.couplings) {
    nbr[key.first].push_back({key.second, value});
    nbr[key.second].push_back({key.first, value});
    local[key.first] += value;   // partner starts at +1
    local[key.second] += value;
  }
  double cost = model.constant;
  for (int i = 0; i < n; ++i) cost += model.fields[i];
  for (const auto& [key, value] : model.couplings) cost += value;

  auto bits_of = [&](const std::vector<int>& z) {
    std::vector<std::uint8_t> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = z[i] == -1 ? 1 : 0;
    return bits;
  };

  // the incremental cost drifts by a few ulps over 2^n updates, so
  // candidates within tol are re-evaluated exactly before comparing
  double scale = std::abs(model.constant);
  for (const auto& [key, value] : model.couplings) scale += std::abs(value);
  for (double h : model.fields) scale += std::abs(h);
  const double tol = 1e-9 * std::max(scale, 1.0);

  double best = cost;
  std::vector<std::uint8_t> best_bits = bits_of(spins);
  const std::uint64_t total = std::uint64_t(1) << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    // Gray code flips bit ctz(k); map bit b to qubit n-1-b so the walk
    // enumerates every assignment
    int q = n - 1 - std::countr_zero(k);
    cost += -2.0 * spins[q] * local[q];
    int nz = -spins[q];
    spins[q] = nz;
    for (const auto& [j, w] : nbr[q]) local[j] += 2.0 * w * nz;

    if (cost < best + tol) {
      double exact = ising_cost(model, spins);
      if (exact < best - 1e-15 * std::max(scale, 1.0)) {
        best = exact;
        best_bits = bits_of(spins);
      } else if (exact <= best + 1e-15 * std::max(scale, 1.0)) {
        std::vector<std::uint8_t> cand = bits_of(spins);
        if (cand < best_bits) best_bits = std::move(cand);
      }
    }
  }
  return {best, best_bits};
}

std::vector<DenseState> dense_ite(const IsingModel& model, double dtau,
                                  int steps, bool normalized_gates) {
  model.validate();
  if (model.n > DenseState::max_qubits)
    throw config_error("dense ITE limited to 14 qubits");
  if (!(dtau > 0.0)) throw config_error("dense ITE needs dtau > 0");
  if (steps < 0) throw config_error("dense ITE needs steps >= 0");

  std::vector<double> diag = ising_diagonal(model);
  std::vector<DenseState> traj;
  traj.reserve(steps + 1);
  traj.push_back(DenseState::plus_state(model.n));

  for (int s = 0; s < steps; ++s) {
    const DenseState& cur = traj.back();
    double shift = 0.0;
    if (normalized_gates) shift = dense_energy(model, cur);
    DenseState next(model.n);
    for (std::size_t b = 0; b < diag.size(); ++b)
      next.amps[b] = cur.amps[b] * std::exp(-dtau * (diag[b] - shift));
    next.renormalize();
    traj.push_back(std::move(next));
  }
  return traj;
}

DenseState dense_apply_gate(const DenseState& state,
                            std::span<const cplx> gate,
                            std::span<const int> targets) {
  const int n = state.n;
  const int k = static_cast<int>(targets.size());
  if (k < 1 || k > 2) throw config_error("dense gates take 1 or 2 targets");
  if (gate.size() != (std::size_t(1) << k) * (std::size_t(1) << k))
    throw config_error("dense gate matrix size mismatch");
  for (int t : targets)
    if (t < 0 || t >= n) throw config_error("dense gate target out of range");
  if (k == 2 && targets[0] == targets[1])
    throw config_error("dense gate targets must be distinct");

  const int dim = 1 << k;
  DenseState out(n);
  std::vector<std::uint64_t> masks(k);
  for (int i = 0; i < k; ++i) masks[i] = std::uint64_t(1) << (n - 1 - targets[i]);

  std::uint64_t total = std::uint64_t(1) << n;
  std::vector<cplx> in(dim), res(dim);
  for (std::uint64_t b = 0; b < total; ++b) {
    bool base = true;
    for (int i = 0; i < k; ++i)
      if (b & masks[i]) base = false;
    if (!base) continue;
    for (int c = 0; c < dim; ++c) {
      std::uint64_t idx = b;
      for (int i = 0; i < k; ++i)
        if (c & (1 << (k - 1 - i))) idx |= masks[i];
      in[c] = state.amps[idx];
    }
    for (int r = 0; r < dim; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < dim; ++c) acc += gate[r * dim + c] * in[c];
      res[r] = acc;
    }
    for (int r = 0; r < dim; ++r) {
      std::uint64_t idx = b;
      for (int i = 0; i < k; ++i)
        if (r & (1 << (k - 1 - i))) idx |= masks[i];
      out.amps[idx] = res[r];
    }
  }
  return out;
}

DenseState to_dense(const MpsState& state) {
  const int n = state.size();
  if (n > DenseState::max_qubits)
    throw config_error("dense reconstruction limited to 14 qubits");

  // partial amplitudes (2^k rows × right bond), contracted left to right
  std::vector<cplx> part{cplx{1.0, 0.0}};
  std::size_t rows = 1;
  int bond = 1;
  for (int k = 0; k < n; ++k) {
    const SiteTensor& t = state.site(k);
    std::vector<cplx> next(rows * 2 * t.dr, cplx{0.0, 0.0});
    kern::zgemm_acc(rows, bond, std::size_t(t.dr) * 2, part.data(), t.a.data(),
                    next.data());
    // rows gain the physical index: (row, p, r) is already contiguous
    part = std::move(next);
    rows *= 2;
    bond = t.dr;
  }

  double scale = std::exp(state.norm_log());
  DenseState out(n);
  const std::vector<int>& s2l = state.site_to_logical();
  for (std::uint64_t b = 0; b < rows; ++b) {
    // site-ordered index b -> logical-ordered index
    std::uint64_t idx = 0;
    for (int s = 0; s < n; ++s)
      if ((b >> (n - 1 - s)) & 1) idx |= std::uint64_t(1) << (n - 1 - s2l[s]);
    out.amps[idx] = part[b] * scale;
  }
  return out;
}

double dense_energy(const IsingModel& model, const DenseState& state) {
  if (model.n != state.n) throw config_error("dense_energy: size mismatch");
  std::vector<double> diag = ising_diagonal(model);
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < diag.size(); ++b) {
    double p = std::norm(state.amps[b]);
    num += diag[b] * p;
    den += p;
  }
  if (!(den > 0.0)) throw numerical_error("dense_energy of a zero state");
  return num / den;
}

double fidelity(const DenseState& a, const DenseState& b) {
  if (a.n != b.n) throw config_error("fidelity: size mismatch");
  cplx overlap = kern::zdotc(a.amps.size(), a.amps.data(), b.amps.data());
  double na = kern::znrm2sq(a.amps.size(), a.amps.data());
  double nb = kern::znrm2sq(b.amps.size(), b.amps.data());
  if (!(na > 0.0) || !(nb > 0.0))
    throw numerical_error("fidelity of a zero state");
  return std::norm(overlap) / (na * nb);
}

double max_dist_up_to_phase(const DenseState& a, const DenseState& b) {
  if (a.n != b.n) throw config_error("distance: size mismatch");
  // align the phase at b's largest amplitude
  std::size_t kmax = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < b.amps.size(); ++i) {
    double m = std::abs(b.amps[i]);
    if (m > best) {
      best = m;
      kmax = i;
    }
  }
  cplx phase{1.0, 0.0};
  if (best > 0.0 && std::abs(a.amps[kmax]) > 0.0) {
    cplx ratio = a.amps[kmax] / b.amps[kmax];
    double mag = std::abs(ratio);
    if (mag > 0.0) phase = ratio / mag;
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < a.amps.size(); ++i)
    dist = std::max(dist, std::abs(a.amps[i] - phase * b.amps[i]));
  return dist;
}

}  // namespace qite
