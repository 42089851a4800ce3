#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qite/mps.hpp"
#include "qite/problem.hpp"

namespace qite {

// Dense statevector, capped at 14 qubits. Qubit 0 is the most
// significant bit of the amplitude index.
struct DenseState {
  int n = 0;
  std::vector<cplx> amps;

  explicit DenseState(int n_qubits);
  DenseState(int n_qubits, std::vector<cplx> amplitudes);
  static DenseState plus_state(int n_qubits);

  double norm() const;
  void renormalize();
  static constexpr int max_qubits = 14;
};

// exact minimum over all 2^n spin assignments (n <= 24);
// bitstring is the lexicographically-first argmin, bits in logical order
std::pair<double, std::vector<std::uint8_t>> brute_force_ground(
    const IsingModel& model);

// exp(-Δτ·H) applied `steps` times to |+>^n with renormalization after
// each application; trajectory[0] is the initial state. When
// normalized_gates is set, every term is shifted by its current
// expectation value first.
std::vector<DenseState> dense_ite(const IsingModel& model, double dtau,
                                  int steps, bool normalized_gates);

// exact contraction of a 2^k × 2^k gate (k = targets.size() ∈ {1,2})
DenseState dense_apply_gate(const DenseState& state,
                            std::span<const cplx> gate,
                            std::span<const int> targets);

// reconstruction of an MPS in logical qubit order (n <= 14)
DenseState to_dense(const MpsState& state);

double dense_energy(const IsingModel& model, const DenseState& state);
double fidelity(const DenseState& a, const DenseState& b);
// max |a_i - phase·b_i| minimized over a global phase
double max_dist_up_to_phase(const DenseState& a, const DenseState& b);

// diagonal of the Ising Hamiltonian over basis states, logical order
std::vector<double> ising_diagonal(const IsingModel& model);

}  // namespace qite
