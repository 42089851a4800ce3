#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qite/mps.hpp"
#include "qite/ordering.hpp"
#include "qite/problem.hpp"
#include "qite/swap_network.hpp"

namespace qite {

struct SolverConfig {
  double dtau = 0.1;
  int n_step_max = 30;
  int n_samples = 1000;
  TruncationPolicy truncation;
  Architecture arch = Architecture::triangular;
  OrderingStrategy ordering = OrderingStrategy::spectral;
  std::uint64_t ordering_seed = 0;
  // set by callers that already built a permutation (e.g. hierarchical)
  std::optional<OrderingPermutation> ordering_override;
  double stop_ratio = 1e-3;
  std::uint64_t seed = 0;

  void validate(int n) const;
};

// ⟨Z_i⟩ and ⟨Z_i Z_j⟩ in logical indexing; zz only for coupled pairs.
struct Moments {
  std::vector<double> z;
  std::map<std::pair<int, int>, double> zz;
};

Moments compute_moments(const MpsState& state, const IsingModel& model);

double energy_from_moments(const IsingModel& model, const Moments& moments);

// One normalized imaginary-time step through the SWAP network: every
// slot applies exp(-Δτ·J·(ZZ - ⟨ZZ⟩)) ∘ SWAP (bare SWAP when J = 0)
// bound through the live site→logical map, then the field gates run at
// the post-reversal sites. The state is left unnormalized.
void ite_step(MpsState& state, const GateSchedule& schedule,
              const IsingModel& model, const SolverConfig& cfg,
              const Moments& moments);

struct SampleStats {
  std::vector<double> costs;
  double mean = 0.0;
  double variance = 0.0;  // population variance
  int argmin = 0;
};

SampleStats evaluate_samples(
    const IsingModel& model,
    const std::vector<std::vector<std::uint8_t>>& samples);

struct StepRecord {
  int step = 0;
  double energy = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double best_cost = 0.0;  // best sample cost of this step
  std::vector<double> entropies;
  double cumulative_entanglement = 0.0;  // normalized A(s)
  double wall_ms = 0.0;
};

struct SolveReport {
  std::vector<std::uint8_t> best_bits;  // logical order
  double best_cost = 0.0;
  std::optional<double> ar;
  std::optional<double> epsilon;
  std::vector<StepRecord> records;
  OrderingPermutation ordering;
  bool converged = false;
  bool failed = false;
  std::string stop_reason;
  int steps_run = 0;
};

SolveReport solve(const IsingModel& model, const SolverConfig& cfg,
                  std::optional<double> reference_cost = std::nullopt);

}  // namespace qite
