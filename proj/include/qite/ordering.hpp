#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qite/problem.hpp"

namespace qite {

enum class OrderingStrategy { identity, spectral, shuffled, hierarchical };

std::string ordering_name(OrderingStrategy s);
OrderingStrategy ordering_from_name(const std::string& name);

// Bijection logical qubit -> initial MPS site.
struct OrderingPermutation {
  std::vector<int> logical_to_site;
  OrderingStrategy strategy = OrderingStrategy::identity;
  bool disconnected_graph = false;  // spectral only: components ordered apart

  std::vector<int> site_to_logical() const;
  void validate() const;
};

OrderingPermutation identity_order(int n);

// Fiedler-vector ordering of the |J| interaction graph. Disconnected
// graphs are ordered component by component (descending size) with a
// warning on stderr; n < 3 falls back to identity.
OrderingPermutation spectral_order(const IsingModel& model);

OrderingPermutation shuffled_order(int n, std::uint64_t seed);

// Site q + N_q·(n-1) + N_a·N_q·(t-1) for the variable x_{n,t,q}
// (1-based form; implementation is 0-based), applied to the asset-major
// variable indexing of PortfolioSpec.
OrderingPermutation hierarchical_order(int n_assets, int n_time, int n_bits);

// Σ |J_ij| (π_i - π_j)²
double mapping_cost(const IsingModel& model, const OrderingPermutation& perm);

}  // namespace qite
