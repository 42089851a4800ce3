#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qite {

// x^T Q x + offset over x ∈ {0,1}^n; upper-triangular sparse storage,
// diagonal entries are the linear terms.
struct QuboModel {
  int n = 0;
  std::map<std::pair<int, int>, double> q;  // (i,j) with i <= j
  double offset = 0.0;

  void add(int i, int j, double value);
  double cost(std::span<const std::uint8_t> bits) const;
  void validate() const;
};

// Σ J_ij z_i z_j + Σ h_i z_i + constant over z ∈ {±1}^n.
struct IsingModel {
  int n = 0;
  std::map<std::pair<int, int>, double> couplings;  // (i,j) with i < j
  std::vector<double> fields;
  double constant = 0.0;

  void add_coupling(int i, int j, double value);
  double coupling(int i, int j) const;
  void validate() const;
};

struct WeightedGraph {
  struct Edge {
    int u = 0, v = 0;  // u < v
    double w = 0.0;
  };
  int n = 0;
  std::vector<Edge> edges;
  void validate() const;
};

IsingModel qubo_to_ising(const QuboModel& qubo);
double ising_cost(const IsingModel& model, std::span<const int> spins);
double ising_cost_bits(const IsingModel& model,
                       std::span<const std::uint8_t> bits);
std::vector<int> spins_from_bits(std::span<const std::uint8_t> bits);

// H = -Σ (W_ij/2)(1 - Z_i Z_j); the minimum is the negated max cut.
IsingModel maxcut_ising(const WeightedGraph& graph);
double cut_weight(const WeightedGraph& graph, std::span<const int> spins);

WeightedGraph gen_3regular(int n, std::uint64_t seed);
WeightedGraph gen_er(int n, double p, std::uint64_t seed);
WeightedGraph gen_sk(int n, std::uint64_t seed);

// Dynamic portfolio QUBO. Variable x_{n,t,q} is the q-th bit of the
// position of asset n at time t; variables are indexed asset-major:
// idx = q + n_bits·t + n_bits·n_time·n.
struct PortfolioSpec {
  int n_assets = 0;
  int n_time = 0;
  int n_bits = 0;
  double funds = 0.0;        // K; defaults to 2^n_bits - 1 when <= 0
  double risk_aversion = 0;  // γ
  double transaction_cost = 0.0;  // ν
  double budget_penalty = 0.0;    // ρ
  std::vector<std::vector<double>> mu;  // [t][asset]
  std::vector<std::vector<std::vector<double>>> sigma;  // [t][a][b]

  int qubit_count() const { return n_assets * n_time * n_bits; }
  int var_index(int asset, int t, int bit) const;
  double effective_funds() const;
  void validate() const;
};

// ζ = (5/4)·ν·K/K' with K' = 2^{n_bits} - 1
double transaction_zeta(double nu, double funds, int n_bits);

QuboModel build_portfolio_qubo(const PortfolioSpec& spec);

// ω[t][asset] decoded from the bits of a candidate solution
std::vector<std::vector<double>> decode_positions(
    const PortfolioSpec& spec, std::span<const std::uint8_t> bits);

struct ReturnsData {
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<std::vector<double>>> sigma;
  std::vector<std::string> assets;
};

// Price CSV (date column + one close column per asset) -> per-rebalance
// log returns and sample covariances. Consecutive non-overlapping
// windows of `window` raw steps; n_time windows are produced.
ReturnsData ingest_prices(const std::string& csv_path, int n_time, int window);
ReturnsData ingest_prices_text(const std::string& csv_text, int n_time,
                               int window);

double sharpe_ratio(const std::vector<std::vector<double>>& omega,
                    const std::vector<std::vector<double>>& mu,
                    const std::vector<std::vector<std::vector<double>>>& sigma);

struct BudgetMetrics {
  double mean = 0.0;
  double min_t = 0.0;
  double max_t = 0.0;
};
BudgetMetrics budget_metrics(const std::vector<std::vector<double>>& omega);

}  // namespace qite
