#include "qite/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qite/eig.hpp"
#include "qite/errors.hpp"
#include "qite/rng.hpp"

namespace qite {

void QuboModel::add(int i, int j, double value) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw config_error("QUBO term index out of range");
  if (!std::isfinite(value)) throw config_error("QUBO term must be finite");
  if (value == 0.0) return;
  auto [it, fresh] = q.try_emplace({i, j}, value);
  if (!fresh) it->second += value;
}

double QuboModel::cost(std::span<const std::uint8_t> bits) const {
  if (static_cast<int>(bits.size()) != n)
    throw config_error("QUBO cost: bitstring length mismatch");
  double acc = offset;
  for (const auto& [key, value] : q)
    if (bits[key.first] && bits[key.second]) acc += value;
  return acc;
}

void QuboModel::validate() const {
  if (n < 1) throw config_error("QUBO needs at least one variable");
  for (const auto& [key, value] : q) {
    if (key.first < 0 || key.first > key.second || key.second >= n)
      throw config_error("QUBO term is not upper-triangular");
    if (!std::isfinite(value)) throw config_error("QUBO term must be finite");
  }
  if (!std::isfinite(offset)) throw config_error("QUBO offset must be finite");
}

void IsingModel::add_coupling(int i, int j, double value) {
  if (i == j) throw config_error("Ising self-coupling is not allowed");
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw config_error("Ising coupling index out of range");
  if (!std::isfinite(value)) throw config_error("coupling must be finite");
  if (value == 0.0) return;
  auto [it, fresh] = couplings.try_emplace({i, j}, value);
  if (!fresh) it->second += value;
}

double IsingModel::coupling(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = couplings.find({i, j});
  return it == couplings.end() ? 0.0 : it->second;
}

void IsingModel::validate() const {
  if (n < 1) throw config_error("Ising model needs at least one spin");
  if (static_cast<int>(fields.size()) != n)
    throw config_error("Ising field vector has wrong length");
  for (const auto& [key, value] : couplings) {
    if (key.first < 0 || key.first >= key.second || key.second >= n)
      throw config_error("Ising coupling indices invalid");
    if (!std::isfinite(value)) throw config_error("coupling must be finite");
  }
  for (double h : fields)
    if (!std::isfinite(h)) throw config_error("field must be finite");
  if (!std::isfinite(constant)) throw config_error("constant must be finite");
}

void WeightedGraph::validate() const {
  if (n < 1) throw config_error("graph needs at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= e.v || e.v >= n)
      throw config_error("graph edge invalid (self-loop or bad index)");
    if (!seen.insert({e.u, e.v}).second)
      throw config_error("graph has a duplicate edge");
    if (!std::isfinite(e.w)) throw config_error("edge weight must be finite");
  }
}

IsingModel qubo_to_ising(const QuboModel& qubo) {
  qubo.validate();
  IsingModel m;
  m.n = qubo.n;
  m.fields.assign(qubo.n, 0.0);
  m.constant = qubo.offset;
  // x_i = (1 - z_i)/2
  for (const auto& [key, value] : qubo.q) {
    auto [i, j] = key;
    if (i == j) {
      m.fields[i] -= value / 2.0;
      m.constant += value / 2.0;
    } else {
      m.add_coupling(i, j, value / 4.0);
      m.fields[i] -= value / 4.0;
      m.fields[j] -= value / 4.0;
      m.constant += value / 4.0;
    }
  }
  return m;
}

double ising_cost(const IsingModel& model, std::span<const int> spins) {
  if (static_cast<int>(spins.size()) != model.n)
    throw config_error("ising_cost: spin vector length mismatch");
  for (int z : spins)
    if (z != 1 && z != -1)
      throw config_error("ising_cost: spins must be +1 or -1");
  double acc = model.constant;
  for (const auto& [key, value] : model.couplings)
    acc += value * spins[key.first] * spins[key.second];
  for (int i = 0; i < model.n; ++i) acc += model.fields[i] * spins[i];
  return acc;
}

std::vector<int> spins_from_bits(std::span<const std::uint8_t> bits) {
  std::vector<int> z(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) z[i] = bits[i] ? -1 : 1;
  return z;
}

double ising_cost_bits(const IsingModel& model,
                       std::span<const std::uint8_t> bits) {
  std::vector<int> z = spins_from_bits(bits);
  return ising_cost(model, z);
}

IsingModel maxcut_ising(const WeightedGraph& graph) {
  graph.validate();
  IsingModel m;
  m.n = graph.n;
  m.fields.assign(graph.n, 0.0);
  for (const auto& e : graph.edges) {
    m.add_coupling(e.u, e.v, e.w / 2.0);
    m.constant -= e.w / 2.0;
  }
  return m;
}

double cut_weight(const WeightedGraph& graph, std::span<const int> spins) {
  if (static_cast<int>(spins.size()) != graph.n)
    throw config_error("cut_weight: spin vector length mismatch");
  double acc = 0.0;
  for (const auto& e : graph.edges)
    if (spins[e.u] != spins[e.v]) acc += e.w;
  return acc;
}

WeightedGraph gen_3regular(int n, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0)
    throw config_error("3-regular graphs need even n >= 4");
  Rng rng(seed);
  // pairing model with full restart on self-loops/duplicates
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(3 * n);
    for (int v = 0; v < n; ++v)
      for (int d = 0; d < 3; ++d) stubs.push_back(v);
    rng.shuffle(stubs);
    std::set<std::pair<int, int>> edges;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) {
        ok = false;
        break;
      }
      if (!edges.insert(std::minmax(u, v)).second) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    WeightedGraph g;
    g.n = n;
    for (const auto& [u, v] : edges) g.edges.push_back({u, v, 1.0});
    return g;
  }
  throw config_error("3-regular sampling did not converge");
}

WeightedGraph gen_er(int n, double p, std::uint64_t seed) {
  if (n < 1) throw config_error("ER graph needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw config_error("ER edge probability must be in [0, 1]");
  Rng rng(seed);
  WeightedGraph g;
  g.n = n;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) g.edges.push_back({u, v, 1.0});
  return g;
}

WeightedGraph gen_sk(int n, std::uint64_t seed) {
  if (n < 2) throw config_error("SK graph needs n >= 2");
  Rng rng(seed);
  WeightedGraph g;
  g.n = n;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      g.edges.push_back({u, v, rng.uniform01() < 0.5 ? -1.0 : 1.0});
  return g;
}

int PortfolioSpec::var_index(int asset, int t, int bit) const {
  return bit + n_bits * t + n_bits * n_time * asset;
}

double PortfolioSpec::effective_funds() const {
  return funds > 0.0 ? funds : std::pow(2.0, n_bits) - 1.0;
}

void PortfolioSpec::validate() const {
  if (n_assets < 1 || n_time < 1 || n_bits < 1)
    throw config_error("portfolio dimensions must be positive");
  if (funds < 0.0) throw config_error("funds must be positive");
  if (transaction_cost < 0.0 || budget_penalty < 0.0)
    throw config_error("cost coefficients must be non-negative");
  if (static_cast<int>(mu.size()) != n_time ||
      static_cast<int>(sigma.size()) != n_time)
    throw config_error("mu/sigma must have one entry per time step");
  for (int t = 0; t < n_time; ++t) {
    if (static_cast<int>(mu[t].size()) != n_assets)
      throw config_error("mu row has wrong length");
    if (static_cast<int>(sigma[t].size()) != n_assets)
      throw config_error("sigma block has wrong shape");
    for (int a = 0; a < n_assets; ++a)
      if (static_cast<int>(sigma[t][a].size()) != n_assets)
        throw config_error("sigma block has wrong shape");
    for (int a = 0; a < n_assets; ++a)
      for (int b = a + 1; b < n_assets; ++b)
        if (std::abs(sigma[t][a][b] - sigma[t][b][a]) > 1e-10)
          throw config_error("sigma block is not symmetric");
    // PSD within 1e-10
    std::vector<double> flat(std::size_t(n_assets) * n_assets);
    double scale = 0.0;
    for (int a = 0; a < n_assets; ++a)
      for (int b = 0; b < n_assets; ++b) {
        flat[std::size_t(a) * n_assets + b] = sigma[t][a][b];
        scale = std::max(scale, std::abs(sigma[t][a][b]));
      }
    EighResult eg = eigh(flat.data(), n_assets);
    if (eg.values.front() < -1e-10 * std::max(scale, 1.0))
      throw config_error("sigma block is not positive semidefinite at t=" +
                         std::to_string(t));
  }
}

double transaction_zeta(double nu, double funds, int n_bits) {
  double kprime = std::pow(2.0, n_bits) - 1.0;
  return 1.25 * nu * funds / kprime;
}

QuboModel build_portfolio_qubo(const PortfolioSpec& spec) {
  spec.validate();
  QuboModel qubo;
  qubo.n = spec.qubit_count();

  const double funds = spec.effective_funds();
  const double zeta =
      transaction_zeta(spec.transaction_cost, funds, spec.n_bits);

  // position weight of bit q: 2^q / K  (bits are 0-based)
  auto bit_weight = [&](int bit) { return std::pow(2.0, bit) / funds; };

  for (int t = 0; t < spec.n_time; ++t) {
    // -μ_t·ω_t
    for (int a = 0; a < spec.n_assets; ++a)
      for (int b = 0; b < spec.n_bits; ++b)
        qubo.add(spec.var_index(a, t, b), spec.var_index(a, t, b),
                 -spec.mu[t][a] * bit_weight(b));
    // γ ω_t^T Σ_t ω_t
    for (int a = 0; a < spec.n_assets; ++a)
      for (int b = 0; b < spec.n_assets; ++b) {
        double coeff = spec.risk_aversion * spec.sigma[t][a][b];
        if (coeff == 0.0) continue;
        for (int qa = 0; qa < spec.n_bits; ++qa)
          for (int qb = 0; qb < spec.n_bits; ++qb)
            qubo.add(spec.var_index(a, t, qa), spec.var_index(b, t, qb),
                     coeff * bit_weight(qa) * bit_weight(qb));
      }
    // ρ (u·ω_t - 1)² = ρ [(Σω)² - 2Σω + 1]
    if (spec.budget_penalty != 0.0) {
      for (int a = 0; a < spec.n_assets; ++a)
        for (int qa = 0; qa < spec.n_bits; ++qa) {
          int ia = spec.var_index(a, t, qa);
          for (int b = 0; b < spec.n_assets; ++b)
            for (int qb = 0; qb < spec.n_bits; ++qb)
              qubo.add(ia, spec.var_index(b, t, qb),
                       spec.budget_penalty * bit_weight(qa) * bit_weight(qb));
          qubo.add(ia, ia, -2.0 * spec.budget_penalty * bit_weight(qa));
        }
      qubo.offset += spec.budget_penalty;
    }
  }
  // ζ Σ_t Σ_a (ω_{a,t+1} - ω_{a,t})²
  if (zeta != 0.0) {
    for (int t = 0; t + 1 < spec.n_time; ++t)
      for (int a = 0; a < spec.n_assets; ++a)
        for (int qa = 0; qa < spec.n_bits; ++qa)
          for (int qb = 0; qb < spec.n_bits; ++qb) {
            double w = zeta * bit_weight(qa) * bit_weight(qb);
            qubo.add(spec.var_index(a, t + 1, qa), spec.var_index(a, t + 1, qb),
                     w);
            qubo.add(spec.var_index(a, t, qa), spec.var_index(a, t, qb), w);
            qubo.add(spec.var_index(a, t + 1, qa), spec.var_index(a, t, qb),
                     -w);
            qubo.add(spec.var_index(a, t, qa), spec.var_index(a, t + 1, qb),
                     -w);
          }
  }
  return qubo;
}

std::vector<std::vector<double>> decode_positions(
    const PortfolioSpec& spec, std::span<const std::uint8_t> bits) {
  if (static_cast<int>(bits.size()) != spec.qubit_count())
    throw config_error("decode_positions: bitstring length mismatch");
  const double funds = spec.effective_funds();
  std::vector<std::vector<double>> omega(
      spec.n_time, std::vector<double>(spec.n_assets, 0.0));
  for (int t = 0; t < spec.n_time; ++t)
    for (int a = 0; a < spec.n_assets; ++a)
      for (int b = 0; b < spec.n_bits; ++b)
        if (bits[spec.var_index(a, t, b)])
          omega[t][a] += std::pow(2.0, b) / funds;
  return omega;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? "" : cell.substr(start));
  }
  return out;
}

}  // namespace

ReturnsData ingest_prices_text(const std::string& csv_text, int n_time,
                               int window) {
  if (n_time < 1 || window < 1)
    throw config_error("price ingestion needs n_time >= 1 and window >= 1");
  std::stringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw io_error("price CSV is empty");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2)
    throw io_error("price CSV needs a date column and at least one asset");
  int n_assets = static_cast<int>(header.size()) - 1;

  std::vector<std::vector<double>> prices;  // [row][asset]
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw io_error("price CSV row " + std::to_string(row_no) +
                     " has wrong column count");
    std::vector<double> row(n_assets);
    for (int a = 0; a < n_assets; ++a) {
      const std::string& cell = cells[a + 1];
      if (cell.empty())
        throw io_error("missing price at row " + std::to_string(row_no) +
                       ", column " + header[a + 1]);
      try {
        std::size_t used = 0;
        row[a] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw io_error("bad price '" + cell + "' at row " +
                       std::to_string(row_no) + ", column " + header[a + 1]);
      }
      if (!(row[a] > 0.0))
        throw io_error("non-positive price at row " + std::to_string(row_no) +
                       ", column " + header[a + 1]);
    }
    prices.push_back(std::move(row));
  }

  int needed = n_time * window + 1;
  if (static_cast<int>(prices.size()) < needed)
    throw config_error("price history too short: need " +
                       std::to_string(needed) + " rows, have " +
                       std::to_string(prices.size()));

  ReturnsData out;
  out.assets.assign(header.begin() + 1, header.end());
  // raw per-step log returns
  std::vector<std::vector<double>> rets(prices.size() - 1,
                                        std::vector<double>(n_assets));
  for (std::size_t r = 1; r < prices.size(); ++r)
    for (int a = 0; a < n_assets; ++a)
      rets[r - 1][a] = std::log(prices[r][a] / prices[r - 1][a]);

  for (int t = 0; t < n_time; ++t) {
    int lo = t * window;  // window t covers raw returns [lo, lo+window)
    std::vector<double> mu_t(n_assets, 0.0);
    for (int k = 0; k < window; ++k)
      for (int a = 0; a < n_assets; ++a) mu_t[a] += rets[lo + k][a];
    std::vector<double> mean(n_assets, 0.0);
    for (int k = 0; k < window; ++k)
      for (int a = 0; a < n_assets; ++a) mean[a] += rets[lo + k][a] / window;
    std::vector<std::vector<double>> cov(n_assets,
                                         std::vector<double>(n_assets, 0.0));
    if (window > 1) {
      for (int k = 0; k < window; ++k)
        for (int a = 0; a < n_assets; ++a)
          for (int b = 0; b < n_assets; ++b)
            cov[a][b] += (rets[lo + k][a] - mean[a]) *
                         (rets[lo + k][b] - mean[b]) / (window - 1);
    }
    out.mu.push_back(std::move(mu_t));
    out.sigma.push_back(std::move(cov));
  }
  return out;
}

ReturnsData ingest_prices(const std::string& csv_path, int n_time, int window) {
  std::ifstream in(csv_path);
  if (!in) throw io_error("cannot open price CSV: " + csv_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ingest_prices_text(buf.str(), n_time, window);
}

double sharpe_ratio(
    const std::vector<std::vector<double>>& omega,
    const std::vector<std::vector<double>>& mu,
    const std::vector<std::vector<std::vector<double>>>& sigma) {
  if (omega.size() != mu.size() || omega.size() != sigma.size())
    throw config_error("sharpe_ratio: time dimensions mismatch");
  double ret = 0.0, risk = 0.0;
  for (std::size_t t = 0; t < omega.size(); ++t) {
    std::size_t na = omega[t].size();
    if (mu[t].size() != na || sigma[t].size() != na)
      throw config_error("sharpe_ratio: asset dimensions mismatch");
    for (std::size_t a = 0; a < na; ++a) {
      ret += mu[t][a] * omega[t][a];
      for (std::size_t b = 0; b < na; ++b)
        risk += omega[t][a] * sigma[t][a][b] * omega[t][b];
    }
  }
  if (!(risk > 0.0))
    throw config_error("sharpe_ratio is undefined for a zero-risk portfolio");
  return ret / std::sqrt(risk);
}

BudgetMetrics budget_metrics(const std::vector<std::vector<double>>& omega) {
  if (omega.empty()) throw config_error("budget_metrics: empty portfolio");
  BudgetMetrics m;
  m.min_t = std::numeric_limits<double>::infinity();
  m.max_t = -std::numeric_limits<double>::infinity();
  for (const auto& row : omega) {
    double budget = 0.0;
    for (double w : row) budget += w;
    m.mean += budget / omega.size();
    m.min_t = std::min(m.min_t, budget);
    m.max_t = std::max(m.max_t, budget);
  }
  return m;
}

}  // namespace qite
