#include "qite/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qite/eig.hpp"
#include "qite/errors.hpp"
#include "qite/rng.hpp"

namespace qite {

std::string ordering_name(OrderingStrategy s) {
  switch (s) {
    case OrderingStrategy::identity: return "identity";
    case OrderingStrategy::spectral: return "spectral";
    case OrderingStrategy::shuffled: return "shuffled";
    case OrderingStrategy::hierarchical: return "hierarchical";
  }
  return "identity";
}

OrderingStrategy ordering_from_name(const std::string& name) {
  if (name == "identity") return OrderingStrategy::identity;
  if (name == "spectral") return OrderingStrategy::spectral;
  if (name == "shuffled") return OrderingStrategy::shuffled;
  if (name == "hierarchical") return OrderingStrategy::hierarchical;
  throw config_error("unknown ordering strategy '" + name + "'");
}

std::vector<int> OrderingPermutation::site_to_logical() const {
  std::vector<int> inv(logical_to_site.size());
  for (std::size_t q = 0; q < logical_to_site.size(); ++q)
    inv[logical_to_site[q]] = static_cast<int>(q);
  return inv;
}

void OrderingPermutation::validate() const {
  std::vector<bool> seen(logical_to_site.size(), false);
  for (int s : logical_to_site) {
    if (s < 0 || s >= static_cast<int>(logical_to_site.size()) || seen[s])
      throw config_error("ordering permutation is not a bijection");
    seen[s] = true;
  }
}

OrderingPermutation identity_order(int n) {
  if (n < 1) throw config_error("ordering needs n >= 1");
  OrderingPermutation p;
  p.strategy = OrderingStrategy::identity;
  p.logical_to_site.resize(n);
  std::iota(p.logical_to_site.begin(), p.logical_to_site.end(), 0);
  return p;
}

namespace {

// qubit sequence of one connected component, sorted by Fiedler entry
std::vector<int> order_component(const std::vector<int>& verts,
                                 const IsingModel& model) {
  const int m = static_cast<int>(verts.size());
  if (m <= 2) return verts;

  std::vector<double> lap(std::size_t(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double w = std::abs(model.coupling(verts[a], verts[b]));
      if (w == 0.0) continue;
      lap[std::size_t(a) * m + b] -= w;
      lap[std::size_t(b) * m + a] -= w;
      lap[std::size_t(a) * m + a] += w;
      lap[std::size_t(b) * m + b] += w;
    }

  EighResult eg = eigh(lap.data(), m);
  const double* fiedler = eg.vectors.data() + std::size_t(1) * m;

  // sign fixed so the first entry above noise is positive
  double sign = 1.0;
  for (int i = 0; i < m; ++i) {
    if (std::abs(fiedler[i]) > 1e-12) {
      sign = fiedler[i] > 0.0 ? 1.0 : -1.0;
      break;
    }
  }

  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    double fa = sign * fiedler[a], fb = sign * fiedler[b];
    if (fa != fb) return fa < fb;
    return verts[a] < verts[b];
  });

  std::vector<int> out(m);
  for (int i = 0; i < m; ++i) out[i] = verts[idx[i]];
  return out;
}

}  // namespace

OrderingPermutation spectral_order(const IsingModel& model) {
  model.validate();
  const int n = model.n;
  if (n < 3) {
    OrderingPermutation p = identity_order(n);
    p.strategy = OrderingStrategy::spectral;
    return p;
  }

  // connected components under |J| adjacency
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> adj(n);
  for (const auto& [key, value] : model.couplings) {
    if (value == 0.0) continue;
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }
  std::vector<std::vector<int>> components;
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    int id = static_cast<int>(components.size());
    components.emplace_back();
    std::vector<int> stack{v};
    comp[v] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      components[id].push_back(u);
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
    std::sort(components[id].begin(), components[id].end());
  }

  OrderingPermutation p;
  p.strategy = OrderingStrategy::spectral;
  p.logical_to_site.assign(n, -1);
  p.disconnected_graph = components.size() > 1;
  if (p.disconnected_graph)
    std::fprintf(stderr,
                 "warning: interaction graph is disconnected (%zu components);"
                 " ordering each component by its own Fiedler vector\n",
                 components.size());

  // larger components first; ties by smallest contained qubit
  std::stable_sort(components.begin(), components.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return a.front() < b.front();
                   });

  int next_site = 0;
  for (const auto& verts : components)
    for (int q : order_component(verts, model))
      p.logical_to_site[q] = next_site++;
  p.validate();
  return p;
}

OrderingPermutation shuffled_order(int n, std::uint64_t seed) {
  OrderingPermutation p = identity_order(n);
  p.strategy = OrderingStrategy::shuffled;
  Rng rng(seed);
  rng.shuffle(p.logical_to_site);
  return p;
}

OrderingPermutation hierarchical_order(int n_assets, int n_time, int n_bits) {
  if (n_assets < 1 || n_time < 1 || n_bits < 1)
    throw config_error("hierarchical ordering needs positive dimensions");
  OrderingPermutation p;
  p.strategy = OrderingStrategy::hierarchical;
  p.logical_to_site.assign(n_assets * n_time * n_bits, -1);
  PortfolioSpec dims;
  dims.n_assets = n_assets;
  dims.n_time = n_time;
  dims.n_bits = n_bits;
  for (int a = 0; a < n_assets; ++a)
    for (int t = 0; t < n_time; ++t)
      for (int b = 0; b < n_bits; ++b)
        p.logical_to_site[dims.var_index(a, t, b)] =
            b + n_bits * a + n_assets * n_bits * t;
  p.validate();
  return p;
}

double mapping_cost(const IsingModel& model, const OrderingPermutation& perm) {
  if (static_cast<int>(perm.logical_to_site.size()) != model.n)
    throw config_error("mapping_cost: permutation size mismatch");
  double acc = 0.0;
  for (const auto& [key, value] : model.couplings) {
    double d = perm.logical_to_site[key.first] - perm.logical_to_site[key.second];
    acc += std::abs(value) * d * d;
  }
  return acc;
}

}  // namespace qite
