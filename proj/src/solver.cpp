#include "qite/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qite/errors.hpp"
#include "qite/kernels.hpp"

namespace qite {

void SolverConfig::validate(int n) const {
  if (n < 2) throw config_error("solver needs at least 2 qubits");
  if (!(dtau > 0.0)) throw config_error("dtau must be positive");
  if (n_step_max < 1) throw config_error("n_step_max must be >= 1");
  if (n_samples < 1) throw config_error("n_samples must be >= 1");
  if (!(stop_ratio > 0.0 && stop_ratio < 1.0))
    throw config_error("stop_ratio must be in (0, 1)");
  truncation.validate();
  if (ordering_override) {
    ordering_override->validate();
    if (static_cast<int>(ordering_override->logical_to_site.size()) != n)
      throw config_error("ordering override has wrong size");
  }
}

namespace {

// environment propagation over site tensors with optional Z insertions;
// shared by the moment sweep below
std::vector<cplx> env_step(const std::vector<cplx>& env, const SiteTensor& t,
                           bool insert_z) {
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

double env_trace(const std::vector<cplx>& env, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i)
    acc += env[std::size_t(i) * dim + i].real();
  return acc;
}

// tr(E · Σ_p z_p A_p A_p†) — closes the environment at the Z site with
// everything to the right right-orthogonal
double close_with_z(const std::vector<cplx>& env, const SiteTensor& t) {
  std::vector<cplx> after = env_step(env, t, true);
  return env_trace(after, t.dr);
}

}  // namespace

Moments compute_moments(const MpsState& state, const IsingModel& model) {
  if (state.size() != model.n)
    throw config_error("compute_moments: state/model size mismatch");

  MpsState work = state;  // sweep needs the center at site 0
  work.move_center(0);
  const int n = work.size();
  double denom = kern::znrm2sq(work.site(0).a.size(), work.site(0).a.data());
  if (!(denom > 0.0)) throw numerical_error("moments of a zero state");
  double norm_total = std::abs(std::exp(2.0 * work.norm_log()) * denom);
  if (std::abs(norm_total - 1.0) > 1e-6)
    throw config_error("compute_moments expects a normalized state");

  const std::vector<int>& s2l = work.site_to_logical();
  std::vector<int> l2s(n);
  for (int s = 0; s < n; ++s) l2s[s2l[s]] = s;

  // site pairs that need ⟨ZZ⟩, grouped by left site
  std::vector<std::vector<int>> partners(n);
  for (const auto& [key, value] : model.couplings) {
    if (value == 0.0) continue;
    int a = l2s[key.first], b = l2s[key.second];
    if (a > b) std::swap(a, b);
    partners[a].push_back(b);
  }
  for (auto& v : partners) std::sort(v.begin(), v.end());

  Moments m;
  m.z.assign(n, 0.0);

  // single left-to-right sweep: plain prefix environments, and for each
  // left endpoint a Z-branched environment walked to its partners
  std::vector<cplx> plain{cplx{1.0, 0.0}};
  std::map<std::pair<int, int>, double> zz_by_site;
  for (int a = 0; a < n; ++a) {
    const SiteTensor& ta = work.site(a);
    m.z[s2l[a]] = close_with_z(plain, ta) / denom;

    if (!partners[a].empty()) {
      std::vector<cplx> branch = env_step(plain, ta, true);
      int reach = partners[a].back();
      std::size_t next_partner = 0;
      for (int b = a + 1; b <= reach; ++b) {
        const SiteTensor& tb = work.site(b);
        if (partners[a][next_partner] == b) {
          zz_by_site[{a, b}] = close_with_z(branch, tb) / denom;
          ++next_partner;
          if (next_partner >= partners[a].size()) break;
        }
        if (b < reach) branch = env_step(branch, tb, false);
      }
    }
    if (a + 1 < n) plain = env_step(plain, ta, false);
  }

  for (const auto& [key, value] : model.couplings) {
    if (value == 0.0) continue;
    int a = l2s[key.first], b = l2s[key.second];
    if (a > b) std::swap(a, b);
    m.zz[key] = zz_by_site.at({a, b});
  }
  return m;
}

double energy_from_moments(const IsingModel& model, const Moments& moments) {
  double acc = model.constant;
  for (const auto& [key, value] : model.couplings)
    acc += value * moments.zz.at(key);
  for (int i = 0; i < model.n; ++i)
    if (model.fields[i] != 0.0) acc += model.fields[i] * moments.z[i];
  return acc;
}

void ite_step(MpsState& state, const GateSchedule& schedule,
              const IsingModel& model, const SolverConfig& cfg,
              const Moments& moments) {
  if (schedule.n != model.n || state.size() != model.n)
    throw config_error("ite_step: schedule/model/state size mismatch");

  const TwoSiteGate bare_swap = gates::swap_gate();
  for (std::size_t idx = 0; idx < schedule.slots.size(); ++idx) {
    const GateSlot& slot = schedule.slots[idx];
    int s = slot.left_site;
    int qi = state.site_to_logical()[s];
    int qj = state.site_to_logical()[s + 1];
    auto key = std::minmax(qi, qj);
    double coupling = model.coupling(key.first, key.second);

    try {
      state.move_center(s);
      if (coupling != 0.0) {
        auto it = moments.zz.find(key);
        if (it == moments.zz.end())
          throw config_error("moments lack the coupled pair " +
                             std::to_string(key.first) + "," +
                             std::to_string(key.second));
        double shift = it->second;
        state.apply_two_site_gate(
            s, gates::zz_ite_then_swap(cfg.dtau, coupling, shift),
            cfg.truncation);
      } else {
        state.apply_two_site_gate(s, bare_swap, cfg.truncation);
      }
    } catch (const numerical_error& e) {
      throw numerical_error("slot " + std::to_string(idx) + " (layer " +
                            std::to_string(slot.layer) + ", site " +
                            std::to_string(s) + ", pair " +
                            std::to_string(key.first) + "," +
                            std::to_string(key.second) + "): " + e.what());
    }
    state.swap_site_labels(s);
  }

  // field gates run after the network, at the post-reversal sites
  std::vector<int> l2s(model.n);
  for (int s = 0; s < model.n; ++s) l2s[state.site_to_logical()[s]] = s;
  for (int q = 0; q < model.n; ++q) {
    if (model.fields[q] == 0.0) continue;
    state.apply_single_site_gate(
        l2s[q], gates::z_ite(cfg.dtau, model.fields[q], moments.z[q]));
  }
}

SampleStats evaluate_samples(
    const IsingModel& model,
    const std::vector<std::vector<std::uint8_t>>& samples) {
  if (samples.empty()) throw config_error("evaluate_samples: no samples");
  SampleStats st;
  st.costs.reserve(samples.size());
  for (const auto& bits : samples)
    st.costs.push_back(ising_cost_bits(model, bits));
  double mean = 0.0;
  for (double c : st.costs) mean += c;
  mean /= st.costs.size();
  double var = 0.0;
  for (double c : st.costs) var += (c - mean) * (c - mean);
  var /= st.costs.size();
  st.mean = mean;
  st.variance = var;
  st.argmin = 0;
  for (std::size_t i = 1; i < st.costs.size(); ++i)
    if (st.costs[i] < st.costs[st.argmin]) st.argmin = static_cast<int>(i);
  return st;
}

namespace {

OrderingPermutation resolve_ordering(const IsingModel& model,
                                     const SolverConfig& cfg) {
  if (cfg.ordering_override) return *cfg.ordering_override;
  switch (cfg.ordering) {
    case OrderingStrategy::identity:
      return identity_order(model.n);
    case OrderingStrategy::spectral:
      return spectral_order(model);
    case OrderingStrategy::shuffled:
      return shuffled_order(model.n, cfg.ordering_seed);
    case OrderingStrategy::hierarchical:
      throw config_error(
          "hierarchical ordering needs portfolio dimensions; pass an "
          "ordering override");
  }
  return identity_order(model.n);
}

}  // namespace

SolveReport solve(const IsingModel& model, const SolverConfig& cfg,
                  std::optional<double> reference_cost) {
  model.validate();
  cfg.validate(model.n);
  const int n = model.n;

  SolveReport report;
  report.ordering = resolve_ordering(model, cfg);
  GateSchedule schedule = cfg.arch == Architecture::rectangular
                              ? rectangular_schedule(n)
                              : triangular_schedule(n);

  MpsState state = MpsState::plus_state(n);
  state.set_site_to_logical(report.ordering.site_to_logical());

  Rng rng(cfg.seed);
  const double log2chi = std::log2(double(cfg.truncation.chi_max));
  const double a_denom =
      double(cfg.n_step_max) * double(n - 1) * (log2chi > 0.0 ? log2chi : 1.0);

  double entropy_running = 0.0;
  auto capture = [&](int step, const SampleStats& stats, const Moments& mom,
                     double wall_ms) {
    StepRecord rec;
    rec.step = step;
    rec.energy = energy_from_moments(model, mom);
    rec.sample_mean = stats.mean;
    rec.sample_variance = stats.variance;
    rec.best_cost = stats.costs[stats.argmin];
    rec.entropies = state.bond_entropies();
    for (double s : rec.entropies) entropy_running += s;
    rec.cumulative_entanglement =
        log2chi > 0.0 ? entropy_running / a_denom : 0.0;
    rec.wall_ms = wall_ms;
    report.records.push_back(std::move(rec));
  };

  auto samples0 = state.sample(rng, cfg.n_samples);
  SampleStats stats0 = evaluate_samples(model, samples0);
  const double sigma2_0 = stats0.variance;
  Moments moments = compute_moments(state, model);
  capture(0, stats0, moments, 0.0);

  report.best_cost = stats0.costs[stats0.argmin];
  report.best_bits = samples0[stats0.argmin];

  report.converged = false;
  report.stop_reason = "max_steps";
  for (int s = 1; s <= cfg.n_step_max; ++s) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      ite_step(state, schedule, model, cfg, moments);
      state.renormalize();
    } catch (const numerical_error& e) {
      report.failed = true;
      report.stop_reason = std::string("numerical_error: ") + e.what();
      return report;
    }
    auto samples = state.sample(rng, cfg.n_samples);
    SampleStats stats = evaluate_samples(model, samples);
    moments = compute_moments(state, model);
    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    capture(s, stats, moments, wall_ms);
    report.steps_run = s;

    if (stats.costs[stats.argmin] < report.best_cost) {
      report.best_cost = stats.costs[stats.argmin];
      report.best_bits = samples[stats.argmin];
    }
    if (stats.variance < cfg.stop_ratio * sigma2_0) {
      report.converged = true;
      report.stop_reason = "variance_threshold";
      break;
    }
  }

  if (reference_cost && *reference_cost != 0.0) {
    report.ar = report.best_cost / *reference_cost;
    report.epsilon = 1.0 - *report.ar;
  }
  return report;
}

}  // namespace qite
