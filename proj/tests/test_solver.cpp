#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qite/errors.hpp"
#include "qite/oracle.hpp"
#include "qite/solver.hpp"
#include "support/test_helpers.hpp"

using namespace qite;

namespace {

SolverConfig untruncated_config(int n) {
  SolverConfig cfg;
  cfg.truncation.chi_max = 1 << ((n / 2) + 1);
  cfg.truncation.sv_cutoff = 1e-14;
  cfg.dtau = 0.05;
  cfg.n_samples = 200;
  cfg.n_step_max = 10;
  cfg.ordering = OrderingStrategy::identity;
  return cfg;
}

MpsState run_one_step(const IsingModel& model, Architecture arch,
                      const SolverConfig& cfg) {
  MpsState st = MpsState::plus_state(model.n);
  GateSchedule sched = arch == Architecture::rectangular
                           ? rectangular_schedule(model.n)
                           : triangular_schedule(model.n);
  Moments m = compute_moments(st, model);
  ite_step(st, sched, model, cfg, m);
  st.renormalize();
  return st;
}

}  // namespace

TEST_CASE("compute_moments on product states and random states") {
  IsingModel m;
  m.n = 4;
  m.fields.assign(4, 0.5);
  m.add_coupling(0, 2, 1.0);
  m.add_coupling(1, 3, -0.5);

  MpsState plus = MpsState::plus_state(4);
  Moments mom = compute_moments(plus, m);
  for (double z : mom.z) CHECK(z == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& [key, zz] : mom.zz)
    CHECK(zz == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<std::uint8_t> zeros{0, 0, 0, 0};
  MpsState z0 = MpsState::computational_basis(zeros);
  Moments mz = compute_moments(z0, m);
  for (double z : mz.z) CHECK(z == doctest::Approx(1.0));
  for (const auto& [key, zz] : mz.zz) CHECK(zz == doctest::Approx(1.0));

  Rng rng(81);
  MpsState st = test::random_mps(rng, 5, 6);
  IsingModel m5 = test::random_ising(rng, 5, 0.6, true);
  Moments mm = compute_moments(st, m5);
  DenseState d = to_dense(st);
  for (int q = 0; q < 5; ++q) {
    double expect = 0.0;
    for (std::size_t b = 0; b < d.amps.size(); ++b)
      expect += ((b >> (4 - q)) & 1 ? -1.0 : 1.0) * std::norm(d.amps[b]);
    CHECK(mm.z[q] == doctest::Approx(expect).epsilon(1e-10));
  }
  for (const auto& [key, zz] : mm.zz) {
    double expect = 0.0;
    for (std::size_t b = 0; b < d.amps.size(); ++b) {
      double zi = (b >> (4 - key.first)) & 1 ? -1.0 : 1.0;
      double zj = (b >> (4 - key.second)) & 1 ? -1.0 : 1.0;
      expect += zi * zj * std::norm(d.amps[b]);
    }
    CHECK(zz == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("moments respect a permuted site_to_logical map") {
  IsingModel m;
  m.n = 3;
  m.fields.assign(3, 0.0);
  m.add_coupling(0, 1, 1.0);
  std::vector<std::uint8_t> bits{1, 0, 0};  // logical |100>
  MpsState st = MpsState::computational_basis(bits);
  TruncationPolicy pol;
  st.apply_two_site_gate(0, gates::swap_gate(), pol);
  st.swap_site_labels(0);
  Moments mom = compute_moments(st, m);
  CHECK(mom.z[0] == doctest::Approx(-1.0));  // logical 0 is still |1>
  CHECK(mom.z[1] == doctest::Approx(1.0));
  CHECK(mom.zz.at({0, 1}) == doctest::Approx(-1.0));
}

TEST_CASE("ite_step with H = 0 is a pure reversal") {
  IsingModel m;
  m.n = 5;
  m.fields.assign(5, 0.0);
  SolverConfig cfg = untruncated_config(5);

  Rng rng(82);
  MpsState st = test::random_mps(rng, 5, 3);
  DenseState before = to_dense(st);
  std::vector<int> labels_before = st.site_to_logical();

  GateSchedule sched = triangular_schedule(5);
  Moments mom = compute_moments(st, m);
  ite_step(st, sched, m, cfg, mom);

  // site labels reversed, logical content untouched
  std::vector<int> expect_labels(labels_before.rbegin(), labels_before.rend());
  CHECK(st.site_to_logical() == expect_labels);
  DenseState after = to_dense(st);
  CHECK(test::max_abs_diff(before.amps, after.amps) < 1e-12);
}

TEST_CASE("single normalized step matches the dense shifted operator") {
  IsingModel m;
  m.n = 2;
  m.fields.assign(2, 0.0);
  m.add_coupling(0, 1, 1.0);
  SolverConfig cfg = untruncated_config(2);
  cfg.dtau = 1.0;

  MpsState st = run_one_step(m, Architecture::triangular, cfg);
  DenseState mps_d = to_dense(st);

  auto traj = dense_ite(m, 1.0, 1, true);
  CHECK(max_dist_up_to_phase(mps_d, traj.back()) < 1e-12);
}

TEST_CASE("field gates apply at post-reversal sites") {
  IsingModel m;
  m.n = 3;
  m.fields = {0.8, -0.3, 0.1};
  m.add_coupling(0, 1, 0.5);
  m.add_coupling(1, 2, -0.7);
  m.add_coupling(0, 2, 0.2);
  SolverConfig cfg = untruncated_config(3);
  cfg.dtau = 0.31;

  MpsState st = run_one_step(m, Architecture::rectangular, cfg);
  auto traj = dense_ite(m, 0.31, 1, true);
  CHECK(max_dist_up_to_phase(to_dense(st), traj.back()) < 1e-12);
}

TEST_CASE("rsn and tsn steps agree exactly without truncation") {
  WeightedGraph g = gen_sk(6, 17);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg = untruncated_config(6);
  cfg.dtau = 0.2;

  MpsState rsn = run_one_step(m, Architecture::rectangular, cfg);
  MpsState tsn = run_one_step(m, Architecture::triangular, cfg);
  CHECK(max_dist_up_to_phase(to_dense(rsn), to_dense(tsn)) < 1e-10);
}

TEST_CASE("gate normalization shifts only change the norm") {
  WeightedGraph g = gen_sk(5, 23);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg = untruncated_config(5);
  cfg.dtau = 0.15;

  GateSchedule sched = triangular_schedule(5);
  MpsState with_shift = MpsState::plus_state(5);
  Moments mom = compute_moments(with_shift, m);
  ite_step(with_shift, sched, m, cfg, mom);
  with_shift.renormalize();

  MpsState without_shift = MpsState::plus_state(5);
  Moments zero_mom = mom;
  for (auto& z : zero_mom.z) z = 0.0;
  for (auto& [k, v] : zero_mom.zz) v = 0.0;
  ite_step(without_shift, sched, m, cfg, zero_mom);
  without_shift.renormalize();

  CHECK(max_dist_up_to_phase(to_dense(with_shift), to_dense(without_shift)) <
        1e-10);
}

TEST_CASE("evaluate_samples: stats and argmin") {
  IsingModel m;
  m.n = 2;
  m.fields.assign(2, 0.0);
  m.add_coupling(0, 1, 1.0);

  std::vector<std::vector<std::uint8_t>> same(5, {0, 1});
  SampleStats st = evaluate_samples(m, same);
  CHECK(st.variance == doctest::Approx(0.0));
  CHECK(st.mean == doctest::Approx(-1.0));

  // costs {0, 2}: mean 1, population variance 1
  IsingModel field;
  field.n = 1;
  field.fields = {1.0};
  field.constant = 1.0;
  std::vector<std::vector<std::uint8_t>> two{{1}, {0}};
  SampleStats st2 = evaluate_samples(field, two);
  CHECK(st2.mean == doctest::Approx(1.0));
  CHECK(st2.variance == doctest::Approx(1.0));
  CHECK(st2.argmin == 0);

  // recomputation oracle: byte-identical statistics
  Rng rng(83);
  IsingModel big = test::random_ising(rng, 8, 0.5, true);
  std::vector<std::vector<std::uint8_t>> samples;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::uint8_t> b(8);
    for (auto& x : b) x = std::uint8_t(rng.bounded(2));
    samples.push_back(std::move(b));
  }
  SampleStats a = evaluate_samples(big, samples);
  SampleStats b = evaluate_samples(big, samples);
  CHECK(a.costs == b.costs);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.argmin == b.argmin);
}

TEST_CASE("solve: single-edge and triangle maxcut reach the optimum") {
  WeightedGraph edge;
  edge.n = 2;
  edge.edges = {{0, 1, 1.0}};
  IsingModel me = maxcut_ising(edge);
  SolverConfig cfg;
  cfg.truncation.chi_max = 4;
  cfg.dtau = 1.0;
  cfg.n_step_max = 10;
  cfg.n_samples = 200;
  cfg.arch = Architecture::triangular;
  cfg.ordering = OrderingStrategy::identity;
  cfg.seed = 5;
  SolveReport rep = solve(me, cfg, -1.0);
  CHECK(rep.best_cost == doctest::Approx(-1.0));
  REQUIRE(rep.ar.has_value());
  CHECK(*rep.ar == doctest::Approx(1.0));
  CHECK_FALSE(rep.failed);

  WeightedGraph tri;
  tri.n = 3;
  tri.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
  IsingModel mt = maxcut_ising(tri);
  cfg.ordering = OrderingStrategy::spectral;
  SolveReport rt = solve(mt, cfg, -2.0);
  CHECK(rt.best_cost == doctest::Approx(-2.0));
  CHECK(*rt.ar == doctest::Approx(1.0));
}

TEST_CASE("solve stops on the sampled-variance threshold") {
  WeightedGraph edge;
  edge.n = 2;
  edge.edges = {{0, 1, 1.0}};
  IsingModel m = maxcut_ising(edge);
  SolverConfig cfg;
  cfg.truncation.chi_max = 4;
  cfg.dtau = 2.0;
  cfg.n_step_max = 50;
  cfg.n_samples = 500;
  cfg.ordering = OrderingStrategy::identity;
  cfg.seed = 11;
  SolveReport rep = solve(m, cfg, std::nullopt);
  CHECK(rep.converged);
  CHECK(rep.stop_reason == "variance_threshold");
  CHECK(rep.steps_run < 50);
  const StepRecord& last = rep.records.back();
  CHECK(last.sample_variance <
        cfg.stop_ratio * rep.records.front().sample_variance);
}

TEST_CASE("report consistency: best over steps, record shapes, A(s)") {
  WeightedGraph g = gen_3regular(8, 2);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg;
  cfg.truncation.chi_max = 8;
  cfg.dtau = 0.5;
  cfg.n_step_max = 8;
  cfg.n_samples = 300;
  cfg.arch = Architecture::rectangular;
  cfg.ordering = OrderingStrategy::shuffled;
  cfg.ordering_seed = 3;
  cfg.seed = 17;
  auto [ref, ref_bits] = brute_force_ground(m);
  SolveReport rep = solve(m, cfg, ref);

  double best = 1e300;
  double prev_a = 0.0;
  for (const StepRecord& r : rep.records) {
    best = std::min(best, r.best_cost);
    CHECK(r.entropies.size() == 7);
    CHECK(r.sample_variance >= 0.0);
    CHECK(r.cumulative_entanglement >= prev_a - 1e-15);
    CHECK(r.cumulative_entanglement <= 1.0 + 1e-12);
    prev_a = r.cumulative_entanglement;
  }
  CHECK(rep.best_cost == doctest::Approx(best));
  CHECK(ising_cost_bits(m, rep.best_bits) ==
        doctest::Approx(rep.best_cost).epsilon(1e-12));
  if (rep.ar) CHECK(*rep.ar * ref == doctest::Approx(rep.best_cost));
}

TEST_CASE("permutation bookkeeping alternates with step parity") {
  WeightedGraph g = gen_sk(5, 31);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg = untruncated_config(5);
  cfg.dtau = 0.1;

  OrderingPermutation perm = shuffled_order(5, 9);
  MpsState st = MpsState::plus_state(5);
  st.set_site_to_logical(perm.site_to_logical());
  std::vector<int> initial = st.site_to_logical();
  std::vector<int> reversed(initial.rbegin(), initial.rend());

  GateSchedule sched = rectangular_schedule(5);
  for (int s = 1; s <= 4; ++s) {
    Moments mom = compute_moments(st, m);
    ite_step(st, sched, m, cfg, mom);
    st.renormalize();
    CHECK(st.site_to_logical() == (s % 2 == 1 ? reversed : initial));
  }
}

TEST_CASE("energy is monotone non-increasing without truncation") {
  WeightedGraph g = gen_sk(6, 41);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg = untruncated_config(6);
  cfg.dtau = 0.1;
  cfg.n_step_max = 12;
  cfg.n_samples = 50;
  cfg.seed = 3;
  SolveReport rep = solve(m, cfg, std::nullopt);
  REQUIRE_FALSE(rep.failed);
  for (std::size_t s = 1; s < rep.records.size(); ++s)
    CHECK(rep.records[s].energy <= rep.records[s - 1].energy + 1e-9);
}

TEST_CASE("solve is deterministic for a fixed config") {
  WeightedGraph g = gen_3regular(8, 4);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg;
  cfg.truncation.chi_max = 8;
  cfg.dtau = 1.0;
  cfg.n_step_max = 5;
  cfg.n_samples = 100;
  cfg.ordering = OrderingStrategy::spectral;
  cfg.seed = 99;
  SolveReport a = solve(m, cfg, std::nullopt);
  SolveReport b = solve(m, cfg, std::nullopt);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.best_bits == b.best_bits);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].energy == b.records[i].energy);
    CHECK(a.records[i].sample_variance == b.records[i].sample_variance);
    CHECK(a.records[i].entropies == b.records[i].entropies);
  }
}

TEST_CASE("solve finds the optimum of a 12-qubit 3-regular instance") {
  WeightedGraph g = gen_3regular(12, 6);
  IsingModel m = maxcut_ising(g);
  auto [ref, ref_bits] = brute_force_ground(m);
  SolverConfig cfg;
  cfg.truncation.chi_max = 32;
  cfg.dtau = 1.0;
  cfg.n_step_max = 30;
  cfg.n_samples = 1000;
  cfg.arch = Architecture::triangular;
  cfg.ordering = OrderingStrategy::spectral;
  cfg.seed = 1;
  SolveReport rep = solve(m, cfg, ref);
  REQUIRE(rep.ar.has_value());
  CHECK(*rep.ar == doctest::Approx(1.0));
}

TEST_CASE("numerical failure names the offending slot") {
  WeightedGraph g = gen_sk(4, 3);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg;
  cfg.truncation.chi_max = 8;
  cfg.dtau = 1e6;  // exp overflow in the two-site gate
  MpsState st = MpsState::plus_state(4);
  GateSchedule sched = triangular_schedule(4);
  Moments mom = compute_moments(st, m);
  try {
    ite_step(st, sched, m, cfg, mom);
    FAIL("expected a numerical_error");
  } catch (const numerical_error& e) {
    CHECK(std::string(e.what()).find("slot") != std::string::npos);
  }

  // and solve() turns it into a failed partial report
  cfg.n_step_max = 3;
  cfg.n_samples = 10;
  SolveReport rep = solve(m, cfg, std::nullopt);
  CHECK(rep.failed);
  CHECK(rep.stop_reason.find("numerical_error") == 0);
  CHECK(rep.records.size() == 1);  // the step-0 record survives
}

TEST_CASE("disconnected graphs solve with free spins and component order") {
  // two triangles plus an isolated vertex: optimum is -2 per triangle
  WeightedGraph g;
  g.n = 7;
  g.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0},
             {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}};
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg;
  cfg.truncation.chi_max = 8;
  cfg.dtau = 1.0;
  cfg.n_step_max = 15;
  cfg.n_samples = 400;
  cfg.arch = Architecture::triangular;
  cfg.ordering = OrderingStrategy::spectral;
  cfg.seed = 13;
  SolveReport rep = solve(m, cfg, -4.0);
  CHECK(rep.best_cost == doctest::Approx(-4.0));
  CHECK(rep.ordering.disconnected_graph);
}

TEST_CASE("chi = 1 keeps product states: zero entropies and A = 0") {
  WeightedGraph g = gen_3regular(6, 8);
  IsingModel m = maxcut_ising(g);
  SolverConfig cfg;
  cfg.truncation.chi_max = 1;
  cfg.dtau = 0.5;
  cfg.n_step_max = 5;
  cfg.n_samples = 50;
  cfg.ordering = OrderingStrategy::identity;
  SolveReport rep = solve(m, cfg, std::nullopt);
  REQUIRE_FALSE(rep.failed);
  for (const StepRecord& r : rep.records) {
    for (double s : r.entropies) CHECK(s == doctest::Approx(0.0));
    CHECK(r.cumulative_entanglement == 0.0);
  }
}

TEST_CASE("solver config validation") {
  IsingModel m;
  m.n = 2;
  m.fields.assign(2, 0.0);
  m.add_coupling(0, 1, 1.0);
  SolverConfig cfg;
  cfg.truncation.chi_max = 0;
  CHECK_THROWS_AS(solve(m, cfg, std::nullopt), config_error);
  cfg.truncation.chi_max = 4;
  cfg.dtau = -1.0;
  CHECK_THROWS_AS(solve(m, cfg, std::nullopt), config_error);
  cfg.dtau = 1.0;
  cfg.stop_ratio = 2.0;
  CHECK_THROWS_AS(solve(m, cfg, std::nullopt), config_error);

  IsingModel single;
  single.n = 1;
  single.fields = {1.0};
  SolverConfig ok;
  CHECK_THROWS_AS(solve(single, ok, std::nullopt), config_error);
}
