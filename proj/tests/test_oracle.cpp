#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qite/errors.hpp"
#include "qite/oracle.hpp"
#include "support/test_helpers.hpp"

using namespace qite;

TEST_CASE("brute force ground: edge, triangle, fields") {
  WeightedGraph edge;
  edge.n = 2;
  edge.edges = {{0, 1, 1.0}};
  auto [cost_e, bits_e] = brute_force_ground(maxcut_ising(edge));
  CHECK(cost_e == doctest::Approx(-1.0));
  CHECK(bits_e == std::vector<std::uint8_t>{0, 1});  // lexicographically first

  WeightedGraph tri;
  tri.n = 3;
  tri.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
  auto [cost_t, bits_t] = brute_force_ground(maxcut_ising(tri));
  CHECK(cost_t == doctest::Approx(-2.0));

  IsingModel fields;
  fields.n = 2;
  fields.fields = {1.0, -1.0};
  auto [cost_f, bits_f] = brute_force_ground(fields);
  CHECK(cost_f == doctest::Approx(-2.0));
  // optimum at z = (-1, +1), i.e. bits (1, 0)
  CHECK(bits_f == std::vector<std::uint8_t>{1, 0});

  IsingModel huge;
  huge.n = 25;
  huge.fields.assign(25, 0.0);
  CHECK_THROWS_AS(brute_force_ground(huge), config_error);
}

TEST_CASE("brute force agrees with naive enumeration on random instances") {
  Rng rng(71);
  for (int trial = 0; trial < 4; ++trial) {
    IsingModel m = test::random_ising(rng, 10, 0.4, true);
    m.constant = rng.normal();
    auto [cost, bits] = brute_force_ground(m);
    double naive = 1e300;
    std::vector<std::uint8_t> naive_bits;
    for (std::uint64_t x = 0; x < 1024; ++x) {
      auto b = test::bits_of_index(x, 10);
      double c = ising_cost_bits(m, b);
      if (c < naive - 1e-12) {
        naive = c;
        naive_bits = b;
      }
    }
    CHECK(cost == doctest::Approx(naive).epsilon(1e-12));
    CHECK(ising_cost_bits(m, bits) == doctest::Approx(cost).epsilon(1e-12));
    CHECK(bits == naive_bits);
  }
}

TEST_CASE("brute force lower-bounds random assignments") {
  Rng rng(72);
  IsingModel m = test::random_ising(rng, 14, 0.3, true);
  auto [cost, bits] = brute_force_ground(m);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint8_t> b(14);
    for (auto& x : b) x = std::uint8_t(rng.bounded(2));
    CHECK(cost <= ising_cost_bits(m, b) + 1e-12);
  }
}

TEST_CASE("dense ITE drives a single Z spin to |1>") {
  IsingModel m;
  m.n = 2;  // dense state needs n >= 1; use Z on qubit 0 only
  m.fields = {1.0, 0.0};
  auto traj = dense_ite(m, 1.0, 30, false);
  const DenseState& last = traj.back();
  // ground of Z_0 has qubit 0 in |1>; qubit 1 stays in |+>
  double p1 = 0.0;
  for (std::size_t b = 0; b < last.amps.size(); ++b)
    if (b & 0b10) p1 += std::norm(last.amps[b]);
  CHECK(p1 > 1.0 - 1e-10);
}

TEST_CASE("dense ITE with H = 0 leaves the state constant") {
  IsingModel m;
  m.n = 3;
  m.fields.assign(3, 0.0);
  auto traj = dense_ite(m, 0.5, 5, false);
  for (const DenseState& st : traj)
    CHECK(test::max_abs_diff(st.amps, traj.front().amps) < 1e-14);
}

TEST_CASE("dense ITE energy is non-increasing, shifts change nothing") {
  Rng rng(73);
  WeightedGraph g = gen_sk(8, 5);
  IsingModel m = maxcut_ising(g);
  auto plain = dense_ite(m, 0.07, 25, false);
  auto shifted = dense_ite(m, 0.07, 25, true);
  REQUIRE(plain.size() == shifted.size());
  double prev = 1e300;
  for (std::size_t s = 0; s < plain.size(); ++s) {
    double e = dense_energy(m, plain[s]);
    CHECK(e <= prev + 1e-12);
    prev = e;
    CHECK(fidelity(plain[s], shifted[s]) > 1.0 - 1e-12);
  }
}

TEST_CASE("dense_apply_gate: identity, swap, random vs mps") {
  Rng rng(74);
  DenseState st(3);
  for (auto& a : st.amps) a = {rng.normal(), rng.normal()};

  std::vector<cplx> id4(16, cplx{0.0, 0.0});
  for (int i = 0; i < 4; ++i) id4[i * 4 + i] = 1.0;
  DenseState same = dense_apply_gate(st, id4, std::vector<int>{1, 2});
  CHECK(test::max_abs_diff(st.amps, same.amps) < 1e-14);

  // SWAP permutes basis states
  DenseState basis(2);
  basis.amps[0b01] = 1.0;
  TwoSiteGate sw = gates::swap_gate();
  DenseState swapped = dense_apply_gate(
      basis, std::span<const cplx>(sw.m.data(), 16), std::vector<int>{0, 1});
  CHECK(std::abs(swapped.amps[0b10] - cplx{1.0, 0.0}) < 1e-14);

  CHECK_THROWS_AS(
      dense_apply_gate(st, id4, std::vector<int>{0, 0}), config_error);
  CHECK_THROWS_AS(
      dense_apply_gate(st, id4, std::vector<int>{0, 3}), config_error);
}

TEST_CASE("dense state caps at 14 qubits") {
  CHECK_THROWS_AS(DenseState(15), config_error);
  CHECK_THROWS_AS(DenseState(0), config_error);
}

TEST_CASE("to_dense honors the logical permutation") {
  std::vector<std::uint8_t> bits{1, 0, 0};
  MpsState st = MpsState::computational_basis(bits);
  TruncationPolicy pol;
  st.apply_two_site_gate(0, gates::swap_gate(), pol);
  st.swap_site_labels(0);
  DenseState d = to_dense(st);
  // logical content is still |100>
  CHECK(std::abs(d.amps[0b100] - cplx{1.0, 0.0}) < 1e-14);
}
