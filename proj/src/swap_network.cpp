#include "qite/swap_network.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "qite/errors.hpp"

namespace qite {

std::string architecture_name(Architecture a) {
  return a == Architecture::rectangular ? "rsn" : "tsn";
}

Architecture architecture_from_name(const std::string& name) {
  if (name == "rsn" || name == "rectangular") return Architecture::rectangular;
  if (name == "tsn" || name == "triangular") return Architecture::triangular;
  throw config_error("unknown architecture '" + name + "' (want rsn or tsn)");
}

namespace {

GateSchedule build(int n, Architecture arch) {
  if (n < 2) throw config_error("SWAP network needs at least 2 qubits");
  GateSchedule sched;
  sched.n = n;
  sched.arch = arch;
  sched.depth = arch == Architecture::rectangular ? n : 2 * n - 3;

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int layer = 0; layer < sched.depth; ++layer) {
    for (int s = layer % 2; s + 1 < n; s += 2) {
      if (arch == Architecture::triangular) {
        // diagonal window of the triangle
        if (layer < s || layer > 2 * n - 4 - s) continue;
      }
      GateSlot slot;
      slot.layer = layer;
      slot.left_site = s;
      slot.logical_pair = std::minmax(perm[s], perm[s + 1]);
      sched.slots.push_back(slot);
      std::swap(perm[s], perm[s + 1]);
    }
  }
  sched.final_permutation = std::move(perm);
  return sched;
}

}  // namespace

GateSchedule rectangular_schedule(int n) {
  return build(n, Architecture::rectangular);
}

GateSchedule triangular_schedule(int n) {
  return build(n, Architecture::triangular);
}

ScheduleReport validate_schedule(const GateSchedule& schedule) {
  ScheduleReport rep;
  rep.gate_count = static_cast<int>(schedule.slots.size());
  rep.depth = schedule.depth;

  const int n = schedule.n;
  if (n < 2) return rep;

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::pair<int, int>> seen;
  bool coverage = rep.gate_count == n * (n - 1) / 2;
  for (const GateSlot& slot : schedule.slots) {
    int s = slot.left_site;
    if (s < 0 || s + 1 >= n || slot.layer < 0 || slot.layer >= schedule.depth) {
      coverage = false;
      break;
    }
    auto pair = std::minmax(perm[s], perm[s + 1]);
    if (pair != std::minmax(slot.logical_pair.first, slot.logical_pair.second) ||
        !seen.insert(pair).second) {
      coverage = false;
      break;
    }
    std::swap(perm[s], perm[s + 1]);
  }
  rep.pair_coverage_ok =
      coverage && static_cast<int>(seen.size()) == n * (n - 1) / 2;

  rep.reversal_ok = true;
  for (int s = 0; s < n; ++s)
    if (perm[s] != n - 1 - s) rep.reversal_ok = false;
  if (!schedule.final_permutation.empty() && schedule.final_permutation != perm)
    rep.reversal_ok = false;
  return rep;
}

}  // namespace qite
