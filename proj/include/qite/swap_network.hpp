#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qite {

enum class Architecture { rectangular, triangular };

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);  // rsn|tsn

// One nearest-neighbour slot: the gate acts on MPS sites
// (left_site, left_site+1), making logical_pair adjacent, then swaps.
// logical_pair assumes the identity initial layout; a solver running a
// different layout rebinds pairs through its live site→logical map.
struct GateSlot {
  int layer = 0;      // 0-based, < GateSchedule::depth
  int left_site = 0;  // 0-based
  std::pair<int, int> logical_pair;
};

struct GateSchedule {
  int n = 0;
  Architecture arch = Architecture::rectangular;
  int depth = 0;  // layer count of the mesh: N for RSN, 2N-3 for TSN
  std::vector<GateSlot> slots;
  std::vector<int> final_permutation;  // site -> logical after all slots
};

// Brick mesh: even layers act on even bonds, odd layers on odd bonds.
GateSchedule rectangular_schedule(int n);
// Interferometer-style diagonals reaching depth 2N-3.
GateSchedule triangular_schedule(int n);

struct ScheduleReport {
  int gate_count = 0;
  int depth = 0;
  bool pair_coverage_ok = false;
  bool reversal_ok = false;
  bool ok() const { return pair_coverage_ok && reversal_ok; }
};

// Re-simulates the slot list from the identity layout and checks the
// schedule invariants; failures land in the report, not in exceptions.
ScheduleReport validate_schedule(const GateSchedule& schedule);

}  // namespace qite
