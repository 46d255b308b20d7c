#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpfold/lattice.hpp"

namespace hpfold {

// Exhaustive census of the constrained walk ensemble for one sequence.
struct EnumerationReport {
  int n = 0;
  std::uint64_t complete_count = 0;
  std::uint64_t trapped_count = 0;
  std::optional<int> min_energy;   // over complete walks
  std::uint64_t degeneracy = 0;    // complete walks attaining min_energy
  std::vector<std::string> optimal_actions;  // collected up to the cap, DFS order
  bool optimal_truncated = false;
};

struct EnumerateOptions {
  bool collect_optimal = false;
  std::size_t cap = 1024;        // max optimal action strings kept
  int max_feasible_n = 22;       // guard against accidental huge runs
  bool override_feasibility = false;
  int workers = 1;               // subtree workers; totals are worker-count independent
};

// Depth-first traversal of the exact action tree of the environment
// (fixed prefix, first-turn-Left, self-avoidance). Counts every leaf as
// complete (length N) or trapped, tracking the minimum energy and its
// degeneracy.
EnumerationReport enumerateWalks(const HPSequence& seq, const EnumerateOptions& opts = {});

// Exact optimal energy over all complete walks.
int optimalEnergy(const HPSequence& seq, int workers = 1);

// One JSON-lines record per complete walk: {"actions", "coords", "score"}.
// Feasible only for small N (default bound 14); deterministic file order.
void landscapeExport(const HPSequence& seq, const std::string& path, int max_n = 14);

struct CountCheck {
  int n = 0;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
  bool match = false;
};

// Recomputes the published complete-walk counts: N = 4 and N = 20 always,
// N = 24 only when the long-running flag is set.
std::vector<CountCheck> verifyCounts(bool include_n24, int workers = 1);

}  // namespace hpfold
