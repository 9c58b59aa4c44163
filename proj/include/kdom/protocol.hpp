// protocol.hpp - the whole algorithm as a per-node state machine on the
// lockstep kernel.
//
// Coordination uses time windows instead of termination detection: every
// node derives the same schedule from (k, id bound, policy), and each window
// is one pulse longer than the longest message chain it can contain, so no
// message ever crosses a window boundary. Tree roots make every decision;
// other nodes relay and keep local flags. Decisions follow the central
// executor's snapshot semantics, so the two produce identical forests.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kdom/dominate.hpp"
#include "kdom/forest.hpp"
#include "kdom/graph.hpp"
#include "kdom/sim_kernel.hpp"

namespace kdom {

enum class WindowKind {
  Height,
  Status,
  Probe,
  Report,
  Select,
  Wave2a,
  HasUpstream,
  Prune,
  Wave2b,
  Claim,
  Reply,
  ChainWave,
  PStar,
  Gone,
  EqWave,
  Layer,
  Flood,
  Count,
  ClassSelect,
};

struct Window {
  WindowKind kind = WindowKind::Height;
  int phase = 0;      // -1 for the second stage
  int iter = 0;       // label-reduction iteration (1-based), 0 outside it
  bool maxima = false;  // Claim/Reply/ChainWave: which extremum pass
  std::uint64_t start = 0;
  std::uint64_t length = 0;

  std::uint64_t end() const { return start + length; }  // first pulse after the window
  std::string tag() const;
};

// The deterministic window plan. `at(i, exit_phase)` is the i-th window of a
// run that stopped early in `exit_phase` (or ran every phase); nullptr past
// the end.
class Schedule {
 public:
  Schedule(std::uint64_t k, NodeId id_bound, Policy policy);

  const Window* at(std::size_t i, std::optional<int> exit_phase) const;
  std::uint64_t total_pulses(std::optional<int> exit_phase) const;
  int phases() const noexcept { return phases_; }
  int label_iterations() const noexcept { return iterations_; }
  std::uint64_t longest() const;

 private:
  std::vector<Window> stage2(std::uint64_t start, std::uint64_t height_bound) const;

  std::uint64_t k_;
  Policy policy_;
  int phases_;
  int iterations_;
  std::vector<Window> full_;
  std::vector<std::size_t> select_index_;         // per phase
  std::vector<std::vector<Window>> exit_tail_;    // per phase
};

struct DistSnapshot {
  int phase = 0;
  std::string step;
  std::vector<NodeIndex> root_of;
  std::vector<NodeIndex> parent;
};

struct DistributedOptions {
  std::optional<std::uint64_t> pulse_cap;  // default: schedule length + slack
  std::optional<std::uint64_t> shuffle_seed;
  std::ostream* trace = nullptr;
  bool snapshots = false;
};

struct DistributedResult {
  RootedForest forest;
  DominatingSet dominating_set;
  RunMetrics metrics;
  std::vector<DistSnapshot> snapshots;
  bool early_exit = false;
  int final_phase = 0;
};

// Requires a connected graph with n >= k+1 (RunConfigError otherwise).
DistributedResult run_distributed(const Graph& g, std::uint64_t k, Policy policy,
                                  const DistributedOptions& options = {});

}  // namespace kdom
