// partition.hpp - centralized reference executor of the forest-partition
// stage. Every phase first builds the directed meta-graph, then clusters its
// nodes so that each surviving tree at least doubles in size.
//
// Decisions are computed on a snapshot taken at step entry and applied
// afterwards; ties break by ascending id everywhere. The distributed
// protocol reproduces these semantics exactly.

#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kdom/chain.hpp"
#include "kdom/forest.hpp"
#include "kdom/graph.hpp"

namespace kdom {

class RunConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StepSnapshot {
  int phase = 0;
  std::string step;  // "1", "2a", "2b", "2c", "2d", "2e.<j>", "end", "exit"
  std::vector<NodeIndex> root_of;
  std::vector<NodeIndex> parent;
  std::map<NodeIndex, MetaStatus> statuses;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  std::vector<MergeRecord> merges;
};

// The meta-graph at the start of a phase (after classification).
struct PhaseStart {
  int phase = 0;
  std::vector<NodeIndex> root_of;
  std::map<NodeIndex, std::size_t> heights;
  std::map<NodeIndex, MetaStatus> statuses;  // empty for the final forest
};

struct PhaseTrace {
  std::vector<StepSnapshot> steps;
  std::vector<PhaseStart> phase_starts;  // G_0 ... G_last, then the final forest
  bool early_exit = false;
  int final_phase = 0;               // index of the meta-graph holding the final forest
  std::vector<int> label_iterations;  // label-reduction iterations, per completed phase
};

struct PartitionResult {
  RootedForest forest;
  PhaseTrace trace;
};

// Throws RunConfigError unless g is connected, k >= 1 and n >= k+1.
void check_run_config(const Graph& g, std::uint64_t k);

// Runs one phase step by step; exposed so tests can drive individual steps.
class PhaseExecutor {
 public:
  PhaseExecutor(const Graph& g, RootedForest& forest, MetaGraph& mg, int phase);

  // Heights and ACTIVE/INACTIVE statuses.
  void step1_classify();
  // Directed edges and preferred edges; returns true on early exit
  // (single meta-node).
  bool step1_edges();
  void step2a_absorb_into_inactive();
  void step2b_prune_upstreams();
  void step2c_minima();
  void step2d_maxima();
  // Returns the number of label-reduction iterations run.
  int step2e_iterate();

  const std::set<NodeIndex>& chain_members() const noexcept { return x_; }
  ChainView chain_view() const;
  // Merges performed since the last call.
  std::vector<MergeRecord> take_merges();

  // Per-step observer, called after each step with its name.
  std::function<void(const std::string&)> on_step;

 private:
  void apply(const ChainOutcome& outcome);
  void notify(const std::string& step);

  const Graph& g_;
  RootedForest& f_;
  MetaGraph& mg_;
  int phase_;
  std::set<NodeIndex> x_;
  std::vector<MergeRecord> merges_;
};

PartitionResult run_partition(const Graph& g, std::uint64_t k);

StepSnapshot snapshot(int phase, const std::string& step, const RootedForest& f, const MetaGraph& mg,
                      std::vector<MergeRecord> merges);

}  // namespace kdom
