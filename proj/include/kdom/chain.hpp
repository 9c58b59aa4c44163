// chain.hpp - chain-breaking machinery used inside each partition phase.
//
// After upstream pruning, the active non-isolated meta-nodes form directed
// chains (plus two-node cycles). The functions here decide, from a snapshot
// of those chains, which meta-nodes combine into which: local-extremum
// absorption, equal-position pairing via bit-position labels, and the rescue
// of nodes whose last meta-edge disappeared. Decisions are pure; executors
// apply them.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kdom/graph.hpp"

namespace kdom {

using Label = std::uint64_t;

class ChainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterated base-2 logarithm: 0 for x <= 1, else 1 + log*(log2 x).
int log_star(double x);

// ceil(log2(k+1)) for k >= 1.
int num_phases(std::uint64_t k);

struct VirtualLabels {
  Label minus;
  Label plus;
};

// Labels here are already shifted (>= 1). A missing upstream (downstream)
// neighbor is replaced by the label continuing the chain's direction.
VirtualLabels compute_virtual_labels(Label self, std::optional<Label> upstream,
                                     std::optional<Label> downstream);

struct ChainLabelState {
  Label l = 0;
  Label l_minus = 0;
  Label l_plus = 0;
  std::uint64_t a_bits = 0;  // bit p-1 set <=> position p in A
  std::uint64_t b_bits = 0;  // bit p-1 set <=> position p in B
  unsigned pstar = 0;        // 1-based, counted from the least significant bit

  bool in_a(unsigned p) const { return p >= 1 && ((a_bits >> (p - 1)) & 1U); }
  bool in_b(unsigned p) const { return p >= 1 && ((b_bits >> (p - 1)) & 1U); }
};

// Requires l_minus < l < l_plus or l_minus > l > l_plus.
ChainLabelState compute_pstar(Label l_minus, Label l, Label l_plus);

// Adjacency of the chain members: at most one downstream and one upstream
// neighbor each; in a two-node cycle both point at the same node.
struct ChainLinks {
  std::optional<NodeIndex> down;
  std::optional<NodeIndex> up;
};

using ChainView = std::map<NodeIndex, ChainLinks>;

std::vector<NodeIndex> chain_neighbors(const ChainLinks& links);

// One meta-node joining a newly formed node: `node` combines into `into`
// through the preferred edge it shares with `partner`.
struct Absorption {
  NodeIndex node;
  NodeIndex partner;
  NodeIndex into;
  bool rescued = false;
  friend bool operator==(const Absorption&, const Absorption&) = default;
};

struct ChainOutcome {
  std::vector<Absorption> absorptions;  // direct absorptions first, then rescues; each ascending
  std::vector<NodeIndex> formed;        // ids of the newly isolated nodes, ascending
  // Every chain member that left the chain (absorbed, formed or rescued).
  std::vector<NodeIndex> removed() const;
};

enum class Extremum { Minimum, Maximum };

// Every local extremum absorbs its neighbors. A neighbor claimed by two
// extrema goes to the smaller (Minimum) or larger (Maximum) label. Nodes left
// with no neighbor are rescued. Adjacent labels must differ.
ChainOutcome extremum_pass(const ChainView& chains, const std::map<NodeIndex, Label>& labels,
                           Extremum which);

// For every edge x -> y with equal p*, x combines into y; the bit-position
// rule guarantees no two such edges are consecutive (ChainError otherwise).
ChainOutcome equal_pstar_pass(const ChainView& chains, const std::map<NodeIndex, unsigned>& pstar);

// Removes the outcome's departed nodes and their links from the view.
void apply_to_view(ChainView& chains, const ChainOutcome& outcome);

// p* for every chain member; labels are raw (shifted by +1 internally).
// Throws ChainError if some member is not on a strictly monotone chain.
std::map<NodeIndex, ChainLabelState> chain_pstars(const ChainView& chains,
                                                  const std::map<NodeIndex, Label>& labels);

// Iteration cap for the label-reduction loop.
int iteration_cap(Label max_initial_label);

// Height bounds that hold for every tree during phase i (checked at runtime
// by the central executor; the distributed protocol budgets its time
// windows with them).
std::uint64_t phase_height_bound(int phase);  // any tree at phase start
std::uint64_t chain_height_bound(int phase);  // chain members after pruning

}  // namespace kdom
