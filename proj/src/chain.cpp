#include "kdom/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

namespace kdom {

int log_star(double x) {
  int count = 0;
  while (x > 1.0) {
    x = std::log2(x);
    ++count;
  }
  return count;
}

int num_phases(std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  // ceil(log2(k+1)) == bit width of k.
  return std::bit_width(k);
}

VirtualLabels compute_virtual_labels(Label self, std::optional<Label> upstream,
                                     std::optional<Label> downstream) {
  if (!upstream && !downstream) throw ChainError("node is not on a chain");
  if (self == 0) throw ChainError("labels must be shifted to be positive");
  VirtualLabels out{};
  if (upstream) out.minus = *upstream;
  else out.minus = *downstream > self ? self - 1 : self + 1;
  if (downstream) out.plus = *downstream;
  else out.plus = *upstream < self ? self + 1 : self - 1;
  return out;
}

ChainLabelState compute_pstar(Label l_minus, Label l, Label l_plus) {
  const bool increasing = l_minus < l && l < l_plus;
  const bool decreasing = l_minus > l && l > l_plus;
  if (!increasing && !decreasing) {
    throw ChainError("label triple (" + std::to_string(l_minus) + "," + std::to_string(l) + "," +
                     std::to_string(l_plus) + ") is not strictly monotone");
  }
  ChainLabelState s;
  s.l = l;
  s.l_minus = l_minus;
  s.l_plus = l_plus;
  const std::uint64_t same_left = ~(l_minus ^ l);
  const std::uint64_t same_right = ~(l ^ l_plus);
  s.a_bits = same_left & ~same_right;
  s.b_bits = ~same_left & same_right;
  const std::uint64_t any = s.a_bits | s.b_bits;
  // l_minus != l_plus, and where they differ l agrees with exactly one side.
  if (any == 0) throw ChainError("A and B are both empty");
  s.pstar = static_cast<unsigned>(std::bit_width(any));
  return s;
}

std::vector<NodeIndex> chain_neighbors(const ChainLinks& links) {
  std::vector<NodeIndex> out;
  if (links.up) out.push_back(*links.up);
  if (links.down && (!links.up || *links.down != *links.up)) out.push_back(*links.down);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeIndex> ChainOutcome::removed() const {
  std::set<NodeIndex> out(formed.begin(), formed.end());
  for (const auto& a : absorptions) out.insert(a.node);
  return {out.begin(), out.end()};
}

namespace {

// Adds rescues for members not yet departed whose every neighbor departed.
// `gone_into` maps departed nodes to the id of the node they now belong to.
void add_rescues(const ChainView& chains, const std::map<NodeIndex, NodeIndex>& gone_into,
                 ChainOutcome& out) {
  for (const auto& [x, links] : chains) {
    if (gone_into.count(x)) continue;
    auto nbrs = chain_neighbors(links);
    if (nbrs.empty()) throw ChainError("chain member without neighbors");
    bool stranded = std::all_of(nbrs.begin(), nbrs.end(), [&](NodeIndex n) { return gone_into.count(n) > 0; });
    if (!stranded) continue;
    NodeIndex partner = links.down && gone_into.count(*links.down) ? *links.down : *links.up;
    out.absorptions.push_back({x, partner, gone_into.at(partner), true});
  }
}

}  // namespace

ChainOutcome extremum_pass(const ChainView& chains, const std::map<NodeIndex, Label>& labels,
                           Extremum which) {
  auto better = [which](Label a, Label b) { return which == Extremum::Minimum ? a < b : a > b; };
  auto label = [&](NodeIndex x) { return labels.at(x); };

  std::map<NodeIndex, std::vector<NodeIndex>> claims;
  for (const auto& [x, links] : chains) {
    auto nbrs = chain_neighbors(links);
    if (nbrs.empty()) throw ChainError("chain member without neighbors");
    bool extreme = true;
    for (NodeIndex n : nbrs) {
      if (label(n) == label(x)) throw ChainError("adjacent chain members share a label");
      extreme = extreme && better(label(x), label(n));
    }
    if (!extreme) continue;
    for (NodeIndex n : nbrs) claims[n].push_back(x);
  }

  ChainOutcome out;
  std::map<NodeIndex, NodeIndex> gone_into;
  std::set<NodeIndex> winners;
  for (const auto& [c, claimers] : claims) {
    NodeIndex winner = *std::min_element(claimers.begin(), claimers.end(), [&](NodeIndex a, NodeIndex b) {
      return better(label(a), label(b));
    });
    out.absorptions.push_back({c, winner, winner, false});
    gone_into[c] = winner;
    winners.insert(winner);
  }
  for (NodeIndex w : winners) gone_into[w] = w;
  out.formed.assign(winners.begin(), winners.end());
  add_rescues(chains, gone_into, out);
  return out;
}

ChainOutcome equal_pstar_pass(const ChainView& chains, const std::map<NodeIndex, unsigned>& pstar) {
  ChainOutcome out;
  std::map<NodeIndex, NodeIndex> gone_into;
  for (const auto& [x, links] : chains) {
    if (!links.down) continue;
    const NodeIndex y = *links.down;
    if (pstar.at(x) != pstar.at(y)) continue;
    if (gone_into.count(x) || gone_into.count(y)) {
      throw ChainError("consecutive chain edges share p* at node " + std::to_string(x));
    }
    gone_into[x] = y;
    gone_into[y] = y;
    out.absorptions.push_back({x, y, y, false});
    out.formed.push_back(y);
  }
  std::sort(out.formed.begin(), out.formed.end());
  add_rescues(chains, gone_into, out);
  return out;
}

void apply_to_view(ChainView& chains, const ChainOutcome& outcome) {
  auto gone = outcome.removed();
  std::set<NodeIndex> gone_set(gone.begin(), gone.end());
  for (NodeIndex g : gone) chains.erase(g);
  for (auto& [x, links] : chains) {
    if (links.down && gone_set.count(*links.down)) links.down.reset();
    if (links.up && gone_set.count(*links.up)) links.up.reset();
  }
}

std::map<NodeIndex, ChainLabelState> chain_pstars(const ChainView& chains,
                                                  const std::map<NodeIndex, Label>& labels) {
  std::map<NodeIndex, ChainLabelState> out;
  for (const auto& [x, links] : chains) {
    auto shifted = [&](NodeIndex v) { return labels.at(v) + 1; };
    if (links.up && links.down && *links.up == *links.down) {
      throw ChainError("two-node cycle survived into label reduction");
    }
    std::optional<Label> up, down;
    if (links.up) up = shifted(*links.up);
    if (links.down) down = shifted(*links.down);
    auto v = compute_virtual_labels(shifted(x), up, down);
    out[x] = compute_pstar(v.minus, shifted(x), v.plus);
  }
  return out;
}

int iteration_cap(Label max_initial_label) { return log_star(static_cast<double>(max_initial_label)) + 3; }

std::uint64_t chain_height_bound(int phase) {
  const std::uint64_t a = std::uint64_t{2} << phase;
  return 3 * a - 2;
}

std::uint64_t phase_height_bound(int phase) {
  std::uint64_t bound = 0;
  for (int i = 0; i < phase; ++i) {
    const std::uint64_t a = std::uint64_t{2} << i;
    bound = std::max(bound + 2 * a - 1, 5 * chain_height_bound(i) + 2);
  }
  return bound;
}

}  // namespace kdom
