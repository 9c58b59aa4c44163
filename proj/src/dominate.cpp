#include "kdom/dominate.hpp"

#include <algorithm>
#include <deque>
#include <string>
#include <tuple>

namespace kdom {

Policy parse_policy(std::string_view name) {
  if (name == "literal") return Policy::Literal;
  if (name == "guarded") return Policy::Guarded;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected literal|guarded)");
}

std::string_view policy_name(Policy p) { return p == Policy::Literal ? "literal" : "guarded"; }

std::size_t DepthClasses::tree_size() const {
  std::size_t total = 0;
  for (const auto& c : classes) total += c.size();
  return total;
}

DepthClasses layer_tree(const RootedForest& f, NodeIndex root, std::uint64_t k) {
  if (!f.is_root(root)) throw DominateError("layer_tree: node is not a root");
  DepthClasses out;
  out.root = root;
  out.classes.resize(k + 1);
  // Depths within the tree: walk to the root, memoising along the way.
  std::map<NodeIndex, std::size_t> depth{{root, 0}};
  std::vector<NodeIndex> path;
  for (NodeIndex v : f.members(root)) {
    NodeIndex w = v;
    while (!depth.count(w)) {
      path.push_back(w);
      w = *f.parent(w);
    }
    std::size_t d = depth[w];
    while (!path.empty()) {
      depth[path.back()] = ++d;
      path.pop_back();
    }
  }
  for (const auto& [v, d] : depth) out.classes[d % (k + 1)].push_back(v);
  return out;
}

ClassChoice select_literal(const DepthClasses& classes) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < classes.classes.size(); ++l) {
    if (classes.classes[l].size() < classes.classes[best].size()) best = l;
  }
  return ClassChoice{best, false, classes.classes[best]};
}

bool dominates_tree(const Graph& g, const RootedForest& f, NodeIndex root,
                    const std::vector<NodeIndex>& sources, std::uint64_t k) {
  std::map<NodeIndex, std::uint64_t> dist;
  std::deque<NodeIndex> queue;
  for (NodeIndex s : sources) {
    if (f.root_of(s) != root) throw DominateError("dominates_tree: source outside the tree");
    if (dist.emplace(s, 0).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    NodeIndex v = queue.front();
    queue.pop_front();
    if (dist[v] == k) continue;
    for (NodeIndex w : g.neighbors(v)) {
      if (f.root_of(w) != root || dist.count(w)) continue;
      dist[w] = dist[v] + 1;
      queue.push_back(w);
    }
  }
  return dist.size() == f.members(root).size();
}

ClassChoice select_guarded(const Graph& g, const DepthClasses& classes, const RootedForest& f,
                           std::uint64_t k) {
  // Candidates ordered by (size, ell, augmented).
  std::tuple<std::size_t, std::size_t, bool> best{classes.classes[0].size(), 0, false};
  for (std::size_t l = 1; l < classes.classes.size(); ++l) {
    const auto& c = classes.classes[l];
    std::tuple<std::size_t, std::size_t, bool> plain{c.size(), l, false};
    if (plain < best && !c.empty() && dominates_tree(g, f, classes.root, c, k)) best = plain;
    std::tuple<std::size_t, std::size_t, bool> augmented{c.size() + 1, l, true};
    if (augmented < best) best = augmented;
  }
  auto [size, ell, aug] = best;
  ClassChoice out{ell, aug, classes.classes[ell]};
  if (aug) out.nodes.insert(std::lower_bound(out.nodes.begin(), out.nodes.end(), classes.root), classes.root);
  return out;
}

DominatingSet build_dominating_set(const Graph& g, const RootedForest& f, std::uint64_t k, Policy policy) {
  DominatingSet out;
  for (NodeIndex root : f.roots()) {
    auto classes = layer_tree(f, root, k);
    const std::size_t n_u = classes.tree_size();
    if (n_u < k + 1) {
      throw DominateError("tree rooted at " + std::to_string(g.id(root)) + " has " + std::to_string(n_u) +
                          " nodes, fewer than k+1");
    }
    ClassChoice choice = policy == Policy::Literal ? select_literal(classes) : select_guarded(g, classes, f, k);
    out.members.insert(out.members.end(), choice.nodes.begin(), choice.nodes.end());
    out.per_tree[root] = TreeChoice{choice.ell, choice.augmented, choice.nodes.size(), n_u};
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

}  // namespace kdom
