#include "kdom/forest.hpp"

#include <algorithm>
#include <sstream>

namespace kdom {

namespace {
const std::set<NodeIndex> kEmptySet;
}

RootedForest::RootedForest(std::size_t n) : parent_(n, kNoNode), root_of_(n), members_(n) {
  for (std::size_t v = 0; v < n; ++v) {
    root_of_[v] = static_cast<NodeIndex>(v);
    members_[v] = {static_cast<NodeIndex>(v)};
  }
}

const std::vector<NodeIndex>& RootedForest::members(NodeIndex root) const {
  if (!is_root(root)) throw ForestError("members(): node " + std::to_string(root) + " is not a root");
  return members_[root];
}

std::vector<NodeIndex> RootedForest::roots() const {
  std::vector<NodeIndex> out;
  for (std::size_t v = 0; v < parent_.size(); ++v)
    if (parent_[v] == kNoNode) out.push_back(static_cast<NodeIndex>(v));
  return out;
}

std::size_t RootedForest::tree_count() const {
  return static_cast<std::size_t>(std::count(parent_.begin(), parent_.end(), kNoNode));
}

void RootedForest::reroot(NodeIndex u) {
  const NodeIndex old_root = root_of_.at(u);
  if (old_root == u) return;
  NodeIndex prev = kNoNode;
  NodeIndex cur = u;
  while (cur != kNoNode) {
    NodeIndex next = parent_[cur];
    parent_[cur] = prev;
    prev = cur;
    cur = next;
  }
  members_[u] = std::move(members_[old_root]);
  members_[old_root].clear();
  for (NodeIndex w : members_[u]) root_of_[w] = u;
}

void RootedForest::attach(NodeIndex root, NodeIndex onto) {
  if (!is_root(root)) throw ForestError("attach(): node " + std::to_string(root) + " is not a root");
  const NodeIndex target = root_of_.at(onto);
  if (target == root) throw ForestError("attach(): cannot hang a tree under itself");
  parent_[root] = onto;
  auto& dst = members_[target];
  for (NodeIndex w : members_[root]) {
    root_of_[w] = target;
    dst.push_back(w);
  }
  members_[root].clear();
}

RootedForest RootedForest::from_parents(const std::vector<NodeIndex>& parents) {
  const std::size_t n = parents.size();
  RootedForest f;
  f.parent_ = parents;
  f.root_of_.assign(n, kNoNode);
  f.members_.assign(n, {});
  for (std::size_t s = 0; s < n; ++s) {
    NodeIndex w = static_cast<NodeIndex>(s);
    std::size_t steps = 0;
    while (f.parent_[w] != kNoNode) {
      w = f.parent_[w];
      if (w >= n || ++steps > n) throw ForestError("from_parents(): parent relation is not a forest");
    }
    f.root_of_[s] = w;
    f.members_[w].push_back(static_cast<NodeIndex>(s));
  }
  return f;
}

std::vector<std::size_t> RootedForest::depths() const {
  const std::size_t n = parent_.size();
  std::vector<std::size_t> depth(n, 0);
  std::vector<char> known(n, 0);
  std::vector<NodeIndex> stack;
  for (std::size_t s = 0; s < n; ++s) {
    NodeIndex v = static_cast<NodeIndex>(s);
    while (!known[v] && parent_[v] != kNoNode) {
      stack.push_back(v);
      v = parent_[v];
    }
    std::size_t d = known[v] ? depth[v] : 0;
    known[v] = 1;
    depth[v] = d;
    while (!stack.empty()) {
      NodeIndex w = stack.back();
      stack.pop_back();
      depth[w] = ++d;
      known[w] = 1;
    }
  }
  return depth;
}

std::size_t RootedForest::tree_height(NodeIndex root) const {
  if (!is_root(root)) throw ForestError("tree_height(): node " + std::to_string(root) + " is not a root");
  std::size_t best = 0;
  for (NodeIndex v : members_[root]) {
    std::size_t d = 0;
    for (NodeIndex w = v; parent_[w] != kNoNode; w = parent_[w]) ++d;
    best = std::max(best, d);
  }
  return best;
}

std::map<NodeIndex, std::size_t> RootedForest::tree_heights() const {
  auto depth = depths();
  std::map<NodeIndex, std::size_t> out;
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    auto& h = out[root_of_[v]];
    h = std::max(h, depth[v]);
  }
  return out;
}

void RootedForest::validate(const Graph& g) const {
  const std::size_t n = parent_.size();
  if (g.node_count() != n) throw ForestError("forest size differs from graph size");
  std::vector<char> seen(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    NodeIndex v = static_cast<NodeIndex>(s);
    std::size_t steps = 0;
    NodeIndex w = v;
    while (parent_[w] != kNoNode) {
      if (!g.has_edge(w, parent_[w])) {
        throw ForestError("tree edge (" + std::to_string(g.id(w)) + "," + std::to_string(g.id(parent_[w])) +
                          ") is not a graph edge");
      }
      w = parent_[w];
      if (++steps > n) throw ForestError("parent relation has a cycle");
    }
    if (root_of_[v] != w) throw ForestError("root_of(" + std::to_string(g.id(v)) + ") is stale");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (parent_[r] != kNoNode) {
      if (!members_[r].empty()) throw ForestError("non-root holds a member list");
      continue;
    }
    for (NodeIndex w : members_[r]) {
      if (root_of_[w] != r || seen[w]) throw ForestError("member lists do not partition the nodes");
      seen[w] = 1;
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != static_cast<std::ptrdiff_t>(n)) {
    throw ForestError("member lists do not cover every node");
  }
}

std::string RootedForest::dump(const Graph& g) const {
  std::ostringstream out;
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    out << g.id(static_cast<NodeIndex>(v)) << ' ';
    if (parent_[v] == kNoNode) out << '-';
    else out << g.id(parent_[v]);
    out << ' ' << g.id(root_of_[v]) << '\n';
  }
  return out.str();
}

std::string_view meta_status_name(MetaStatus s) {
  switch (s) {
    case MetaStatus::Active: return "active";
    case MetaStatus::Inactive: return "inactive";
    case MetaStatus::Isolated: return "isolated";
  }
  return "?";
}

void MetaGraph::add_edge(NodeIndex from, NodeIndex to, OrientedEdge preferred) {
  if (from == to) throw ForestError("meta-edge must join distinct meta-nodes");
  if (down_.count(from)) throw ForestError("meta-node already has a downstream neighbor");
  down_[from] = to;
  up_[to].insert(from);
  preferred_[{from, to}] = preferred;
}

void MetaGraph::remove_edge(NodeIndex from, NodeIndex to) {
  auto it = down_.find(from);
  if (it == down_.end() || it->second != to) return;
  down_.erase(it);
  auto& ups = up_[to];
  ups.erase(from);
  if (ups.empty()) up_.erase(to);
}

void MetaGraph::remove_edges_of(NodeIndex x) {
  if (auto d = downstream(x)) remove_edge(x, *d);
  auto ups = upstream(x);
  for (NodeIndex y : ups) remove_edge(y, x);
}

void MetaGraph::clear_edges() {
  down_.clear();
  up_.clear();
}

std::optional<NodeIndex> MetaGraph::downstream(NodeIndex x) const {
  auto it = down_.find(x);
  if (it == down_.end()) return std::nullopt;
  return it->second;
}

const std::set<NodeIndex>& MetaGraph::upstream(NodeIndex x) const {
  auto it = up_.find(x);
  return it == up_.end() ? kEmptySet : it->second;
}

bool MetaGraph::has_edge(NodeIndex from, NodeIndex to) const {
  auto it = down_.find(from);
  return it != down_.end() && it->second == to;
}

std::vector<NodeIndex> MetaGraph::neighbors(NodeIndex x) const {
  std::vector<NodeIndex> out(upstream(x).begin(), upstream(x).end());
  if (auto d = downstream(x)) {
    if (!upstream(x).count(*d)) {
      out.insert(std::lower_bound(out.begin(), out.end(), *d), *d);
    }
  }
  return out;
}

std::vector<std::pair<NodeIndex, NodeIndex>> MetaGraph::edge_list() const {
  return {down_.begin(), down_.end()};
}

std::optional<OrientedEdge> MetaGraph::preferred_between(NodeIndex src, NodeIndex partner) const {
  if (auto it = preferred_.find({src, partner}); it != preferred_.end()) return it->second;
  if (auto it = preferred_.find({partner, src}); it != preferred_.end()) {
    return OrientedEdge{it->second.v, it->second.u};
  }
  return std::nullopt;
}

std::pair<RootedForest, MetaGraph> init_g0(const Graph& g) {
  RootedForest f(g.node_count());
  MetaGraph mg;
  mg.phase = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto id = static_cast<NodeIndex>(v);
    mg.nodes[id] = MetaNode{id, MetaStatus::Active, 0};
  }
  return {std::move(f), std::move(mg)};
}

MergeRecord merge(MetaGraph& mg, RootedForest& f, NodeIndex src, NodeIndex dst,
                  std::optional<NodeIndex> through) {
  const NodeIndex partner = through.value_or(dst);
  auto edge = mg.preferred_between(src, partner);
  if (!edge) {
    throw ForestError("no preferred edge recorded between meta-nodes " + std::to_string(src) + " and " +
                      std::to_string(partner));
  }
  if (f.root_of(edge->u) != src) throw ForestError("preferred edge tail is not in the source tree");
  if (f.root_of(edge->v) != dst) throw ForestError("preferred edge head is not in the destination tree");
  f.reroot(edge->u);
  f.attach(edge->u, edge->v);
  mg.remove_edges_of(src);
  mg.nodes.erase(src);
  return MergeRecord{src, dst, partner, *edge};
}

}  // namespace kdom
