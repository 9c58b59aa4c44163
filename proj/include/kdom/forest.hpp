// forest.hpp - meta-nodes as rooted trees embedded in the graph.
//
// A RootedForest keeps explicit parent pointers (every tree edge is a graph
// edge), so merges go through re-rooting rather than union-find links.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kdom/graph.hpp"

namespace kdom {

class ForestError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class RootedForest {
 public:
  RootedForest() = default;
  // Every node a singleton tree.
  explicit RootedForest(std::size_t n);

  std::size_t node_count() const noexcept { return parent_.size(); }
  std::optional<NodeIndex> parent(NodeIndex v) const {
    NodeIndex p = parent_.at(v);
    return p == kNoNode ? std::nullopt : std::optional<NodeIndex>(p);
  }
  NodeIndex root_of(NodeIndex v) const { return root_of_.at(v); }
  bool is_root(NodeIndex v) const { return parent_.at(v) == kNoNode; }
  const std::vector<NodeIndex>& members(NodeIndex root) const;
  std::vector<NodeIndex> roots() const;
  std::size_t tree_count() const;
  const std::vector<NodeIndex>& parents() const noexcept { return parent_; }
  const std::vector<NodeIndex>& roots_by_node() const noexcept { return root_of_; }

  // Reverses parent pointers along the path root_of(u) -> u; u becomes the
  // root and the tree keeps u's identity from then on.
  void reroot(NodeIndex u);

  // Hangs the tree rooted at `root` under node `onto` (in another tree).
  void attach(NodeIndex root, NodeIndex onto);

  std::size_t tree_height(NodeIndex root) const;
  // Heights of all trees, keyed by root.
  std::map<NodeIndex, std::size_t> tree_heights() const;
  // Depth of every node below its root.
  std::vector<std::size_t> depths() const;

  // Throws ForestError if any structural invariant fails against g.
  void validate(const Graph& g) const;

  // "v parent root" per line, NONE as "-".
  std::string dump(const Graph& g) const;

  // Rebuilds a forest from parent pointers (kNoNode marks roots).
  static RootedForest from_parents(const std::vector<NodeIndex>& parents);

  // Same trees with the same parent pointers; member order is irrelevant.
  friend bool operator==(const RootedForest& a, const RootedForest& b) {
    return a.parent_ == b.parent_ && a.root_of_ == b.root_of_;
  }

 private:
  std::vector<NodeIndex> parent_;
  std::vector<NodeIndex> root_of_;
  std::vector<std::vector<NodeIndex>> members_;  // indexed by root; empty otherwise
};

enum class MetaStatus { Active, Inactive, Isolated };
std::string_view meta_status_name(MetaStatus s);

struct MetaNode {
  NodeIndex id = kNoNode;  // root index of the tree
  MetaStatus status = MetaStatus::Active;
  std::size_t height = 0;
};

// Preferred graph edge realizing a meta-edge, oriented tail tree -> head tree.
struct OrientedEdge {
  NodeIndex u = kNoNode;
  NodeIndex v = kNoNode;
  friend auto operator<=>(const OrientedEdge&, const OrientedEdge&) = default;
};

// Directed phase graph over meta-nodes. Out-degree is at most one.
class MetaGraph {
 public:
  int phase = 0;
  std::map<NodeIndex, MetaNode> nodes;

  void add_edge(NodeIndex from, NodeIndex to, OrientedEdge preferred);
  void remove_edge(NodeIndex from, NodeIndex to);
  void remove_edges_of(NodeIndex x);
  void clear_edges();

  std::optional<NodeIndex> downstream(NodeIndex x) const;
  const std::set<NodeIndex>& upstream(NodeIndex x) const;
  bool has_edge(NodeIndex from, NodeIndex to) const;
  // Distinct meta-neighbors, ascending.
  std::vector<NodeIndex> neighbors(NodeIndex x) const;
  bool isolated(NodeIndex x) const { return !downstream(x) && upstream(x).empty(); }
  std::vector<std::pair<NodeIndex, NodeIndex>> edge_list() const;
  std::size_t edge_count() const noexcept { return down_.size(); }

  // Graph edge (a, b) with a in src's tree and b in partner's tree: the
  // src->partner preferred edge if one was recorded this phase, else the
  // partner->src one reversed.
  std::optional<OrientedEdge> preferred_between(NodeIndex src, NodeIndex partner) const;
  const std::map<std::pair<NodeIndex, NodeIndex>, OrientedEdge>& preferred() const noexcept {
    return preferred_;
  }
  void clear_preferred() { preferred_.clear(); }
  // Drops the preferred edge of an eliminated meta-edge.
  void forget_preferred(NodeIndex from, NodeIndex to) { preferred_.erase({from, to}); }

 private:
  std::map<NodeIndex, NodeIndex> down_;
  std::map<NodeIndex, std::set<NodeIndex>> up_;
  std::map<std::pair<NodeIndex, NodeIndex>, OrientedEdge> preferred_;
};

struct MergeRecord {
  NodeIndex src;      // meta-node absorbed
  NodeIndex into;     // surviving meta-node
  NodeIndex partner;  // meta-node whose preferred edge was used
  OrientedEdge edge;
};

std::pair<RootedForest, MetaGraph> init_g0(const Graph& g);

// Combines src into dst through the preferred edge between src and
// `through` (defaults to dst). `through` must already belong to dst's tree.
// src's tree is re-rooted at its endpoint and hung under the other one.
MergeRecord merge(MetaGraph& mg, RootedForest& f, NodeIndex src, NodeIndex dst,
                  std::optional<NodeIndex> through = std::nullopt);

}  // namespace kdom
