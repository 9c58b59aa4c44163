// graph.hpp - undirected graph model, edge-list I/O, generators and BFS.
//
// Nodes carry a distinct nonnegative 64-bit identifier. Internally every node
// is addressed by a dense index; indices are assigned in ascending identifier
// order, so "ascending index" and "ascending id" are the same ordering.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kdom {

using NodeId = std::uint64_t;
using NodeIndex = std::uint32_t;

inline constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();
inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
// Identifiers must leave room for the +1 label shift and a virtual successor.
inline constexpr NodeId kMaxNodeId = (NodeId{1} << 63) - 1;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Edge between two node indices, stored with u < v.
struct Edge {
  NodeIndex u;
  NodeIndex v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Graph {
 public:
  Graph() = default;

  // Validates: ids distinct and <= kMaxNodeId, endpoints known, no self-loops,
  // no duplicate edges. Connectivity is NOT required here (see is_connected).
  static Graph from_edges(std::vector<NodeId> ids,
                          const std::vector<std::pair<NodeId, NodeId>>& edges);

  // Dense graph on ids 0..n-1.
  static Graph from_index_edges(std::size_t n, const std::vector<std::pair<NodeIndex, NodeIndex>>& edges);

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  NodeId id(NodeIndex v) const { return ids_.at(v); }
  const std::vector<NodeId>& ids() const noexcept { return ids_; }
  std::optional<NodeIndex> index_of(NodeId id) const;
  NodeId max_id() const noexcept { return ids_.empty() ? 0 : ids_.back(); }
  // True when the ids are exactly 0..n-1.
  bool dense_ids() const noexcept;

  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {adjacency_.data() + offsets_.at(v), adjacency_.data() + offsets_.at(v + 1)};
  }
  std::size_t degree(NodeIndex v) const { return offsets_.at(v + 1) - offsets_.at(v); }
  bool has_edge(NodeIndex a, NodeIndex b) const;

  // Sorted ascending.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool is_connected() const;

 private:
  std::vector<NodeId> ids_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> adjacency_;
  std::vector<Edge> edges_;
};

// Edge-list text: header "n m" (ids must lie in 0..n-1) or "n m sparse"
// (exactly n distinct arbitrary ids); then m lines "u v". Lines whose first
// non-blank character is '#' are ignored, as are blank lines.
Graph parse_graph(std::string_view text);
std::string write_edge_list(const Graph& g);

enum class GraphKind { Path, Cycle, Star, BalancedTree, GnmConnected, Grid };

struct GenParams {
  std::size_t n = 0;
  std::size_t m = 0;       // gnm-connected only
  std::size_t arity = 2;   // balanced-tree only
  std::size_t rows = 0;    // grid only
  std::size_t cols = 0;    // grid only
};

GraphKind parse_graph_kind(std::string_view name);
std::string_view graph_kind_name(GraphKind kind);

// Ids 0..n-1. Deterministic in (kind, params, seed) across platforms.
Graph generate(GraphKind kind, const GenParams& params, std::uint64_t seed = 0);

// Multi-source hop distances; kUnreached for nodes in other components.
std::vector<std::uint32_t> bfs_distances(const Graph& g, std::span<const NodeIndex> sources);

}  // namespace kdom
