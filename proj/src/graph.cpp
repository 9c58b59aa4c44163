#include "kdom/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace kdom {

namespace {

// Uniform integer in [0, bound) from a mt19937_64 stream. The standard
// distributions are implementation-defined, which would break the
// cross-platform determinism of generated graphs.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

void build_csr(std::size_t n, std::vector<Edge>& edges, std::vector<std::size_t>& offsets,
               std::vector<NodeIndex>& adjacency) {
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degree[v];
  adjacency.assign(offsets[n], 0);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) {
    adjacency[fill[e.u]++] = e.v;
    adjacency[fill[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              adjacency.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]));
  }
}

}  // namespace

Graph Graph::from_edges(std::vector<NodeId> ids, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw GraphError("duplicate node id");
  }
  if (!ids.empty() && ids.back() > kMaxNodeId) throw GraphError("node id exceeds 2^63-1");
  Graph g;
  g.ids_ = std::move(ids);
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    auto ia = g.index_of(a);
    auto ib = g.index_of(b);
    if (!ia || !ib) throw GraphError("edge endpoint is not a declared node");
    if (*ia == *ib) throw GraphError("self-loop at node " + std::to_string(a));
    list.push_back({std::min(*ia, *ib), std::max(*ia, *ib)});
  }
  std::sort(list.begin(), list.end());
  if (auto dup = std::adjacent_find(list.begin(), list.end()); dup != list.end()) {
    throw GraphError("duplicate edge " + std::to_string(g.ids_[dup->u]) + " " +
                     std::to_string(g.ids_[dup->v]));
  }
  g.edges_ = std::move(list);
  build_csr(g.ids_.size(), g.edges_, g.offsets_, g.adjacency_);
  return g;
}

Graph Graph::from_index_edges(std::size_t n, const std::vector<std::pair<NodeIndex, NodeIndex>>& edges) {
  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  std::vector<std::pair<NodeId, NodeId>> wide(edges.begin(), edges.end());
  return from_edges(std::move(ids), wide);
}

std::optional<NodeIndex> Graph::index_of(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - ids_.begin());
}

bool Graph::dense_ids() const noexcept { return ids_.empty() || ids_.back() + 1 == ids_.size(); }

bool Graph::has_edge(NodeIndex a, NodeIndex b) const {
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool Graph::is_connected() const {
  if (node_count() == 0) return true;
  const NodeIndex src = 0;
  auto dist = bfs_distances(*this, std::span<const NodeIndex>(&src, 1));
  return std::none_of(dist.begin(), dist.end(), [](auto d) { return d == kUnreached; });
}

Graph parse_graph(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  bool sparse = false;
  std::uint64_t n = 0, m = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::set<std::pair<NodeId, NodeId>> seen;
  std::set<NodeId> named;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    auto number = [&](const std::string& tok) {
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line_no, "expected a nonnegative integer, got '" + tok + "'");
      }
      return value;
    };
    if (!have_header) {
      if (tokens.size() == 3 && tokens[2] == "sparse") {
        sparse = true;
      } else if (tokens.size() != 2) {
        throw ParseError(line_no, "malformed header, expected \"n m\"");
      }
      n = number(tokens[0]);
      m = number(tokens[1]);
      have_header = true;
    } else {
      if (tokens.size() != 2) throw ParseError(line_no, "malformed edge line, expected \"u v\"");
      NodeId u = number(tokens[0]);
      NodeId v = number(tokens[1]);
      for (NodeId x : {u, v}) {
        if (!sparse && x >= n) {
          throw ParseError(line_no, "node id " + std::to_string(x) + " outside declared range 0.." +
                                        std::to_string(n == 0 ? 0 : n - 1));
        }
        if (x > kMaxNodeId) throw ParseError(line_no, "node id exceeds 2^63-1");
        if (sparse && !named.count(x) && named.size() == n) {
          throw ParseError(line_no, "more than " + std::to_string(n) + " distinct node ids");
        }
        named.insert(x);
      }
      if (u == v) throw ParseError(line_no, "self-loop at node " + std::to_string(u));
      if (!seen.insert({std::min(u, v), std::max(u, v)}).second) {
        throw ParseError(line_no, "duplicate edge " + std::to_string(u) + " " + std::to_string(v));
      }
      edges.emplace_back(u, v);
    }
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(line_no, "missing \"n m\" header");
  if (edges.size() != m) {
    throw ParseError(line_no, "header declares " + std::to_string(m) + " edges, found " +
                                  std::to_string(edges.size()));
  }
  std::vector<NodeId> ids;
  if (sparse) {
    if (named.size() != n) {
      throw ParseError(line_no, "header declares " + std::to_string(n) + " nodes, edges name " +
                                    std::to_string(named.size()));
    }
    ids.assign(named.begin(), named.end());
  } else {
    ids.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) ids[i] = i;
  }
  return Graph::from_edges(std::move(ids), edges);
}

std::string write_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.node_count() << ' ' << g.edge_count();
  if (!g.dense_ids()) out << " sparse";
  out << '\n';
  for (const auto& e : g.edges()) out << g.id(e.u) << ' ' << g.id(e.v) << '\n';
  return out.str();
}

GraphKind parse_graph_kind(std::string_view name) {
  if (name == "path") return GraphKind::Path;
  if (name == "cycle") return GraphKind::Cycle;
  if (name == "star") return GraphKind::Star;
  if (name == "balanced-tree") return GraphKind::BalancedTree;
  if (name == "gnm-connected") return GraphKind::GnmConnected;
  if (name == "grid") return GraphKind::Grid;
  throw GraphError("unknown graph kind '" + std::string(name) + "'");
}

std::string_view graph_kind_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::Path: return "path";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::Star: return "star";
    case GraphKind::BalancedTree: return "balanced-tree";
    case GraphKind::GnmConnected: return "gnm-connected";
    case GraphKind::Grid: return "grid";
  }
  return "?";
}

Graph generate(GraphKind kind, const GenParams& params, std::uint64_t seed) {
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  std::size_t n = params.n;
  switch (kind) {
    case GraphKind::Path:
      if (n < 1) throw GraphError("path requires n >= 1");
      for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphKind::Cycle:
      if (n < 3) throw GraphError("cycle requires n >= 3");
      for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case GraphKind::Star:
      if (n < 1) throw GraphError("star requires n >= 1");
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case GraphKind::BalancedTree:
      if (n < 1) throw GraphError("balanced-tree requires n >= 1");
      if (params.arity < 1) throw GraphError("balanced-tree requires arity >= 1");
      for (std::size_t i = 1; i < n; ++i) edges.emplace_back((i - 1) / params.arity, i);
      break;
    case GraphKind::Grid: {
      if (params.rows < 1 || params.cols < 1) throw GraphError("grid requires rows, cols >= 1");
      n = params.rows * params.cols;
      for (std::size_t r = 0; r < params.rows; ++r) {
        for (std::size_t c = 0; c < params.cols; ++c) {
          std::size_t v = r * params.cols + c;
          if (c + 1 < params.cols) edges.emplace_back(v, v + 1);
          if (r + 1 < params.rows) edges.emplace_back(v, v + params.cols);
        }
      }
      break;
    }
    case GraphKind::GnmConnected: {
      const std::size_t m = params.m;
      if (n < 1) throw GraphError("gnm-connected requires n >= 1");
      const std::uint64_t max_edges = static_cast<std::uint64_t>(n) * (n - 1) / 2;
      if (m + 1 < n) throw GraphError("gnm-connected requires m >= n-1");
      if (m > max_edges) throw GraphError("gnm-connected requires m <= n(n-1)/2");
      std::mt19937_64 rng(seed);
      // Uniform labeled spanning tree from a random Pruefer sequence.
      if (n == 2) {
        edges.emplace_back(0, 1);
      } else if (n > 2) {
        std::vector<NodeIndex> code(n - 2);
        for (auto& c : code) c = static_cast<NodeIndex>(uniform_below(rng, n));
        std::vector<std::size_t> degree(n, 1);
        for (auto c : code) ++degree[c];
        std::set<NodeIndex> leaves;
        for (std::size_t v = 0; v < n; ++v)
          if (degree[v] == 1) leaves.insert(static_cast<NodeIndex>(v));
        for (auto c : code) {
          NodeIndex leaf = *leaves.begin();
          leaves.erase(leaves.begin());
          edges.emplace_back(leaf, c);
          if (--degree[c] == 1) leaves.insert(c);
        }
        NodeIndex a = *leaves.begin();
        NodeIndex b = *std::next(leaves.begin());
        edges.emplace_back(a, b);
      }
      std::set<std::pair<NodeIndex, NodeIndex>> present;
      for (auto [a, b] : edges) present.insert({std::min(a, b), std::max(a, b)});
      std::size_t extra = m - edges.size();
      if (extra > 0 && extra * 2 > max_edges - present.size()) {
        // Dense request: shuffle the complement and take a prefix.
        std::vector<std::pair<NodeIndex, NodeIndex>> complement;
        for (NodeIndex a = 0; a < n; ++a)
          for (NodeIndex b = a + 1; b < n; ++b)
            if (!present.count({a, b})) complement.emplace_back(a, b);
        for (std::size_t i = 0; i < extra; ++i) {
          std::size_t j = i + uniform_below(rng, complement.size() - i);
          std::swap(complement[i], complement[j]);
          edges.push_back(complement[i]);
        }
      } else {
        while (extra > 0) {
          auto a = static_cast<NodeIndex>(uniform_below(rng, n));
          auto b = static_cast<NodeIndex>(uniform_below(rng, n));
          if (a == b) continue;
          if (a > b) std::swap(a, b);
          if (!present.insert({a, b}).second) continue;
          edges.emplace_back(a, b);
          --extra;
        }
      }
      break;
    }
  }
  return Graph::from_index_edges(n, edges);
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, std::span<const NodeIndex> sources) {
  if (sources.empty()) throw GraphError("bfs_distances requires a nonempty source set");
  std::vector<std::uint32_t> dist(g.node_count(), kUnreached);
  std::deque<NodeIndex> queue;
  for (NodeIndex s : sources) {
    if (s >= g.node_count()) throw GraphError("bfs source is not a node of the graph");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex w : g.neighbors(v)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace kdom
