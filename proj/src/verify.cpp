#include "kdom/verify.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <sstream>

#include "kdom/chain.hpp"

namespace kdom {

DominationCheck verify_domination(const Graph& g, std::span<const NodeIndex> d, std::uint64_t k) {
  DominationCheck out;
  if (g.node_count() == 0) {
    out.dominates = true;
    out.distance = 0;
    return out;
  }
  if (d.empty()) {
    out.farthest = 0;
    return out;
  }
  auto dist = bfs_distances(g, d);
  out.farthest = 0;
  out.distance = dist[0];
  for (std::size_t v = 1; v < dist.size(); ++v) {
    // kUnreached is the maximum value, so a cut-off node always wins.
    if (dist[v] > out.distance) {
      out.distance = dist[v];
      out.farthest = static_cast<NodeIndex>(v);
    }
  }
  out.dominates = out.distance != kUnreached && out.distance <= k;
  return out;
}

bool verify_size_bound(std::size_t d_size, std::size_t n, std::uint64_t k) { return d_size <= n / (k + 1); }

ForestReport verify_forest(const Graph& g, const PhaseTrace& trace, const RootedForest& f, std::uint64_t k,
                           double height_ratio_limit) {
  ForestReport rep;
  const std::size_t n = g.node_count();
  auto fail = [&](const std::string& what) {
    rep.ok = false;
    rep.failures.push_back(what);
  };
  auto sizes_of = [&](const std::vector<NodeIndex>& root_of) {
    std::map<NodeIndex, std::size_t> sizes;
    for (NodeIndex r : root_of) ++sizes[r];
    return sizes;
  };

  for (std::size_t idx = 0; idx < trace.phase_starts.size(); ++idx) {
    const PhaseStart& ps = trace.phase_starts[idx];
    const std::string where = "phase " + std::to_string(ps.phase);
    if (ps.root_of.size() != n) {
      fail(where + ": root map covers " + std::to_string(ps.root_of.size()) + " of " + std::to_string(n) + " nodes");
      continue;
    }
    // Exact partition: every node maps to a root that maps to itself.
    for (std::size_t v = 0; v < n; ++v) {
      const NodeIndex r = ps.root_of[v];
      if (r >= n || ps.root_of[r] != r) {
        fail(where + ": node " + std::to_string(g.id(static_cast<NodeIndex>(v))) + " maps to a non-root");
        break;
      }
    }
    const auto sizes = sizes_of(ps.root_of);
    std::size_t min_size = n;
    for (const auto& [r, s] : sizes) {
      min_size = std::min(min_size, s);
      const std::size_t need = std::size_t{1} << std::min(ps.phase, 62);
      if (s < need) {
        fail(where + ": tree " + std::to_string(g.id(r)) + " has " + std::to_string(s) + " < " +
             std::to_string(need) + " nodes");
      }
    }
    std::size_t max_h = 0;
    for (const auto& [r, h] : ps.heights) max_h = std::max(max_h, h);
    rep.min_size.push_back(min_size);
    rep.max_height.push_back(max_h);

    // Every tree of the next meta-graph is an inactive tree of this one or
    // combines at least two of its trees.
    if (idx + 1 < trace.phase_starts.size()) {
      const PhaseStart& next = trace.phase_starts[idx + 1];
      if (next.root_of.size() != n) continue;
      std::map<NodeIndex, std::set<NodeIndex>> parts;
      for (std::size_t v = 0; v < n; ++v) parts[next.root_of[v]].insert(ps.root_of[v]);
      for (const auto& [r, olds] : parts) {
        std::size_t covered = 0;
        for (NodeIndex o : olds) covered += sizes.at(o);
        if (covered != sizes_of(next.root_of).at(r)) {
          fail(where + ": tree " + std::to_string(g.id(r)) + " of the next phase splits an earlier tree");
          continue;
        }
        if (olds.size() >= 2) continue;
        const NodeIndex o = *olds.begin();
        auto st = ps.statuses.find(o);
        if (st == ps.statuses.end() || st->second != MetaStatus::Inactive) {
          fail(where + ": meta-node " + std::to_string(g.id(o)) + " survived without merging while active");
        }
      }
    }
  }

  if (f.node_count() != n) {
    fail("final forest size differs from the graph");
    return rep;
  }
  if (!trace.phase_starts.empty() && trace.phase_starts.back().root_of != f.roots_by_node()) {
    fail("final forest differs from the last recorded meta-graph");
  }
  auto final_sizes = sizes_of(f.roots_by_node());
  rep.final_min_size = n;
  for (const auto& [r, s] : final_sizes) {
    rep.final_min_size = std::min(rep.final_min_size, s);
    if (s < k + 1) {
      fail("final tree " + std::to_string(g.id(r)) + " has " + std::to_string(s) + " < k+1 nodes");
    }
  }
  for (const auto& [r, h] : f.tree_heights()) rep.final_max_height = std::max(rep.final_max_height, h);
  rep.height_ratio = static_cast<double>(rep.final_max_height) / static_cast<double>(k + 1);
  rep.height_within = rep.height_ratio <= height_ratio_limit;
  return rep;
}

OptimumResult brute_force_min_kdom(const Graph& g, std::uint64_t k, std::size_t cap) {
  const std::size_t n = g.node_count();
  if (n > cap || n > 31) {
    throw std::invalid_argument("brute force limited to " + std::to_string(std::min<std::size_t>(cap, 31)) +
                                " nodes, graph has " + std::to_string(n));
  }
  if (n == 0) return {};
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const NodeIndex src = static_cast<NodeIndex>(v);
    auto dist = bfs_distances(g, std::span<const NodeIndex>(&src, 1));
    for (std::size_t w = 0; w < n; ++w) {
      if (dist[w] != kUnreached && dist[w] <= k) ball[v] |= std::uint32_t{1} << w;
    }
  }
  const std::uint32_t full = n == 32 ? ~0U : (std::uint32_t{1} << n) - 1;
  for (std::size_t size = 1; size <= n; ++size) {
    // Subsets of exactly `size` bits in increasing numeric order (Gosper).
    std::uint32_t set = (std::uint32_t{1} << size) - 1;
    while (set <= full) {
      std::uint32_t covered = 0;
      for (std::uint32_t rest = set; rest; rest &= rest - 1) covered |= ball[std::countr_zero(rest)];
      if (covered == full) {
        OptimumResult out{size, {}};
        for (std::uint32_t rest = set; rest; rest &= rest - 1) {
          out.witness.push_back(static_cast<NodeIndex>(std::countr_zero(rest)));
        }
        return out;
      }
      const std::uint32_t low = set & (~set + 1);
      const std::uint32_t ripple = set + low;
      if (ripple == 0) break;
      set = (((ripple ^ set) >> 2) / low) | ripple;
    }
  }
  throw std::logic_error("no dominating set found; graph disconnected?");
}

int log_star_n(std::size_t n) { return log_star(static_cast<double>(n)); }

BoundsCheck check_bounds(const RunMetrics& metrics, std::size_t n, std::size_t m, std::uint64_t k, double c_t,
                         double c_m) {
  BoundsCheck out;
  const double ls = log_star_n(n) + 1.0;
  const double phases = num_phases(k);
  const double time_unit = static_cast<double>(k + 1) * ls;
  const double msg_unit = static_cast<double>(m) * phases + static_cast<double>(n) * phases * ls;
  out.time_bound = c_t * time_unit;
  out.message_bound = c_m * msg_unit;
  out.time_ratio = static_cast<double>(metrics.pulses) / time_unit;
  out.message_ratio = msg_unit > 0 ? static_cast<double>(metrics.messages) / msg_unit : 0.0;
  out.time_ok = static_cast<double>(metrics.pulses) <= out.time_bound;
  out.messages_ok = static_cast<double>(metrics.messages) <= out.message_bound;
  return out;
}

Comparison compare_runs(const RootedForest& central_forest, const DominatingSet& central_set,
                        const RootedForest& dist_forest, const DominatingSet& dist_set) {
  Comparison out;
  const auto& a = central_forest.roots_by_node();
  const auto& b = dist_forest.roots_by_node();
  out.forest_equal = a == b;
  if (!out.forest_equal) {
    for (std::size_t v = 0; v < std::min(a.size(), b.size()); ++v) {
      if (a[v] != b[v]) {
        out.first_difference = static_cast<NodeIndex>(v);
        break;
      }
    }
    if (!out.first_difference) out.first_difference = static_cast<NodeIndex>(std::min(a.size(), b.size()));
    out.detail = "forest mismatch";
  }
  out.set_equal = central_set.members == dist_set.members;
  if (!out.set_equal && out.detail.empty()) out.detail = "dominating set mismatch";
  out.equal = out.forest_equal && out.set_equal;
  return out;
}

std::optional<std::string> compare_lockstep(const Graph& g, const PhaseTrace& central,
                                            const std::vector<DistSnapshot>& dist) {
  std::map<std::pair<int, std::string>, const StepSnapshot*> by_name;
  for (const auto& s : central.steps) by_name[{s.phase, s.step}] = &s;
  std::set<std::pair<int, std::string>> seen;
  for (const auto& d : dist) {
    auto it = by_name.find({d.phase, d.step});
    if (it == by_name.end() && d.step.rfind("2e.", 0) == 0) it = by_name.find({d.phase, "end"});
    if (it == by_name.end()) {
      return "phase " + std::to_string(d.phase) + " step " + d.step + ": no central counterpart";
    }
    seen.insert(it->first);
    const StepSnapshot& c = *it->second;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      if (c.root_of.at(v) != d.root_of.at(v) || c.parent.at(v) != d.parent.at(v)) {
        std::ostringstream msg;
        msg << "phase " << d.phase << " step " << d.step << ": node " << g.id(static_cast<NodeIndex>(v))
            << " differs (central root " << g.id(c.root_of[v]) << ", distributed root " << g.id(d.root_of[v])
            << ")";
        return msg.str();
      }
    }
  }
  for (const auto& [key, snap] : by_name) {
    if (!seen.count(key)) {
      return "phase " + std::to_string(key.first) + " step " + key.second + ": missing from the distributed run";
    }
  }
  return std::nullopt;
}

}  // namespace kdom
