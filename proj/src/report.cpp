#include "kdom/report.hpp"

#include <sstream>

namespace kdom {

using nlohmann::json;

json dominating_set_json(const Graph& g, const DominatingSet& d) {
  json out = json::array();
  for (NodeIndex v : d.members) out.push_back(g.id(v));
  return out;
}

json per_tree_json(const Graph& g, const DominatingSet& d) {
  json out = json::array();
  for (const auto& [root, c] : d.per_tree) {
    out.push_back({{"root", g.id(root)},
                   {"class", c.ell},
                   {"augmented", c.augmented},
                   {"size", c.size},
                   {"tree_size", c.tree_size}});
  }
  return out;
}

json metrics_json(const RunMetrics& m) {
  json per = json::object();
  for (const auto& [tag, c] : m.per_phase) {
    per[tag] = {{"pulses", c.pulses}, {"messages", c.messages}, {"words", c.words}};
  }
  return {{"pulses", m.pulses}, {"messages", m.messages}, {"words", m.words}, {"per_phase", per}};
}

json domination_json(const Graph& g, const DominationCheck& c) {
  json out{{"dominates", c.dominates}};
  if (c.farthest != kNoNode) {
    out["farthest"] = {{"node", g.id(c.farthest)},
                       {"distance", c.distance == kUnreached ? json(nullptr) : json(c.distance)}};
  }
  return out;
}

json forest_json(const ForestReport& r) {
  return {{"ok", r.ok},
          {"failures", r.failures},
          {"min_tree_size_per_phase", r.min_size},
          {"max_height_per_phase", r.max_height},
          {"final_min_tree_size", r.final_min_size},
          {"final_max_height", r.final_max_height},
          {"height_ratio", r.height_ratio},
          {"height_ratio_limit", kHeightRatio},
          {"height_within_limit", r.height_within}};
}

json make_report(const Graph& g, const ReportInput& in) {
  json report;
  report["config"] = {{"graph", in.graph_source},
                      {"n", g.node_count()},
                      {"m", g.edge_count()},
                      {"k", in.k},
                      {"mode", in.mode},
                      {"policy", std::string(policy_name(in.policy))},
                      {"seed", in.seed}};
  const std::size_t size = in.set ? in.set->members.size() : 0;
  report["dominating_set"] = in.set ? dominating_set_json(g, *in.set) : json::array();
  report["per_tree"] = in.set ? per_tree_json(g, *in.set) : json::array();
  report["metrics"] = in.metrics ? metrics_json(*in.metrics) : json(nullptr);

  json v;
  v["domination"] = domination_json(g, in.domination);
  const std::size_t bound = g.node_count() / (in.k + 1);
  const std::size_t trees = in.set ? in.set->per_tree.size() : 0;
  v["size"] = {{"size", size},
               {"bound", bound},
               {"within_bound", verify_size_bound(size, g.node_count(), in.k)},
               {"guarded_limit", bound + trees}};
  v["forest"] = in.forest ? forest_json(*in.forest) : json(nullptr);
  v["equivalence"] = in.equivalence ? json(*in.equivalence) : json(nullptr);
  if (in.bounds) {
    v["bounds"] = {{"time_ok", in.bounds->time_ok},
                   {"messages_ok", in.bounds->messages_ok},
                   {"time_bound", in.bounds->time_bound},
                   {"message_bound", in.bounds->message_bound},
                   {"time_ratio", in.bounds->time_ratio},
                   {"message_ratio", in.bounds->message_ratio}};
  } else {
    v["bounds"] = nullptr;
  }
  report["verification"] = v;
  return report;
}

json trace_json(const Graph& g, const PhaseTrace& trace) {
  json steps = json::array();
  auto id_or_null = [&](NodeIndex v) { return v == kNoNode ? json(nullptr) : json(g.id(v)); };
  for (const auto& s : trace.steps) {
    json roots = json::array();
    json parents = json::array();
    for (std::size_t v = 0; v < s.root_of.size(); ++v) {
      roots.push_back(g.id(s.root_of[v]));
      parents.push_back(id_or_null(s.parent[v]));
    }
    json edges = json::array();
    for (auto [a, b] : s.edges) edges.push_back({g.id(a), g.id(b)});
    json merges = json::array();
    for (const auto& m : s.merges) {
      merges.push_back({{"src", g.id(m.src)},
                        {"into", g.id(m.into)},
                        {"partner", g.id(m.partner)},
                        {"edge", {g.id(m.edge.u), g.id(m.edge.v)}}});
    }
    json statuses = json::object();
    for (const auto& [id, st] : s.statuses) statuses[std::to_string(g.id(id))] = std::string(meta_status_name(st));
    steps.push_back({{"phase", s.phase},
                     {"step", s.step},
                     {"root_of", roots},
                     {"parent", parents},
                     {"meta_edges", edges},
                     {"statuses", statuses},
                     {"merges", merges}});
  }
  return {{"early_exit", trace.early_exit},
          {"final_phase", trace.final_phase},
          {"label_iterations", trace.label_iterations},
          {"steps", steps}};
}

std::string csv_header() {
  return "instance,n,m,k,policy,trees,size,bound,dominates,pulses,messages,words,time_ratio,message_ratio,equal,"
         "max_height";
}

std::string csv_row(const BenchRow& r) {
  std::ostringstream out;
  out << r.instance << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.policy << ',' << r.trees << ','
      << r.size << ',' << r.bound << ',' << (r.dominates ? 1 : 0) << ',' << r.pulses << ',' << r.messages << ','
      << r.words << ',' << r.time_ratio << ',' << r.message_ratio << ',' << (r.equal ? 1 : 0) << ','
      << r.max_height;
  return out.str();
}

}  // namespace kdom
