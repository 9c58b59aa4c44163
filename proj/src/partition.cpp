#include "kdom/partition.hpp"

#include <algorithm>
#include <tuple>

namespace kdom {

void check_run_config(const Graph& g, std::uint64_t k) {
  if (k < 1) throw RunConfigError("k must be at least 1");
  if (g.node_count() < k + 1) {
    throw RunConfigError("need n >= k+1 (n=" + std::to_string(g.node_count()) + ", k=" + std::to_string(k) + ")");
  }
  if (!g.is_connected()) throw RunConfigError("graph is not connected");
}

StepSnapshot snapshot(int phase, const std::string& step, const RootedForest& f, const MetaGraph& mg,
                      std::vector<MergeRecord> merges) {
  StepSnapshot s;
  s.phase = phase;
  s.step = step;
  s.root_of = f.roots_by_node();
  s.parent = f.parents();
  for (const auto& [id, node] : mg.nodes) s.statuses[id] = node.status;
  s.edges = mg.edge_list();
  s.merges = std::move(merges);
  return s;
}

PhaseExecutor::PhaseExecutor(const Graph& g, RootedForest& forest, MetaGraph& mg, int phase)
    : g_(g), f_(forest), mg_(mg), phase_(phase) {}

void PhaseExecutor::notify(const std::string& step) {
  if (on_step) on_step(step);
}

std::vector<MergeRecord> PhaseExecutor::take_merges() {
  std::vector<MergeRecord> out;
  out.swap(merges_);
  return out;
}

void PhaseExecutor::step1_classify() {
  mg_.phase = phase_;
  auto heights = f_.tree_heights();
  const std::uint64_t threshold = std::uint64_t{2} << phase_;
  for (auto& [id, node] : mg_.nodes) {
    node.height = heights.at(id);
    node.status = node.height < threshold ? MetaStatus::Active : MetaStatus::Inactive;
  }
}

bool PhaseExecutor::step1_edges() {
  mg_.clear_edges();
  mg_.clear_preferred();
  if (mg_.nodes.size() <= 1) return true;
  using Candidate = std::tuple<NodeIndex, NodeIndex, NodeIndex>;  // (foreign root, u, v)
  for (const auto& [x, node] : mg_.nodes) {
    if (node.status != MetaStatus::Active) continue;
    std::optional<Candidate> best_active, best_inactive;
    for (NodeIndex u : f_.members(x)) {
      for (NodeIndex v : g_.neighbors(u)) {
        NodeIndex y = f_.root_of(v);
        if (y == x) continue;
        Candidate c{y, u, v};
        auto& slot = mg_.nodes.at(y).status == MetaStatus::Active ? best_active : best_inactive;
        if (!slot || c < *slot) slot = c;
      }
    }
    const auto& pick = best_active ? best_active : best_inactive;
    if (!pick) throw ForestError("active meta-node without potential neighbors in a connected graph");
    auto [y, u, v] = *pick;
    mg_.add_edge(x, y, OrientedEdge{u, v});
  }
  notify("1");
  return false;
}

void PhaseExecutor::step2a_absorb_into_inactive() {
  std::vector<std::pair<NodeIndex, NodeIndex>> absorb;
  x_.clear();
  for (const auto& [x, node] : mg_.nodes) {
    if (node.status != MetaStatus::Active) continue;
    auto y = mg_.downstream(x);
    if (!y) continue;
    if (mg_.nodes.at(*y).status == MetaStatus::Inactive) {
      if (!mg_.upstream(x).empty()) {
        throw ForestError("active node with inactive downstream has upstream neighbors");
      }
      absorb.emplace_back(x, *y);
    } else {
      x_.insert(x);
    }
  }
  for (auto [x, y] : absorb) merges_.push_back(merge(mg_, f_, x, y));
  for (auto& [id, node] : mg_.nodes) {
    if (node.status == MetaStatus::Inactive) {
      node.status = MetaStatus::Isolated;
      mg_.remove_edges_of(id);
    }
  }
  notify("2a");
}

void PhaseExecutor::step2b_prune_upstreams() {
  std::map<NodeIndex, std::set<NodeIndex>> z;
  for (NodeIndex x : x_) {
    const auto& ups = mg_.upstream(x);
    for (NodeIndex y : ups) {
      if (!x_.count(y)) throw ForestError("upstream neighbor outside the chain set");
    }
    z[x] = ups;
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> absorb, eliminate;
  for (const auto& [x, ups] : z) {
    if (ups.empty()) continue;
    const NodeIndex keep = *ups.begin();
    for (NodeIndex y : ups) {
      if (y == keep) continue;
      if (z.at(y).empty()) absorb.emplace_back(y, x);
      else eliminate.emplace_back(y, x);
    }
  }
  for (auto [y, x] : eliminate) {
    mg_.remove_edge(y, x);
    mg_.forget_preferred(y, x);
  }
  for (auto [y, x] : absorb) {
    merges_.push_back(merge(mg_, f_, y, x));
    x_.erase(y);
  }
  const std::uint64_t bound = chain_height_bound(phase_);
  for (NodeIndex x : x_) {
    if (mg_.upstream(x).size() > 1) throw ForestError("chain member keeps two upstream neighbors");
    if (f_.tree_height(x) > bound) {
      throw ForestError("phase " + std::to_string(phase_) + ": chain member exceeds the chain height bound");
    }
  }
  notify("2b");
}

ChainView PhaseExecutor::chain_view() const {
  ChainView view;
  for (NodeIndex x : x_) {
    ChainLinks links;
    if (auto d = mg_.downstream(x); d && x_.count(*d)) links.down = *d;
    const auto& ups = mg_.upstream(x);
    if (ups.size() > 1) throw ChainError("chain member with two upstream neighbors");
    if (!ups.empty()) links.up = *ups.begin();
    view[x] = links;
  }
  return view;
}

void PhaseExecutor::apply(const ChainOutcome& outcome) {
  for (const auto& a : outcome.absorptions) {
    merges_.push_back(merge(mg_, f_, a.node, a.into, a.partner));
  }
  for (NodeIndex id : outcome.formed) {
    mg_.remove_edges_of(id);
    mg_.nodes.at(id).status = MetaStatus::Isolated;
  }
  for (NodeIndex gone : outcome.removed()) x_.erase(gone);
}

void PhaseExecutor::step2c_minima() {
  std::map<NodeIndex, Label> labels;
  for (NodeIndex x : x_) labels[x] = g_.id(x);
  apply(extremum_pass(chain_view(), labels, Extremum::Minimum));
  notify("2c");
}

void PhaseExecutor::step2d_maxima() {
  std::map<NodeIndex, Label> labels;
  for (NodeIndex x : x_) labels[x] = g_.id(x);
  apply(extremum_pass(chain_view(), labels, Extremum::Maximum));
  notify("2d");
}

int PhaseExecutor::step2e_iterate() {
  std::map<NodeIndex, Label> labels;
  Label max_label = 0;
  for (NodeIndex x : x_) {
    labels[x] = g_.id(x);
    max_label = std::max(max_label, labels[x] + 1);
  }
  const int cap = iteration_cap(max_label);
  int iterations = 0;
  while (!x_.empty()) {
    if (iterations == cap) {
      throw ChainError("label reduction did not empty the chains within " + std::to_string(cap) + " iterations");
    }
    ++iterations;
    auto view = chain_view();
    auto states = chain_pstars(view, labels);
    std::map<NodeIndex, unsigned> pstar;
    for (const auto& [x, s] : states) pstar[x] = s.pstar;
    for (const auto& [x, links] : view) {
      if (!links.down || pstar[x] != pstar[*links.down]) continue;
      const NodeIndex y = *links.down;
      if (!states[x].in_a(pstar[x]) || !states[y].in_b(pstar[y])) {
        throw ChainError("equal p* edge without the A-upstream/B-downstream pattern");
      }
      if (auto z = view.at(y).down; z && pstar[*z] == pstar[y]) {
        throw ChainError("two consecutive chain edges share p*");
      }
    }
    apply(equal_pstar_pass(view, pstar));

    std::map<NodeIndex, Label> relabel;
    for (NodeIndex x : x_) relabel[x] = pstar.at(x);
    apply(extremum_pass(chain_view(), relabel, Extremum::Minimum));
    apply(extremum_pass(chain_view(), relabel, Extremum::Maximum));
    labels.clear();
    for (NodeIndex x : x_) labels[x] = pstar.at(x);
    notify("2e." + std::to_string(iterations));
  }
  return iterations;
}

PartitionResult run_partition(const Graph& g, std::uint64_t k) {
  check_run_config(g, k);
  auto [forest, mg] = init_g0(g);
  PartitionResult result;
  PhaseTrace& trace = result.trace;
  const int phases = num_phases(k);

  int phase = 0;
  for (; phase < phases; ++phase) {
    PhaseExecutor exec(g, forest, mg, phase);
    exec.on_step = [&](const std::string& step) {
      trace.steps.push_back(snapshot(phase, step, forest, mg, exec.take_merges()));
    };
    exec.step1_classify();
    // The distributed schedule sizes its windows with this bound.
    for (const auto& [id, node] : mg.nodes) {
      if (node.height > phase_height_bound(phase)) {
        throw ForestError("phase " + std::to_string(phase) + ": tree " + std::to_string(g.id(id)) +
                          " exceeds the phase height bound");
      }
    }
    PhaseStart start;
    start.phase = phase;
    start.root_of = forest.roots_by_node();
    for (const auto& [id, node] : mg.nodes) {
      start.heights[id] = node.height;
      start.statuses[id] = node.status;
    }
    trace.phase_starts.push_back(std::move(start));
    if (exec.step1_edges()) {
      trace.early_exit = true;
      trace.steps.push_back(snapshot(phase, "exit", forest, mg, {}));
      break;
    }
    exec.step2a_absorb_into_inactive();
    exec.step2b_prune_upstreams();
    exec.step2c_minima();
    exec.step2d_maxima();
    trace.label_iterations.push_back(exec.step2e_iterate());
    mg.clear_edges();
    mg.clear_preferred();
    for (auto& [id, node] : mg.nodes) node.status = MetaStatus::Active;
    trace.steps.push_back(snapshot(phase, "end", forest, mg, exec.take_merges()));
  }
  trace.final_phase = phase;
  if (!trace.early_exit) {
    PhaseStart last;
    last.phase = phase;
    last.root_of = forest.roots_by_node();
    last.heights = forest.tree_heights();
    trace.phase_starts.push_back(std::move(last));
  }
  forest.validate(g);
  result.forest = std::move(forest);
  return result;
}

}  // namespace kdom
