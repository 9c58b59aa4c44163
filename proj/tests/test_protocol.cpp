#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kdom/chain.hpp"
#include "kdom/corpus.hpp"
#include "kdom/partition.hpp"
#include "kdom/protocol.hpp"
#include "kdom/verify.hpp"

using namespace kdom;

namespace {

struct Both {
  PartitionResult central;
  DominatingSet central_set;
  DistributedResult dist;
};

Both run_both(const Graph& g, std::uint64_t k, Policy policy, DistributedOptions opt = {}) {
  Both b;
  b.central = run_partition(g, k);
  b.central_set = build_dominating_set(g, b.central.forest, k, policy);
  opt.snapshots = true;
  b.dist = run_distributed(g, k, policy, opt);
  return b;
}

void check_equivalent(const Graph& g, const Both& b) {
  auto cmp = compare_runs(b.central.forest, b.central_set, b.dist.forest, b.dist.dominating_set);
  CHECK(cmp.forest_equal);
  CHECK(cmp.set_equal);
  auto lock = compare_lockstep(g, b.central.trace, b.dist.snapshots);
  CHECK_MESSAGE(!lock, (lock ? *lock : std::string()));
  CHECK(b.dist.early_exit == b.central.trace.early_exit);
  CHECK(b.dist.forest == b.central.forest);
}

}  // namespace

TEST_CASE("schedule windows tile the timeline") {
  for (std::uint64_t k : {1, 2, 3, 7, 15}) {
    for (Policy p : {Policy::Literal, Policy::Guarded}) {
      Schedule s(k, 99, p);
      CHECK(s.phases() == num_phases(k));
      std::optional<int> full;
      std::uint64_t t = 0;
      std::size_t i = 0;
      for (; const Window* w = s.at(i, full); ++i) {
        CHECK(w->start == t);
        CHECK(w->length >= 1);
        t = w->end();
      }
      CHECK(t == s.total_pulses(full));
      CHECK(i > 0);
      for (int exit = 0; exit < s.phases(); ++exit) {
        CHECK(s.total_pulses(exit) < s.total_pulses(full));
        std::uint64_t u = 0;
        for (std::size_t j = 0; const Window* w = s.at(j, exit); ++j) {
          CHECK(w->start == u);
          u = w->end();
        }
        CHECK(u == s.total_pulses(exit));
      }
      CHECK(s.longest() >= s.total_pulses(full));
    }
  }
}

TEST_CASE("the flood window exists only for the guarded policy") {
  auto has_flood = [](const Schedule& s) {
    for (std::size_t i = 0; const Window* w = s.at(i, std::nullopt); ++i) {
      if (w->kind == WindowKind::Flood) return true;
    }
    return false;
  };
  CHECK(has_flood(Schedule(3, 10, Policy::Guarded)));
  CHECK_FALSE(has_flood(Schedule(3, 10, Policy::Literal)));
}

TEST_CASE("stage two takes O(k) pulses once the forest is fixed") {
  for (std::uint64_t k : {1, 3, 7, 15, 31}) {
    Schedule s(k, 1000, Policy::Guarded);
    std::uint64_t stage2 = 0;
    for (std::size_t i = 0; const Window* w = s.at(i, std::nullopt); ++i) {
      if (w->phase < 0) stage2 += w->length;
    }
    // Three tree-height sweeps plus one k-hop flood; the final-forest height
    // bound is linear in 2^P < 2(k+1).
    const std::uint64_t hf = phase_height_bound(s.phases());
    CHECK(stage2 == 3 * (hf + 1) + (k + 1));
    CHECK(hf <= (std::uint64_t{15} << s.phases()));
  }
}

TEST_CASE("path-4, k=1: distributed run reproduces the hand trace") {
  Graph g = generate(GraphKind::Path, {.n = 4});
  for (Policy p : {Policy::Literal, Policy::Guarded}) {
    auto b = run_both(g, 1, p);
    CHECK(b.dist.dominating_set.members == std::vector<NodeIndex>{0, 2});
    CHECK(b.dist.forest.roots_by_node() == std::vector<NodeIndex>{0, 0, 2, 2});
    check_equivalent(g, b);
  }
}

TEST_CASE("random connected G(50,80), k=3") {
  Graph g = generate(GraphKind::GnmConnected, {.n = 50, .m = 80}, 7);
  auto b = run_both(g, 3, Policy::Guarded);
  check_equivalent(g, b);
  CHECK(b.dist.metrics.pulses > 0);
  CHECK(b.dist.metrics.words >= b.dist.metrics.messages);
}

TEST_CASE("equivalence with the central executor on the small corpus") {
  CorpusFilter filter;
  filter.max_n = 100;
  filter.random_seeds = 3;
  for (const auto& inst : corpus(filter)) {
    CAPTURE(inst.name());
    Graph g = inst.build();
    for (Policy p : {Policy::Literal, Policy::Guarded}) check_equivalent(g, run_both(g, inst.k, p));
  }
}

TEST_CASE("sparse, non-contiguous ids") {
  Graph g = Graph::from_edges({3, 10, 11, 400, 401, 9000, 123456789},
                              {{3, 10}, {10, 11}, {11, 400}, {400, 401}, {401, 9000}, {9000, 123456789},
                               {3, 9000}, {10, 401}});
  for (std::uint64_t k : {1, 2, 3}) check_equivalent(g, run_both(g, k, Policy::Guarded));
}

TEST_CASE("evaluation order does not matter") {
  Graph g = generate(GraphKind::GnmConnected, {.n = 60, .m = 120}, 2);
  DistributedOptions shuffled;
  shuffled.shuffle_seed = 77;
  auto a = run_distributed(g, 7, Policy::Guarded);
  auto b = run_distributed(g, 7, Policy::Guarded, shuffled);
  CHECK(a.forest == b.forest);
  CHECK(a.dominating_set == b.dominating_set);
  CHECK(a.metrics.pulses == b.metrics.pulses);
  CHECK(a.metrics.messages == b.metrics.messages);
  CHECK(a.metrics.words == b.metrics.words);
  CHECK(a.metrics.per_phase.size() == b.metrics.per_phase.size());
}

TEST_CASE("per-window accounting adds up") {
  Graph g = generate(GraphKind::Grid, {.rows = 5, .cols = 6});
  auto r = run_distributed(g, 3, Policy::Guarded);
  std::uint64_t pulses = 0, messages = 0, words = 0;
  for (const auto& [tag, c] : r.metrics.per_phase) {
    pulses += c.pulses;
    messages += c.messages;
    words += c.words;
  }
  CHECK(pulses == r.metrics.pulses);
  CHECK(messages == r.metrics.messages);
  CHECK(words == r.metrics.words);
  CHECK(r.metrics.per_phase.size() > 5);
}

TEST_CASE("pulse trace is well-formed JSON lines") {
  Graph g = generate(GraphKind::Path, {.n = 4});
  std::ostringstream trace;
  DistributedOptions opt;
  opt.trace = &trace;
  auto r = run_distributed(g, 1, Policy::Guarded, opt);
  std::istringstream in(trace.str());
  std::uint64_t lines = 0, sends = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    auto doc = nlohmann::json::parse(line);
    CHECK(doc["pulse"] == lines);
    sends += doc["sends"].size();
  }
  CHECK(lines == r.metrics.pulses);
  CHECK(sends == r.metrics.messages);
}

TEST_CASE("a too-small pulse cap aborts the run") {
  Graph g = generate(GraphKind::Path, {.n = 8});
  DistributedOptions opt;
  opt.pulse_cap = 3;
  CHECK_THROWS_AS(run_distributed(g, 1, Policy::Guarded, opt), SimError);
}

TEST_CASE("invalid configurations are rejected") {
  Graph g = generate(GraphKind::Path, {.n = 4});
  CHECK_THROWS_AS(run_distributed(g, 4, Policy::Guarded), RunConfigError);
  Graph split = Graph::from_index_edges(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(run_distributed(split, 1, Policy::Guarded), RunConfigError);
}

TEST_CASE("early exit when one tree spans the graph") {
  Graph g = generate(GraphKind::Star, {.n = 5});
  auto b = run_both(g, 3, Policy::Guarded);
  CHECK(b.dist.forest.tree_count() == 1);
  check_equivalent(g, b);
}
