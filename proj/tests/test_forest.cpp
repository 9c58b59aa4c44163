#include "doctest.h"
#include "kdom/forest.hpp"
#include "kdom/graph.hpp"

using namespace kdom;

namespace {

// Parent pointers of a path 0-1-...-(n-1) rooted at 0.
RootedForest path_tree(std::size_t n) {
  std::vector<NodeIndex> parent(n, kNoNode);
  for (NodeIndex v = 1; v < n; ++v) parent[v] = v - 1;
  return RootedForest::from_parents(parent);
}

}  // namespace

TEST_CASE("initial forest is all singletons") {
  Graph g = generate(GraphKind::Path, {.n = 4});
  auto [f, mg] = init_g0(g);
  CHECK(f.tree_count() == 4);
  for (NodeIndex v = 0; v < 4; ++v) {
    CHECK(f.root_of(v) == v);
    CHECK(f.is_root(v));
    CHECK(f.tree_height(v) == 0);
  }
  CHECK(mg.nodes.size() == 4);
  CHECK(mg.edge_count() == 0);

  Graph single = Graph::from_index_edges(1, {});
  auto [f1, mg1] = init_g0(single);
  CHECK(mg1.nodes.size() == 1);
}

TEST_CASE("reroot reverses the path") {
  RootedForest f = path_tree(3);
  CHECK(f.tree_height(0) == 2);
  f.reroot(2);
  CHECK(f.is_root(2));
  CHECK(f.parent(1) == NodeIndex{2});
  CHECK(f.parent(0) == NodeIndex{1});
  for (NodeIndex v = 0; v < 3; ++v) CHECK(f.root_of(v) == 2);

  RootedForest same = path_tree(3);
  same.reroot(0);
  CHECK(same == path_tree(3));
}

TEST_CASE("star re-rooted at a leaf has height 2") {
  std::vector<NodeIndex> parent{kNoNode, 0, 0, 0, 0};
  RootedForest f = RootedForest::from_parents(parent);
  CHECK(f.tree_height(0) == 1);
  f.reroot(3);
  CHECK(f.tree_height(3) == 2);
  f.validate(generate(GraphKind::Star, {.n = 5}));
}

TEST_CASE("from_parents rejects cycles") {
  CHECK_THROWS_AS(RootedForest::from_parents({1, 0}), ForestError);
  CHECK_THROWS_AS(RootedForest::from_parents({0}), ForestError);
}

TEST_CASE("validate rejects tree edges that are not graph edges") {
  Graph g = generate(GraphKind::Path, {.n = 3});
  RootedForest bad = RootedForest::from_parents({kNoNode, 0, 0});  // 2-0 is no edge
  CHECK_THROWS_AS(bad.validate(g), ForestError);
  CHECK_NOTHROW(path_tree(3).validate(g));
}

TEST_CASE("forest equality ignores member order") {
  RootedForest a = RootedForest::from_parents({kNoNode, 0, 1});
  RootedForest b(3);
  b.attach(2, 1);
  b.attach(1, 0);
  CHECK(a == b);
  b.reroot(2);
  CHECK_FALSE(a == b);
}

TEST_CASE("merging two singletons through the preferred edge") {
  Graph g = generate(GraphKind::Path, {.n = 2});
  auto [f, mg] = init_g0(g);
  mg.add_edge(0, 1, {0, 1});
  MergeRecord r = merge(mg, f, 0, 1);
  CHECK(r.src == 0);
  CHECK(r.into == 1);
  CHECK(f.root_of(0) == 1);
  CHECK(f.tree_height(1) == 1);
  CHECK_FALSE(mg.nodes.count(0));
  CHECK(mg.edge_count() == 0);
  f.validate(g);
}

TEST_CASE("merge re-roots the source tree at the preferred endpoint") {
  // Tree {0,1,2} rooted at 0 as a path, singleton 3 adjacent to 2.
  Graph g = generate(GraphKind::Path, {.n = 4});
  auto [f, mg] = init_g0(g);
  f.attach(2, 1);
  f.attach(1, 0);
  mg.nodes.erase(1);
  mg.nodes.erase(2);
  mg.add_edge(0, 3, {2, 3});
  merge(mg, f, 0, 3);
  CHECK(f.root_of(0) == 3);
  CHECK(f.parent(2) == NodeIndex{3});
  CHECK(f.parent(1) == NodeIndex{2});
  CHECK(f.parent(0) == NodeIndex{1});
  CHECK(f.tree_height(3) == 3);
  f.validate(g);
}

TEST_CASE("preferred_between falls back to the reversed opposite edge") {
  MetaGraph mg;
  mg.add_edge(5, 2, {7, 3});
  auto fwd = mg.preferred_between(5, 2);
  REQUIRE(fwd);
  CHECK(fwd->u == 7);
  CHECK(fwd->v == 3);
  auto back = mg.preferred_between(2, 5);
  REQUIRE(back);
  CHECK(back->u == 3);
  CHECK(back->v == 7);
  mg.forget_preferred(5, 2);
  CHECK_FALSE(mg.preferred_between(2, 5));
}

TEST_CASE("merge without a preferred edge fails") {
  Graph g = generate(GraphKind::Path, {.n = 2});
  auto [f, mg] = init_g0(g);
  CHECK_THROWS_AS(merge(mg, f, 0, 1), ForestError);
}

TEST_CASE("meta-graph bookkeeping") {
  MetaGraph mg;
  mg.add_edge(1, 0, {1, 0});
  mg.add_edge(2, 0, {2, 0});
  mg.add_edge(0, 1, {0, 1});
  CHECK(mg.downstream(1) == NodeIndex{0});
  CHECK(mg.upstream(0) == std::set<NodeIndex>{1, 2});
  CHECK(mg.neighbors(0) == std::vector<NodeIndex>{1, 2});
  mg.remove_edge(2, 0);
  CHECK(mg.upstream(0) == std::set<NodeIndex>{1});
  CHECK(mg.edge_count() == 2);
  mg.remove_edges_of(0);
  CHECK(mg.edge_count() == 0);
  CHECK(mg.isolated(1));
}
