// dominate.hpp - second stage: layer every tree by depth mod (k+1) and pick
// one class per tree.
//
// Two policies are offered. `Literal` takes the smallest class exactly as the
// construction describes it; on shallow branches that class can miss nodes
// (or be empty). `Guarded` only returns classes verified to dominate their
// tree, falling back to a class plus the root, which always dominates.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "kdom/forest.hpp"
#include "kdom/graph.hpp"

namespace kdom {

enum class Policy { Literal, Guarded };

Policy parse_policy(std::string_view name);
std::string_view policy_name(Policy p);

class DominateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DepthClasses {
  NodeIndex root = kNoNode;
  std::vector<std::vector<NodeIndex>> classes;  // k+1 classes, each ascending
  std::size_t tree_size() const;
};

DepthClasses layer_tree(const RootedForest& f, NodeIndex root, std::uint64_t k);

struct ClassChoice {
  std::size_t ell = 0;
  bool augmented = false;  // root added to the class
  std::vector<NodeIndex> nodes;
};

ClassChoice select_literal(const DepthClasses& classes);

// True iff every member of the tree lies within k hops of `sources`, walking
// only graph edges between members of that tree.
bool dominates_tree(const Graph& g, const RootedForest& f, NodeIndex root,
                    const std::vector<NodeIndex>& sources, std::uint64_t k);

ClassChoice select_guarded(const Graph& g, const DepthClasses& classes, const RootedForest& f,
                           std::uint64_t k);

struct TreeChoice {
  std::size_t ell = 0;
  bool augmented = false;
  std::size_t size = 0;       // nodes contributed to D
  std::size_t tree_size = 0;  // n_U
  friend bool operator==(const TreeChoice&, const TreeChoice&) = default;
};

struct DominatingSet {
  std::vector<NodeIndex> members;           // ascending indices
  std::map<NodeIndex, TreeChoice> per_tree;  // keyed by root index
  friend bool operator==(const DominatingSet&, const DominatingSet&) = default;
};

// Throws DominateError if some tree has fewer than k+1 nodes.
DominatingSet build_dominating_set(const Graph& g, const RootedForest& f, std::uint64_t k, Policy policy);

}  // namespace kdom
