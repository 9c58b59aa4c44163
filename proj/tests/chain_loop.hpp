// Drives the library's chain primitives through the label-reduction loop on
// a single chain, the way the central executor does, and records which
// formed node every chain member ended up in.
#pragma once

#include <map>
#include <random>
#include <set>
#include <vector>

#include "kdom/chain.hpp"

namespace chainloop {

using namespace kdom;

struct LoopResult {
  int iterations = 0;
  std::vector<std::size_t> group;
};

inline ChainView make_chain(std::size_t n) {
  ChainView view;
  for (NodeIndex i = 0; i < n; ++i) {
    ChainLinks links;
    if (i > 0) links.up = i - 1;
    if (i + 1 < n) links.down = i + 1;
    view[i] = links;
  }
  return view;
}

inline LoopResult run(const std::vector<Label>& raw, int give_up_after) {
  ChainView view = make_chain(raw.size());
  std::map<NodeIndex, Label> labels;
  for (NodeIndex i = 0; i < raw.size(); ++i) labels[i] = raw[i];
  LoopResult out;
  out.group.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.group[i] = i;
  auto root = [&](std::size_t v) {
    while (out.group[v] != v) v = out.group[v];
    return v;
  };
  auto apply = [&](const ChainOutcome& oc) {
    for (const Absorption& a : oc.absorptions) out.group[a.node] = root(a.into);
    apply_to_view(view, oc);
  };
  while (!view.empty() && out.iterations < give_up_after) {
    ++out.iterations;
    auto states = chain_pstars(view, labels);
    std::map<NodeIndex, unsigned> pstar;
    for (const auto& [x, s] : states) pstar[x] = s.pstar;
    apply(equal_pstar_pass(view, pstar));
    std::map<NodeIndex, Label> relabel;
    for (const auto& [x, links] : view) relabel[x] = pstar.at(x);
    apply(extremum_pass(view, relabel, Extremum::Minimum));
    apply(extremum_pass(view, relabel, Extremum::Maximum));
    labels.clear();
    for (const auto& [x, links] : view) labels[x] = pstar.at(x);
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out.group[i] = root(i);
  return out;
}

// A strictly monotone chain of distinct labels in [0, max_label].
inline std::vector<Label> random_chain(std::mt19937_64& rng, std::size_t len, Label max_label) {
  std::set<Label> picked;
  std::uniform_int_distribution<Label> pick(0, max_label);
  while (picked.size() < len) picked.insert(pick(rng));
  std::vector<Label> labels(picked.begin(), picked.end());
  if (rng() & 1U) std::reverse(labels.begin(), labels.end());
  return labels;
}

}  // namespace chainloop
