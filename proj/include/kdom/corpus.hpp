// corpus.hpp - the benchmark / acceptance instance set.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdom/graph.hpp"

namespace kdom {

struct CorpusInstance {
  GraphKind kind = GraphKind::Path;
  GenParams params;
  std::uint64_t seed = 0;
  std::uint64_t k = 1;

  std::string name() const;
  Graph build() const { return generate(kind, params, seed); }
};

// Generator parameters for a kind at (roughly) n nodes: grids use the most
// square factorization of n, gnm-connected uses m = min(2n, n(n-1)/2).
GenParams corpus_params(GraphKind kind, std::size_t n);

struct CorpusFilter {
  std::size_t max_n = SIZE_MAX;
  std::size_t min_n = 0;
  std::size_t random_seeds = 20;  // seeds per gnm-connected (n, k) cell
};

// Every kind x n in {4,5,8,16,50,100,200,500,1000,2000} x k in {1,2,3,7,15}
// with k <= n-1. Deterministic kinds use seed 0.
std::vector<CorpusInstance> corpus(const CorpusFilter& filter = {});

}  // namespace kdom
