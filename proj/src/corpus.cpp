#include "kdom/corpus.hpp"

#include <array>
#include <cmath>

namespace kdom {

std::string CorpusInstance::name() const {
  return std::string(graph_kind_name(kind)) + "-n" + std::to_string(params.n) + "-k" + std::to_string(k) + "-s" +
         std::to_string(seed);
}

GenParams corpus_params(GraphKind kind, std::size_t n) {
  GenParams p;
  p.n = n;
  if (kind == GraphKind::Grid && n > 0) {
    std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (rows > 1 && n % rows != 0) --rows;
    p.rows = rows;
    p.cols = n / rows;
  }
  if (kind == GraphKind::GnmConnected) p.m = std::min<std::size_t>(2 * n, n * (n - 1) / 2);
  return p;
}

std::vector<CorpusInstance> corpus(const CorpusFilter& filter) {
  static constexpr std::array<std::size_t, 10> kSizes{4, 5, 8, 16, 50, 100, 200, 500, 1000, 2000};
  static constexpr std::array<std::uint64_t, 5> kKs{1, 2, 3, 7, 15};
  static constexpr std::array<GraphKind, 6> kKinds{GraphKind::Path,         GraphKind::Cycle,
                                                   GraphKind::Star,         GraphKind::BalancedTree,
                                                   GraphKind::Grid,         GraphKind::GnmConnected};
  std::vector<CorpusInstance> out;
  for (std::size_t n : kSizes) {
    if (n > filter.max_n || n < filter.min_n) continue;
    for (std::uint64_t k : kKs) {
      if (k > n - 1) continue;
      for (GraphKind kind : kKinds) {
        const std::size_t seeds = kind == GraphKind::GnmConnected ? filter.random_seeds : 1;
        for (std::uint64_t s = 0; s < seeds; ++s) {
          out.push_back(CorpusInstance{kind, corpus_params(kind, n), s, k});
        }
      }
    }
  }
  return out;
}

}  // namespace kdom
