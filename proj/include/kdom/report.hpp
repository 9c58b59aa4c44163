// report.hpp - JSON and CSV renderings of run artifacts. Node references in
// every output are graph ids, never internal indices.
#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "kdom/dominate.hpp"
#include "kdom/partition.hpp"
#include "kdom/sim_kernel.hpp"
#include "kdom/verify.hpp"

namespace kdom {

struct ReportInput {
  std::string graph_source;
  std::uint64_t k = 1;
  std::string mode;  // "central" | "sim"
  Policy policy = Policy::Guarded;
  std::uint64_t seed = 0;

  const DominatingSet* set = nullptr;
  const RunMetrics* metrics = nullptr;  // sim mode only
  DominationCheck domination;
  const ForestReport* forest = nullptr;
  std::optional<bool> equivalence;
  std::optional<BoundsCheck> bounds;
};

nlohmann::json dominating_set_json(const Graph& g, const DominatingSet& d);
nlohmann::json per_tree_json(const Graph& g, const DominatingSet& d);
nlohmann::json metrics_json(const RunMetrics& m);
nlohmann::json domination_json(const Graph& g, const DominationCheck& c);
nlohmann::json forest_json(const ForestReport& r);

// {config, dominating_set, per_tree, metrics, verification}
nlohmann::json make_report(const Graph& g, const ReportInput& in);

// Step-by-step record of a central run.
nlohmann::json trace_json(const Graph& g, const PhaseTrace& trace);

struct BenchRow {
  std::string instance;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t k = 0;
  std::string policy;
  std::size_t trees = 0;
  std::size_t size = 0;
  std::size_t bound = 0;
  bool dominates = false;
  std::uint64_t pulses = 0;
  std::uint64_t messages = 0;
  std::uint64_t words = 0;
  double time_ratio = 0;
  double message_ratio = 0;
  bool equal = false;
  std::size_t max_height = 0;
};

std::string csv_header();
std::string csv_row(const BenchRow& row);

}  // namespace kdom
