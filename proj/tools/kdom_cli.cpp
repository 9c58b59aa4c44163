// kdom - command-line front end: generate graphs, run either executor,
// verify sets, compute exact optima and sweep the benchmark corpus.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kdom/corpus.hpp"
#include "kdom/dominate.hpp"
#include "kdom/graph.hpp"
#include "kdom/partition.hpp"
#include "kdom/protocol.hpp"
#include "kdom/report.hpp"
#include "kdom/verify.hpp"

namespace {

using namespace kdom;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphSource {
  std::string file;
  std::string type;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t arity = 2;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;

  void add_options(CLI::App* app, bool require_seed_flag = true) {
    app->add_option("--graph", file, "edge-list file");
    app->add_option("--type", type, "generator: path|cycle|star|balanced-tree|grid|gnm-connected");
    app->add_option("--n", n, "node count for the generator");
    app->add_option("--m", m, "edge count (gnm-connected; default 2n capped at n(n-1)/2)");
    app->add_option("--arity", arity, "balanced-tree arity");
    app->add_option("--rows", rows, "grid rows");
    app->add_option("--cols", cols, "grid columns");
    if (require_seed_flag) app->add_option("--seed", seed, "generator seed");
  }

  std::string describe() const {
    if (!file.empty()) return file;
    if (rows || cols) return type + ":" + std::to_string(rows) + "x" + std::to_string(cols);
    return type + ":n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
  }

  Graph load() const {
    if (!file.empty() && !type.empty()) throw UsageError("give either --graph or --type, not both");
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw UsageError("cannot read " + file);
      std::stringstream buf;
      buf << in.rdbuf();
      return parse_graph(buf.str());
    }
    if (type.empty()) throw UsageError("a graph is required (--graph FILE or --type KIND --n N)");
    const GraphKind kind = parse_graph_kind(type);
    GenParams p = corpus_params(kind, n);
    if (m) p.m = m;
    p.arity = arity;
    if (rows || cols) {
      p.rows = rows;
      p.cols = cols;
    }
    return generate(kind, p, seed);
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

// What "verification passed" means for a policy.
bool accepted(const Graph& g, const DominatingSet& d, const DominationCheck& dom, std::uint64_t k, Policy policy) {
  if (!dom.dominates) return false;
  const std::size_t bound = g.node_count() / (k + 1);
  if (policy == Policy::Literal) return d.members.size() <= bound;
  return d.members.size() <= bound + d.per_tree.size();
}

// -- run ----------------------------------------------------------------------

struct RunArgs {
  GraphSource src;
  std::uint64_t k = 1;
  std::string mode = "central";
  std::string policy = "guarded";
  std::uint64_t pulse_cap = 0;
  std::string trace;
  std::string out;
  bool check = false;
};

int cmd_run(const RunArgs& a) {
  const Graph g = a.src.load();
  const Policy policy = parse_policy(a.policy);
  if (a.mode != "central" && a.mode != "sim") throw UsageError("--mode must be central or sim");
  check_run_config(g, a.k);

  ReportInput in;
  in.graph_source = a.src.describe();
  in.k = a.k;
  in.mode = a.mode;
  in.policy = policy;
  in.seed = a.src.seed;

  PartitionResult central;
  const bool need_central = a.mode == "central" || a.check;
  if (need_central) central = run_partition(g, a.k);
  ForestReport forest;
  DominatingSet set;
  RunMetrics metrics;

  if (a.mode == "central") {
    set = build_dominating_set(g, central.forest, a.k, policy);
    forest = verify_forest(g, central.trace, central.forest, a.k);
    if (!a.trace.empty()) write_text(a.trace, trace_json(g, central.trace).dump(2) + "\n");
  } else {
    DistributedOptions opt;
    if (a.pulse_cap) opt.pulse_cap = a.pulse_cap;
    std::ofstream trace_out;
    if (!a.trace.empty()) {
      trace_out.open(a.trace);
      if (!trace_out) throw UsageError("cannot write " + a.trace);
      opt.trace = &trace_out;
    }
    opt.snapshots = a.check;
    DistributedResult dist = run_distributed(g, a.k, policy, opt);
    set = dist.dominating_set;
    metrics = dist.metrics;
    in.metrics = &metrics;
    in.bounds = check_bounds(metrics, g.node_count(), g.edge_count(), a.k);
    if (a.check) {
      const DominatingSet central_set = build_dominating_set(g, central.forest, a.k, policy);
      auto cmp = compare_runs(central.forest, central_set, dist.forest, set);
      auto lock = compare_lockstep(g, central.trace, dist.snapshots);
      in.equivalence = cmp.equal && !lock;
      if (lock) std::cerr << "lockstep mismatch: " << *lock << "\n";
      forest = verify_forest(g, central.trace, dist.forest, a.k);
    }
  }

  in.set = &set;
  in.domination = verify_domination(g, set.members, a.k);
  if (need_central) in.forest = &forest;
  write_text(a.out, make_report(g, in).dump(2) + "\n");

  bool ok = accepted(g, set, in.domination, a.k, policy);
  if (!in.domination.dominates) std::cerr << "domination failed\n";
  else if (!ok) std::cerr << "size bound failed\n";
  if (need_central && !forest.ok) {
    ok = false;
    for (const auto& f : forest.failures) std::cerr << "forest: " << f << "\n";
  }
  if (in.equivalence && !*in.equivalence) {
    ok = false;
    std::cerr << "central and distributed runs differ\n";
  }
  return ok ? kOk : kVerifyFailed;
}

// -- verify -------------------------------------------------------------------

std::vector<NodeId> read_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<NodeId> ids;
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    json doc = json::parse(text);
    const json& arr = doc.is_object() ? doc.at("dominating_set") : doc;
    for (const auto& v : arr) ids.push_back(v.get<NodeId>());
    return ids;
  }
  std::istringstream words(text);
  std::string w;
  while (words >> w) {
    try {
      std::size_t used = 0;
      ids.push_back(std::stoull(w, &used));
      if (used != w.size()) throw std::invalid_argument(w);
    } catch (const std::exception&) {
      throw UsageError("bad node id '" + w + "' in " + path);
    }
  }
  return ids;
}

int cmd_verify(const GraphSource& src, std::uint64_t k, const std::string& set_file) {
  const Graph g = src.load();
  if (k < 1) throw UsageError("k must be at least 1");
  std::vector<NodeIndex> d;
  for (NodeId id : read_set(set_file)) {
    auto v = g.index_of(id);
    if (!v) throw UsageError("node " + std::to_string(id) + " is not in the graph");
    d.push_back(*v);
  }
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  auto dom = verify_domination(g, d, k);
  json out{{"domination", domination_json(g, dom)},
           {"size", d.size()},
           {"bound", g.node_count() / (k + 1)},
           {"within_bound", verify_size_bound(d.size(), g.node_count(), k)}};
  std::cout << out.dump(2) << "\n";
  if (!dom.dominates) std::cerr << "domination failed\n";
  return dom.dominates ? kOk : kVerifyFailed;
}

// -- oracle -------------------------------------------------------------------

int cmd_oracle(const GraphSource& src, std::uint64_t k, std::size_t cap) {
  const Graph g = src.load();
  if (k < 1) throw UsageError("k must be at least 1");
  if (!g.is_connected()) throw UsageError("graph is not connected");
  if (g.node_count() > cap) throw UsageError("graph exceeds the oracle cap of " + std::to_string(cap) + " nodes");
  auto opt = brute_force_min_kdom(g, k, cap);
  json w = json::array();
  for (NodeIndex v : opt.witness) w.push_back(g.id(v));
  std::cout << json{{"optimum", opt.size}, {"witness", w}}.dump(2) << "\n";
  return kOk;
}

// -- compare ------------------------------------------------------------------

int cmd_compare(const GraphSource& src, std::uint64_t k, const std::string& policy_text) {
  const Graph g = src.load();
  const Policy policy = parse_policy(policy_text);
  check_run_config(g, k);
  auto central = run_partition(g, k);
  auto central_set = build_dominating_set(g, central.forest, k, policy);
  DistributedOptions opt;
  opt.snapshots = true;
  auto dist = run_distributed(g, k, policy, opt);
  auto cmp = compare_runs(central.forest, central_set, dist.forest, dist.dominating_set);
  auto lock = compare_lockstep(g, central.trace, dist.snapshots);
  const bool equal = cmp.equal && !lock;
  std::cout << "equal: " << (equal ? "true" : "false") << "\n";
  if (!cmp.equal) {
    std::cout << "detail: " << cmp.detail;
    if (cmp.first_difference && *cmp.first_difference < g.node_count()) {
      std::cout << " at node " << g.id(*cmp.first_difference);
    }
    std::cout << "\n";
  }
  if (lock) std::cout << "lockstep: " << *lock << "\n";
  return equal ? kOk : kVerifyFailed;
}

// -- bench --------------------------------------------------------------------

int cmd_bench(std::size_t max_n, std::size_t seeds, const std::string& out_path, bool calibrate) {
  CorpusFilter filter;
  filter.max_n = calibrate ? std::min<std::size_t>(max_n, 200) : max_n;
  filter.random_seeds = seeds;
  std::ostringstream csv;
  csv << csv_header() << "\n";
  double max_t = 0, max_m = 0;
  bool all_ok = true;
  for (const auto& inst : corpus(filter)) {
    const Graph g = inst.build();
    auto central = run_partition(g, inst.k);
    auto central_set = build_dominating_set(g, central.forest, inst.k, Policy::Guarded);
    auto dist = run_distributed(g, inst.k, Policy::Guarded);
    auto cmp = compare_runs(central.forest, central_set, dist.forest, dist.dominating_set);
    auto bounds = check_bounds(dist.metrics, g.node_count(), g.edge_count(), inst.k);
    auto dom = verify_domination(g, dist.dominating_set.members, inst.k);
    max_t = std::max(max_t, bounds.time_ratio);
    max_m = std::max(max_m, bounds.message_ratio);
    all_ok = all_ok && cmp.equal && dom.dominates;

    BenchRow row;
    row.instance = inst.name();
    row.n = g.node_count();
    row.m = g.edge_count();
    row.k = inst.k;
    row.policy = "guarded";
    row.trees = dist.forest.tree_count();
    row.size = dist.dominating_set.members.size();
    row.bound = g.node_count() / (inst.k + 1);
    row.dominates = dom.dominates;
    row.pulses = dist.metrics.pulses;
    row.messages = dist.metrics.messages;
    row.words = dist.metrics.words;
    row.time_ratio = bounds.time_ratio;
    row.message_ratio = bounds.message_ratio;
    row.equal = cmp.equal;
    for (const auto& [r, h] : dist.forest.tree_heights()) row.max_height = std::max(row.max_height, h);
    csv << csv_row(row) << "\n";
  }
  write_text(out_path, csv.str());
  if (calibrate) {
    std::cerr << "max pulses/((k+1)(log*n+1)) = " << max_t << "\n"
              << "max messages/(mP+nP(log*n+1)) = " << max_m << "\n";
  }
  return all_ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-dominating set workbench"};
  app.require_subcommand(1);

  GraphSource gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a generated graph as an edge list");
  gen_src.add_options(gen);
  gen->add_option("--out", gen_out, "output file (default stdout)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run an executor and verify its output");
  run_args.src.add_options(run);
  run->add_option("--k", run_args.k, "domination radius")->required();
  run->add_option("--mode", run_args.mode, "central|sim")->check(CLI::IsMember({"central", "sim"}));
  run->add_option("--policy", run_args.policy, "literal|guarded")->check(CLI::IsMember({"literal", "guarded"}));
  run->add_option("--pulse-cap", run_args.pulse_cap, "sim: abort after this many pulses");
  run->add_option("--trace", run_args.trace, "central: step trace JSON; sim: pulse trace JSON lines");
  run->add_option("--out", run_args.out, "report file (default stdout)");
  run->add_flag("--check", run_args.check, "sim: also run the central executor and compare");

  GraphSource ver_src;
  std::uint64_t ver_k = 1;
  std::string ver_set;
  auto* ver = app.add_subcommand("verify", "check that a node set k-dominates a graph");
  ver_src.add_options(ver);
  ver->add_option("--k", ver_k, "domination radius")->required();
  ver->add_option("--set", ver_set, "ids (whitespace list, JSON array or run report)")->required();

  GraphSource ora_src;
  std::uint64_t ora_k = 1;
  std::size_t ora_cap = 16;
  auto* ora = app.add_subcommand("oracle", "exact minimum k-dominating set by exhaustive search");
  ora_src.add_options(ora);
  ora->add_option("--k", ora_k, "domination radius")->required();
  ora->add_option("--cap", ora_cap, "largest graph accepted");

  GraphSource cmp_src;
  std::uint64_t cmp_k = 1;
  std::string cmp_policy = "guarded";
  auto* cmp = app.add_subcommand("compare", "run both executors and compare forests and sets");
  cmp_src.add_options(cmp);
  cmp->add_option("--k", cmp_k, "domination radius")->required();
  cmp->add_option("--policy", cmp_policy, "literal|guarded")->check(CLI::IsMember({"literal", "guarded"}));

  std::size_t bench_max_n = 2000;
  std::size_t bench_seeds = 20;
  std::string bench_out;
  bool bench_calibrate = false;
  auto* bench = app.add_subcommand("bench", "sweep the corpus and emit one CSV row per instance");
  bench->add_option("--max-n", bench_max_n, "skip instances above this size");
  bench->add_option("--seeds", bench_seeds, "seeds per random cell");
  bench->add_option("--out", bench_out, "CSV file (default stdout)");
  bench->add_flag("--calibrate", bench_calibrate, "restrict to n <= 200 and print the fitted constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      write_text(gen_out, write_edge_list(gen_src.load()));
      return kOk;
    }
    if (*run) return cmd_run(run_args);
    if (*ver) return cmd_verify(ver_src, ver_k, ver_set);
    if (*ora) return cmd_oracle(ora_src, ora_k, ora_cap);
    if (*cmp) return cmd_compare(cmp_src, cmp_k, cmp_policy);
    if (*bench) return cmd_bench(bench_max_n, bench_seeds, bench_out, bench_calibrate);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RunConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kUsage;
}
