// sim_kernel.hpp - lockstep synchronous message-passing engine.
//
// At pulse t every node that has not terminated (or has mail) is invoked
// once with the envelopes sent to it at pulse t-1, ordered by sender. The
// run ends once every node reports termination and nothing is in flight.
// Sends are buffered per sender and merged in ascending sender order, so the
// evaluation order inside a pulse cannot influence the outcome; the shuffled
// mode exists to check exactly that.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdom/graph.hpp"

namespace kdom {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Payload>
struct Delivered {
  NodeIndex from;
  Payload payload;
};

// Stable sort by sender; payloads from the same sender keep send order.
template <class Payload>
void deliver_order(std::vector<Delivered<Payload>>& inbox) {
  std::stable_sort(inbox.begin(), inbox.end(),
                   [](const Delivered<Payload>& a, const Delivered<Payload>& b) { return a.from < b.from; });
}

template <class Payload>
class Outbox {
 public:
  Outbox(const Graph& g, NodeIndex self) : g_(g), self_(self) {}

  void send(NodeIndex to, Payload payload) {
    if (!g_.has_edge(self_, to)) {
      throw SimError("node " + std::to_string(g_.id(self_)) + " sent to non-neighbor " +
                     std::to_string(to < g_.node_count() ? g_.id(to) : to));
    }
    sends_.push_back({to, std::move(payload)});
  }

  NodeIndex self() const noexcept { return self_; }
  std::vector<std::pair<NodeIndex, Payload>>& sends() noexcept { return sends_; }

 private:
  const Graph& g_;
  NodeIndex self_;
  std::vector<std::pair<NodeIndex, Payload>> sends_;
};

struct SectionCounters {
  std::uint64_t pulses = 0;
  std::uint64_t messages = 0;
  std::uint64_t words = 0;
  friend bool operator==(const SectionCounters&, const SectionCounters&) = default;
};

struct RunMetrics {
  std::uint64_t pulses = 0;
  std::uint64_t messages = 0;
  std::uint64_t words = 0;
  std::map<std::string, SectionCounters> per_phase;
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct KernelOptions {
  std::uint64_t pulse_cap = 1'000'000;
  std::optional<std::uint64_t> shuffle_seed;  // debug: permute evaluation order
  std::ostream* trace = nullptr;              // JSON lines, one per pulse
  std::function<std::string(std::uint64_t)> section;  // accounting tag per pulse
  std::function<void(std::uint64_t)> after_pulse;
};

// Process requirements:
//   using Payload = ...;   Payload::size_words() >= 1, Payload::kind_name()
//   void on_pulse(std::uint64_t, std::span<const Delivered<Payload>>, Outbox<Payload>&);
//   bool terminated() const;
template <class Process>
RunMetrics run_kernel(const Graph& g, std::vector<Process>& nodes, const KernelOptions& opt = {}) {
  using Payload = typename Process::Payload;
  const std::size_t n = g.node_count();
  if (nodes.size() != n) throw SimError("one process per node required");

  RunMetrics metrics;
  std::vector<std::vector<Delivered<Payload>>> inbox(n), next(n);
  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::optional<std::mt19937_64> rng;
  if (opt.shuffle_seed) rng.emplace(*opt.shuffle_seed);
  std::vector<std::vector<std::pair<NodeIndex, Payload>>> outgoing(n);
  std::size_t in_flight = 0;

  for (std::uint64_t pulse = 0;; ++pulse) {
    bool all_done = in_flight == 0 &&
                    std::all_of(nodes.begin(), nodes.end(), [](const Process& p) { return p.terminated(); });
    if (all_done) break;
    if (pulse >= opt.pulse_cap) throw SimError("pulse cap of " + std::to_string(opt.pulse_cap) + " exceeded");
    if (rng) std::shuffle(order.begin(), order.end(), *rng);

    for (NodeIndex v : order) {
      if (nodes[v].terminated() && inbox[v].empty()) continue;
      deliver_order(inbox[v]);
      Outbox<Payload> out(g, v);
      nodes[v].on_pulse(pulse, std::span<const Delivered<Payload>>(inbox[v]), out);
      outgoing[v] = std::move(out.sends());
      inbox[v].clear();
    }

    SectionCounters step;
    step.pulses = 1;
    in_flight = 0;
    bool trace_first = true;
    if (opt.trace) *opt.trace << "{\"pulse\":" << pulse << ",\"sends\":[";
    for (NodeIndex v = 0; v < n; ++v) {
      for (auto& [to, payload] : outgoing[v]) {
        ++step.messages;
        step.words += payload.size_words();
        if (opt.trace) {
          *opt.trace << (trace_first ? "" : ",") << "{\"from\":" << g.id(v) << ",\"to\":" << g.id(to)
                     << ",\"kind\":\"" << payload.kind_name() << "\"}";
          trace_first = false;
        }
        next[to].push_back({v, std::move(payload)});
        ++in_flight;
      }
      outgoing[v].clear();
    }
    if (opt.trace) *opt.trace << "]}\n";
    std::swap(inbox, next);

    metrics.pulses += 1;
    metrics.messages += step.messages;
    metrics.words += step.words;
    if (opt.section) {
      auto& s = metrics.per_phase[opt.section(pulse)];
      s.pulses += step.pulses;
      s.messages += step.messages;
      s.words += step.words;
    }
    if (opt.after_pulse) opt.after_pulse(pulse);
  }
  return metrics;
}

}  // namespace kdom
