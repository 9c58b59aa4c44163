#include "kdom/protocol.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "kdom/chain.hpp"
#include "kdom/partition.hpp"

namespace kdom {

// ---------------------------------------------------------------------------
// Schedule

std::string Window::tag() const {
  switch (kind) {
    case WindowKind::Layer: return "s2/layer";
    case WindowKind::Flood: return "s2/flood";
    case WindowKind::Count: return "s2/count";
    case WindowKind::ClassSelect: return "s2/select";
    default: break;
  }
  std::string step;
  switch (kind) {
    case WindowKind::Height:
    case WindowKind::Status: step = "1a"; break;
    case WindowKind::Probe:
    case WindowKind::Report: step = "1b"; break;
    case WindowKind::Select: step = "1c"; break;
    case WindowKind::Wave2a: step = "2a"; break;
    case WindowKind::HasUpstream:
    case WindowKind::Prune:
    case WindowKind::Wave2b: step = "2b"; break;
    case WindowKind::Claim:
    case WindowKind::Reply:
    case WindowKind::ChainWave: step = iter > 0 ? "2e" : (maxima ? "2d" : "2c"); break;
    default: step = "2e"; break;
  }
  return "p" + std::to_string(phase) + "/" + step;
}

Schedule::Schedule(std::uint64_t k, NodeId id_bound, Policy policy)
    : k_(k), policy_(policy), phases_(num_phases(k)), iterations_(iteration_cap(id_bound)) {
  std::uint64_t t = 0;
  auto push = [&](WindowKind kind, int phase, int iter, bool maxima, std::uint64_t length) {
    full_.push_back(Window{kind, phase, iter, maxima, t, length});
    t += length;
  };
  for (int i = 0; i < phases_; ++i) {
    const std::uint64_t a = std::uint64_t{2} << i;
    const std::uint64_t b = phase_height_bound(i);
    const std::uint64_t hx = chain_height_bound(i);
    const std::uint64_t w = 2 * hx + 1;  // root-to-root route between chain members
    auto pass = [&](int iter, bool maxima) {
      push(WindowKind::Claim, i, iter, maxima, w + 1);
      push(WindowKind::Reply, i, iter, maxima, w + 1);
      push(WindowKind::ChainWave, i, iter, maxima, hx + 2);
    };
    push(WindowKind::Height, i, 0, false, 2 * a);
    push(WindowKind::Status, i, 0, false, b + 1);
    push(WindowKind::Probe, i, 0, false, 2);
    push(WindowKind::Report, i, 0, false, b + 1);
    select_index_.push_back(full_.size());
    push(WindowKind::Select, i, 0, false, a + b + 1);
    exit_tail_.push_back(stage2(t, b));
    push(WindowKind::Wave2a, i, 0, false, a + 1);
    push(WindowKind::HasUpstream, i, 0, false, 2 * a);
    push(WindowKind::Prune, i, 0, false, 2 * a);
    push(WindowKind::Wave2b, i, 0, false, a + 1);
    pass(0, false);
    pass(0, true);
    for (int j = 1; j <= iterations_; ++j) {
      push(WindowKind::PStar, i, j, false, w + 1);
      push(WindowKind::Gone, i, j, false, w + 1);
      push(WindowKind::EqWave, i, j, false, hx + 2);
      pass(j, false);
      pass(j, true);
    }
  }
  auto tail = stage2(t, phase_height_bound(phases_));
  full_.insert(full_.end(), tail.begin(), tail.end());
}

std::vector<Window> Schedule::stage2(std::uint64_t start, std::uint64_t height_bound) const {
  std::vector<Window> out;
  auto push = [&](WindowKind kind, std::uint64_t length) {
    out.push_back(Window{kind, -1, 0, false, start, length});
    start += length;
  };
  push(WindowKind::Layer, height_bound + 1);
  if (policy_ == Policy::Guarded) push(WindowKind::Flood, k_ + 1);
  push(WindowKind::Count, height_bound + 1);
  push(WindowKind::ClassSelect, height_bound + 1);
  return out;
}

const Window* Schedule::at(std::size_t i, std::optional<int> exit_phase) const {
  if (exit_phase) {
    const std::size_t sel = select_index_.at(static_cast<std::size_t>(*exit_phase));
    if (i <= sel) return &full_[i];
    const auto& tail = exit_tail_[static_cast<std::size_t>(*exit_phase)];
    const std::size_t j = i - sel - 1;
    return j < tail.size() ? &tail[j] : nullptr;
  }
  return i < full_.size() ? &full_[i] : nullptr;
}

std::uint64_t Schedule::total_pulses(std::optional<int> exit_phase) const {
  if (exit_phase) return exit_tail_.at(static_cast<std::size_t>(*exit_phase)).back().end();
  return full_.back().end();
}

std::uint64_t Schedule::longest() const {
  std::uint64_t best = total_pulses(std::nullopt);
  for (int i = 0; i < phases_; ++i) best = std::max(best, total_pulses(i));
  return best;
}

// ---------------------------------------------------------------------------
// Wire format

namespace {

enum class Kind : std::uint8_t {
  HeightProbe,
  HeightAck,
  Status,
  Halt,
  NeighborProbe,
  ProbeReport,
  RootRoute,
  NewRoot,
  DepthAssign,
  DominateFlood,
  ClassCount,
  ClassSelect,
};

enum class Inner : std::uint8_t { None, Link, HasUpstream, Absorb, Eliminate, PStar, Gone, Claim, Accept, Reject };

// A foreign tree reachable over graph edge (u, v), u in the reporting tree.
struct Candidate {
  NodeIndex root;
  NodeIndex u;
  NodeIndex v;
  friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

struct Msg {
  Kind kind{};
  Inner inner = Inner::None;
  std::uint64_t a = 0;  // budget, flag, label, root id or class, depending on kind
  NodeIndex origin = kNoNode;
  NodeIndex target = kNoNode;
  bool climbing = false;  // ROOT_ROUTE: already in the destination tree
  bool cross = false;     // ROOT_ROUTE: this hop was the inter-tree edge
  bool via_down = false;  // which route table to follow while descending
  bool on_path = false;   // NEW_ROOT: receiver lies on the re-rooting path
  bool attach = false;    // NEW_ROOT: receiver gains the sender as a child
  bool flag = false;
  std::array<std::optional<Candidate>, 2> cand;
  std::vector<std::uint32_t> vec;
  std::vector<bool> bits;

  std::size_t size_words() const {
    switch (kind) {
      case Kind::NeighborProbe:
      case Kind::ClassSelect: return 2;
      case Kind::ProbeReport: {
        std::size_t w = 0;
        for (const auto& c : cand) w += c ? 3 : 0;
        return std::max<std::size_t>(w, 1);
      }
      case Kind::RootRoute: return 4;
      case Kind::NewRoot: return 3;
      case Kind::DominateFlood: return vec.size() + 1;
      case Kind::ClassCount: return vec.size() + 1;
      default: return 1;
    }
  }

  const char* kind_name() const {
    switch (kind) {
      case Kind::HeightProbe: return "HEIGHT_PROBE";
      case Kind::HeightAck: return "HEIGHT_ACK";
      case Kind::Status: return "STATUS";
      case Kind::Halt: return "HALT";
      case Kind::NeighborProbe: return "NEIGHBOR_PROBE";
      case Kind::ProbeReport: return "PROBE_REPORT";
      case Kind::RootRoute: return "ROOT_ROUTE";
      case Kind::NewRoot: return "NEW_ROOT";
      case Kind::DepthAssign: return "DEPTH_ASSIGN";
      case Kind::DominateFlood: return "DOMINATE_FLOOD";
      case Kind::ClassCount: return "CLASS_COUNT";
      case Kind::ClassSelect: return "CLASS_SELECT";
    }
    return "?";
  }
};

Msg make(Kind kind, std::uint64_t a = 0) {
  Msg m;
  m.kind = kind;
  m.a = a;
  return m;
}

constexpr std::uint32_t kFar = std::numeric_limits<std::uint32_t>::max();

// ---------------------------------------------------------------------------
// Node

class PbNode {
 public:
  using Payload = Msg;
  using Out = Outbox<Msg>;

  PbNode(const Graph& g, const Schedule& s, NodeIndex self, std::uint64_t k, Policy policy)
      : g_(&g), sched_(&s), self_(self), k_(k), policy_(policy), my_root_(self) {}

  void on_pulse(std::uint64_t pulse, std::span<const Delivered<Msg>> inbox, Out& out) {
    for (const auto& d : inbox) handle(d.from, d.payload, out);
    if (current_ && current_->kind == WindowKind::Flood && flood_dirty_) {
      flood_dirty_ = false;
      for (NodeIndex w : intra_) out.send(w, flood_msg());
    }
    const Window* next = sched_->at(next_index_, exit_phase_);
    if (next && next->start == pulse) {
      current_ = next;
      ++next_index_;
      start_window(*next, out);
    }
  }

  bool terminated() const { return terminated_; }
  const Window* window() const { return current_; }
  std::optional<int> exit_phase() const { return exit_phase_; }
  NodeIndex my_root() const { return my_root_; }
  NodeIndex parent() const { return parent_; }
  bool in_d() const { return in_d_; }
  const TreeChoice& choice() const { return choice_; }

 private:
  bool is_root() const { return parent_ == kNoNode; }

  void to_children(const Msg& m, Out& out) {
    for (NodeIndex c : children_) out.send(c, m);
  }

  // -- window starts --------------------------------------------------------

  void start_window(const Window& w, Out& out) {
    const bool root = is_root();
    switch (w.kind) {
      case WindowKind::Height: {
        reset_phase(w.phase);
        if (!root) break;
        pending_acks_ = children_.size();
        all_acked_ = children_.empty();
        to_children(make(Kind::HeightProbe, (std::uint64_t{2} << w.phase) - 1), out);
        break;
      }
      case WindowKind::Status:
        if (!root) break;
        active_ = tree_active_ = all_acked_;
        to_children(make(Kind::Status, active_), out);
        break;
      case WindowKind::Probe: {
        Msg m = make(Kind::NeighborProbe);
        m.origin = my_root_;
        m.flag = tree_active_;
        for (NodeIndex v : g_->neighbors(self_)) out.send(v, m);
        break;
      }
      case WindowKind::Report:
        pending_reports_ = children_.size();
        if (children_.empty() && !root) send_report(out);
        break;
      case WindowKind::Select:
        if (!root) break;
        if (!best_[0] && !best_[1]) {
          exit_phase_ = w.phase;
          to_children(make(Kind::Halt), out);
        } else if (active_) {
          const int cat = best_[0] ? 0 : 1;
          down_ = best_[cat]->root;
          down_active_ = cat == 0;
          descend_link(cat, self_, out);
        }
        break;
      case WindowKind::Wave2a:
        if (!root || !active_ || !down_) break;
        if (down_active_) in_x_ = true;
        else start_merge(*down_, *down_, out);
        break;
      case WindowKind::HasUpstream:
        if (root && in_x_) route(Inner::HasUpstream, *down_, !ups_.empty(), out);
        break;
      case WindowKind::Prune:
        if (root && in_x_ && ups_.size() > 1) {
          const std::vector<NodeIndex> others(std::next(ups_.begin()), ups_.end());
          for (NodeIndex y : others) {
            route(has_upstream_.at(y) ? Inner::Eliminate : Inner::Absorb, y, 0, out);
            ups_.erase(y);
          }
        }
        break;
      case WindowKind::Wave2b:
        if (!root || !in_x_) break;
        if (merge_plan_) {
          start_merge(merge_plan_->first, merge_plan_->second, out);
          leave_chain();
          break;
        }
        chain_down_ = down_;
        if (!ups_.empty()) chain_up_ = *ups_.begin();
        label_ = g_->id(self_);
        nbr_label_.clear();
        for (NodeIndex n : chain_neighbors()) nbr_label_[n] = g_->id(n);
        break;
      case WindowKind::Claim:
        if (root && in_x_) start_claims(w, out);
        break;
      case WindowKind::Reply:
        if (root && in_x_ && !claimers_.empty()) send_replies(w, out);
        break;
      case WindowKind::ChainWave:
      case WindowKind::EqWave:
        if (root && in_x_) finish_pass(out);
        break;
      case WindowKind::PStar:
        if (root && in_x_) start_pstar(w, out);
        break;
      case WindowKind::Gone:
        if (root && in_x_) send_equal_gone(out);
        break;
      case WindowKind::Layer:
        if (!root) break;
        cls_ = 0;
        to_children(make(Kind::DepthAssign, 1 % (k_ + 1)), out);
        break;
      case WindowKind::Flood: {
        dist_.assign(k_ + 1, kFar);
        dist_[cls_] = 0;
        intra_.clear();
        for (NodeIndex v : g_->neighbors(self_)) out.send(v, flood_msg());
        break;
      }
      case WindowKind::Count: {
        counts_.assign(k_ + 1, 0);
        counts_[cls_] = 1;
        dominated_.assign(k_ + 1, true);
        if (policy_ == Policy::Guarded) {
          for (std::size_t l = 0; l <= k_; ++l) dominated_[l] = dist_[l] <= k_;
        }
        pending_counts_ = children_.size();
        if (children_.empty() && !root) send_counts(out);
        break;
      }
      case WindowKind::ClassSelect:
        if (root) select_class(out);
        break;
    }
  }

  void reset_phase(int phase) {
    phase_ = phase;
    best_ = {};
    best_from_ = {kNoNode, kNoNode};
    route_down_next_ = kNoNode;
    route_down_cross_ = false;
    up_next_.clear();
    down_.reset();
    down_active_ = false;
    ups_.clear();
    has_upstream_.clear();
    in_x_ = false;
    merge_plan_.reset();
    leave_chain();
    pending_acks_ = 0;
    all_acked_ = false;
    active_ = tree_active_ = false;
  }

  // -- routing --------------------------------------------------------------

  std::pair<NodeIndex, bool> route_hop(bool via_down, NodeIndex key) const {
    if (via_down) return {route_down_next_, route_down_cross_};
    auto it = up_next_.find(key);
    if (it == up_next_.end()) throw SimError("no route toward meta-node " + std::to_string(g_->id(key)));
    return it->second;
  }

  // From this root toward the root of meta-node `target`.
  void route(Inner inner, NodeIndex target, std::uint64_t value, Out& out) {
    Msg m = make(Kind::RootRoute, value);
    m.inner = inner;
    m.origin = self_;
    m.target = target;
    m.via_down = down_ && *down_ == target;
    descend(m, out);
  }

  void descend(Msg m, Out& out) {
    auto [next, cross] = route_hop(m.via_down, m.target);
    m.climbing = cross;
    m.cross = cross;
    out.send(next, m);
  }

  void descend_link(int cat, NodeIndex origin, Out& out) {
    const Candidate& c = *best_[cat];
    Msg m = make(Kind::RootRoute, static_cast<std::uint64_t>(cat));
    m.inner = Inner::Link;
    m.origin = origin;
    m.target = c.root;
    if (best_from_[cat] == self_) {
      route_down_next_ = c.v;
      route_down_cross_ = true;
      m.climbing = m.cross = true;
      out.send(c.v, m);
    } else {
      route_down_next_ = best_from_[cat];
      route_down_cross_ = false;
      out.send(best_from_[cat], m);
    }
  }

  void climb(NodeIndex from, Msg m, Out& out) {
    if (m.inner == Inner::Link) up_next_[m.origin] = {from, m.cross};
    if (!is_root()) {
      m.cross = false;
      out.send(parent_, m);
      return;
    }
    if (m.target != self_) throw SimError("routed message reached the wrong root");
    const NodeIndex o = m.origin;
    switch (m.inner) {
      case Inner::Link: ups_.insert(o); break;
      case Inner::HasUpstream: has_upstream_[o] = m.a != 0; break;
      case Inner::Absorb: merge_plan_ = {o, o}; break;
      case Inner::Eliminate: down_.reset(); break;
      case Inner::PStar: nbr_pstar_[o] = static_cast<unsigned>(m.a); break;
      case Inner::Gone:
      case Inner::Reject: departed_[o] = static_cast<NodeIndex>(m.a); break;
      case Inner::Claim: claimers_.emplace_back(o, m.a); break;
      case Inner::Accept: formed_ = true; break;
      case Inner::None: break;
    }
  }

  // -- merging --------------------------------------------------------------

  // Re-roots this tree at the endpoint of the edge shared with `partner`
  // and hangs it there; every member learns the new root id.
  void start_merge(NodeIndex partner, NodeIndex into, Out& out) {
    merge_step(into, down_ && *down_ == partner, partner, std::nullopt, out);
  }

  void merge_step(NodeIndex new_root, bool via_down, NodeIndex key, std::optional<NodeIndex> old_parent,
                  Out& out) {
    my_root_ = new_root;
    auto [next, cross] = route_hop(via_down, key);
    Msg wave = make(Kind::NewRoot, new_root);
    for (NodeIndex c : children_) {
      if (cross || c != next) out.send(c, wave);
    }
    if (!cross) children_.erase(next);
    if (old_parent) children_.insert(*old_parent);
    parent_ = next;
    Msg m = make(Kind::NewRoot, new_root);
    if (cross) {
      m.attach = true;
    } else {
      m.on_path = true;
      m.via_down = via_down;
      m.target = key;
    }
    out.send(next, m);
  }

  // -- chain passes ---------------------------------------------------------

  std::vector<NodeIndex> chain_neighbors() const {
    ChainLinks links{chain_down_, chain_up_};
    return kdom::chain_neighbors(links);
  }

  void leave_chain() {
    in_x_ = false;
    chain_down_.reset();
    chain_up_.reset();
  }

  void start_claims(const Window& w, Out& out) {
    claimers_.clear();
    departed_.clear();
    formed_ = false;
    merge_plan_.reset();
    const bool use_pstar = w.iter > 0;
    pass_label_ = use_pstar ? pstar_ : label_;
    bool extreme = true;
    for (NodeIndex n : chain_neighbors()) {
      const Label other = use_pstar ? nbr_pstar_.at(n) : nbr_label_.at(n);
      extreme = extreme && (w.maxima ? pass_label_ > other : pass_label_ < other);
    }
    if (!extreme) return;
    for (NodeIndex n : chain_neighbors()) route(Inner::Claim, n, pass_label_, out);
  }

  void send_replies(const Window& w, Out& out) {
    auto better = [&](const std::pair<NodeIndex, Label>& a, const std::pair<NodeIndex, Label>& b) {
      if (a.second != b.second) return w.maxima ? a.second > b.second : a.second < b.second;
      return a.first < b.first;
    };
    const NodeIndex winner = std::min_element(claimers_.begin(), claimers_.end(), better)->first;
    std::set<NodeIndex> claimed_by;
    for (const auto& c : claimers_) claimed_by.insert(c.first);
    for (NodeIndex n : chain_neighbors()) {
      if (n == winner) route(Inner::Accept, n, 0, out);
      else route(claimed_by.count(n) ? Inner::Reject : Inner::Gone, n, winner, out);
    }
    merge_plan_ = {winner, winner};
  }

  void start_pstar(const Window& w, Out& out) {
    if (w.iter > 1) {
      label_ = pstar_;
      nbr_label_.clear();
      for (NodeIndex n : chain_neighbors()) nbr_label_[n] = nbr_pstar_.at(n);
    }
    std::optional<Label> up, down;
    if (chain_up_) up = nbr_label_.at(*chain_up_) + 1;
    if (chain_down_) down = nbr_label_.at(*chain_down_) + 1;
    const Label me = label_ + 1;
    const auto v = compute_virtual_labels(me, up, down);
    pstar_ = compute_pstar(v.minus, me, v.plus).pstar;
    nbr_pstar_.clear();
    departed_.clear();
    merge_plan_.reset();
    formed_ = false;
    for (NodeIndex n : chain_neighbors()) route(Inner::PStar, n, pstar_, out);
  }

  void send_equal_gone(Out& out) {
    const bool joins = chain_down_ && nbr_pstar_.at(*chain_down_) == pstar_;
    formed_ = !joins && chain_up_ && nbr_pstar_.at(*chain_up_) == pstar_;
    if (!joins && !formed_) return;
    const NodeIndex into = joins ? *chain_down_ : self_;
    if (joins) merge_plan_ = {into, into};
    for (NodeIndex n : chain_neighbors()) {
      if (nbr_pstar_.at(n) != pstar_) route(Inner::Gone, n, into, out);
    }
  }

  void finish_pass(Out& out) {
    if (merge_plan_) {
      start_merge(merge_plan_->first, merge_plan_->second, out);
      merge_plan_.reset();
      leave_chain();
      return;
    }
    if (formed_) {
      leave_chain();
      return;
    }
    const auto nbrs = chain_neighbors();
    const bool stranded =
        !nbrs.empty() && std::all_of(nbrs.begin(), nbrs.end(), [&](NodeIndex n) { return departed_.count(n) > 0; });
    if (stranded) {
      const NodeIndex partner = chain_down_ && departed_.count(*chain_down_) ? *chain_down_ : *chain_up_;
      start_merge(partner, departed_.at(partner), out);
      leave_chain();
      return;
    }
    if (chain_down_ && departed_.count(*chain_down_)) chain_down_.reset();
    if (chain_up_ && departed_.count(*chain_up_)) chain_up_.reset();
  }

  // -- second stage ---------------------------------------------------------

  Msg flood_msg() const {
    Msg m = make(Kind::DominateFlood);
    m.origin = my_root_;
    m.vec = dist_;
    return m;
  }

  void send_counts(Out& out) {
    Msg m = make(Kind::ClassCount);
    m.vec = counts_;
    m.bits = dominated_;
    out.send(parent_, m);
  }

  void select_class(Out& out) {
    std::size_t tree_size = 0;
    for (auto c : counts_) tree_size += c;
    std::tuple<std::size_t, std::size_t, bool> best{counts_[0], 0, false};
    for (std::size_t l = 1; l <= k_; ++l) {
      if (policy_ == Policy::Literal) {
        if (counts_[l] < std::get<0>(best)) best = {counts_[l], l, false};
        continue;
      }
      std::tuple<std::size_t, std::size_t, bool> plain{counts_[l], l, false};
      if (plain < best && counts_[l] > 0 && dominated_[l]) best = plain;
      std::tuple<std::size_t, std::size_t, bool> aug{counts_[l] + 1, l, true};
      if (aug < best) best = aug;
    }
    auto [size, ell, aug] = best;
    choice_ = TreeChoice{ell, aug, size, tree_size};
    Msg m = make(Kind::ClassSelect, ell);
    m.flag = aug;
    in_d_ = cls_ == ell || aug;
    to_children(m, out);
    terminated_ = true;
  }

  // -- message handling -----------------------------------------------------

  void send_report(Out& out) {
    Msg m = make(Kind::ProbeReport);
    m.cand = best_;
    out.send(parent_, m);
  }

  void handle(NodeIndex from, const Msg& m, Out& out) {
    switch (m.kind) {
      case Kind::HeightProbe:
        if (m.a == 0) break;
        if (children_.empty()) {
          out.send(parent_, make(Kind::HeightAck));
        } else {
          pending_acks_ = children_.size();
          to_children(make(Kind::HeightProbe, m.a - 1), out);
        }
        break;
      case Kind::HeightAck:
        if (--pending_acks_ > 0) break;
        if (is_root()) all_acked_ = true;
        else out.send(parent_, make(Kind::HeightAck));
        break;
      case Kind::Status:
        tree_active_ = m.a != 0;
        to_children(m, out);
        break;
      case Kind::Halt:
        exit_phase_ = phase_;
        to_children(m, out);
        break;
      case Kind::NeighborProbe: {
        if (m.origin == my_root_) break;
        const int cat = m.flag ? 0 : 1;
        Candidate c{m.origin, self_, from};
        if (!best_[cat] || c < *best_[cat]) {
          best_[cat] = c;
          best_from_[cat] = self_;
        }
        break;
      }
      case Kind::ProbeReport:
        for (int cat = 0; cat < 2; ++cat) {
          if (m.cand[cat] && (!best_[cat] || *m.cand[cat] < *best_[cat])) {
            best_[cat] = m.cand[cat];
            best_from_[cat] = from;
          }
        }
        if (--pending_reports_ == 0 && !is_root()) send_report(out);
        break;
      case Kind::RootRoute:
        if (m.climbing) climb(from, m, out);
        else if (m.inner == Inner::Link) descend_link(static_cast<int>(m.a), m.origin, out);
        else descend(m, out);
        break;
      case Kind::NewRoot:
        if (m.attach) {
          children_.insert(from);
        } else if (m.on_path) {
          merge_step(static_cast<NodeIndex>(m.a), m.via_down, m.target, from, out);
        } else {
          my_root_ = static_cast<NodeIndex>(m.a);
          to_children(m, out);
        }
        break;
      case Kind::DepthAssign:
        cls_ = static_cast<std::size_t>(m.a);
        to_children(make(Kind::DepthAssign, (m.a + 1) % (k_ + 1)), out);
        break;
      case Kind::DominateFlood:
        if (m.origin != my_root_) break;
        if (std::find(intra_.begin(), intra_.end(), from) == intra_.end()) intra_.push_back(from);
        for (std::size_t l = 0; l <= k_; ++l) {
          if (m.vec[l] == kFar || m.vec[l] + 1 >= dist_[l]) continue;
          dist_[l] = m.vec[l] + 1;
          if (dist_[l] < k_) flood_dirty_ = true;
        }
        break;
      case Kind::ClassCount:
        for (std::size_t l = 0; l <= k_; ++l) {
          counts_[l] += m.vec[l];
          dominated_[l] = dominated_[l] && m.bits[l];
        }
        if (--pending_counts_ == 0 && !is_root()) send_counts(out);
        break;
      case Kind::ClassSelect:
        in_d_ = cls_ == m.a;
        to_children(m, out);
        terminated_ = true;
        break;
    }
  }

  const Graph* g_;
  const Schedule* sched_;
  NodeIndex self_;
  std::uint64_t k_;
  Policy policy_;

  std::size_t next_index_ = 0;
  const Window* current_ = nullptr;
  std::optional<int> exit_phase_;
  int phase_ = 0;
  bool terminated_ = false;

  // Tree links.
  NodeIndex my_root_;
  NodeIndex parent_ = kNoNode;
  std::set<NodeIndex> children_;

  // Step 1.
  std::size_t pending_acks_ = 0;
  bool all_acked_ = false;
  bool tree_active_ = false;
  std::size_t pending_reports_ = 0;
  std::array<std::optional<Candidate>, 2> best_;  // [active, inactive]
  std::array<NodeIndex, 2> best_from_{kNoNode, kNoNode};

  // Routes: toward the downstream tree, and toward each upstream tree.
  NodeIndex route_down_next_ = kNoNode;
  bool route_down_cross_ = false;
  std::map<NodeIndex, std::pair<NodeIndex, bool>> up_next_;

  // Root ledger.
  bool active_ = false;
  std::optional<NodeIndex> down_;
  bool down_active_ = false;
  std::set<NodeIndex> ups_;
  std::map<NodeIndex, bool> has_upstream_;
  bool in_x_ = false;
  std::optional<std::pair<NodeIndex, NodeIndex>> merge_plan_;  // (partner, into)
  std::optional<NodeIndex> chain_down_, chain_up_;
  Label label_ = 0;
  std::map<NodeIndex, Label> nbr_label_;
  unsigned pstar_ = 0;
  std::map<NodeIndex, unsigned> nbr_pstar_;
  Label pass_label_ = 0;
  std::vector<std::pair<NodeIndex, Label>> claimers_;
  std::map<NodeIndex, NodeIndex> departed_;  // neighbor -> node it joined
  bool formed_ = false;

  // Second stage.
  std::size_t cls_ = 0;
  std::vector<std::uint32_t> dist_;
  std::vector<NodeIndex> intra_;
  bool flood_dirty_ = false;
  std::vector<std::uint32_t> counts_;
  std::vector<bool> dominated_;
  std::size_t pending_counts_ = 0;
  bool in_d_ = false;
  TreeChoice choice_;
};

std::vector<std::string> step_names(const Window& w, std::optional<int> exit_phase, int iterations) {
  switch (w.kind) {
    case WindowKind::Select: return {exit_phase && *exit_phase == w.phase ? "exit" : "1"};
    case WindowKind::Wave2a: return {"2a"};
    case WindowKind::Wave2b: return {"2b"};
    case WindowKind::ChainWave:
      if (w.iter == 0) return {w.maxima ? "2d" : "2c"};
      if (!w.maxima) return {};
      if (w.iter == iterations) return {"2e." + std::to_string(w.iter), "end"};
      return {"2e." + std::to_string(w.iter)};
    default: return {};
  }
}

}  // namespace

DistributedResult run_distributed(const Graph& g, std::uint64_t k, Policy policy, const DistributedOptions& options) {
  check_run_config(g, k);
  const Schedule sched(k, g.max_id() + 1, policy);
  std::vector<PbNode> nodes;
  nodes.reserve(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    nodes.emplace_back(g, sched, static_cast<NodeIndex>(v), k, policy);
  }

  DistributedResult result;
  KernelOptions ko;
  ko.pulse_cap = options.pulse_cap.value_or(sched.longest() + 8);
  ko.shuffle_seed = options.shuffle_seed;
  ko.trace = options.trace;
  ko.section = [&](std::uint64_t) {
    const Window* w = nodes[0].window();
    return w ? w->tag() : std::string("idle");
  };
  if (options.snapshots) {
    ko.after_pulse = [&](std::uint64_t pulse) {
      const Window* w = nodes[0].window();
      if (!w || pulse + 1 != w->end()) return;
      for (const auto& name : step_names(*w, nodes[0].exit_phase(), sched.label_iterations())) {
        DistSnapshot s;
        s.phase = w->phase;
        s.step = name;
        for (const auto& node : nodes) {
          s.root_of.push_back(node.my_root());
          s.parent.push_back(node.parent());
        }
        result.snapshots.push_back(std::move(s));
      }
    };
  }
  result.metrics = run_kernel(g, nodes, ko);

  std::vector<NodeIndex> parents;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto& node = nodes[v];
    if (!node.terminated()) throw SimError("node did not terminate");
    parents.push_back(node.parent());
    if (node.in_d()) result.dominating_set.members.push_back(static_cast<NodeIndex>(v));
    if (node.parent() == kNoNode) result.dominating_set.per_tree[static_cast<NodeIndex>(v)] = node.choice();
  }
  result.forest = RootedForest::from_parents(parents);
  result.forest.validate(g);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].my_root() != result.forest.root_of(static_cast<NodeIndex>(v))) {
      throw SimError("my_root disagrees with the parent pointers at node " + std::to_string(g.id(static_cast<NodeIndex>(v))));
    }
  }
  result.early_exit = nodes[0].exit_phase().has_value();
  result.final_phase = result.early_exit ? *nodes[0].exit_phase() : sched.phases();
  return result;
}

}  // namespace kdom
