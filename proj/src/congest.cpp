#include "cbt/congest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "cbt/error.hpp"
#include "cbt/models.hpp"

namespace cbt {

namespace {

/// Bits needed for any value in [0, x].
std::uint32_t width(std::uint64_t x) { return std::max<std::uint32_t>(1, std::bit_width(x)); }

std::uint32_t id_bits(std::uint32_t k) { return std::max<std::uint32_t>(1, ceil_log2(k)); }

}  // namespace

std::uint32_t channel_bits_for(std::uint32_t n, std::uint32_t k) {
  return RoundConstants::channel_factor *
         (ceil_log2(std::max<std::uint32_t>(n, 2)) + ceil_log2(std::max<std::uint32_t>(k, 2)));
}

Network::Network(ComparisonGraph topology, std::vector<std::uint64_t> ids)
    : topology_(std::move(topology)), ids_(std::move(ids)) {
  const std::uint32_t k = topology_.vertex_count();
  if (k == 0) throw InvalidNetwork("network needs at least one node");
  if (ids_.empty()) {
    ids_.resize(k);
    std::iota(ids_.begin(), ids_.end(), 0);
  }
  if (ids_.size() != k)
    throw InvalidNetwork("expected " + std::to_string(k) + " identifiers, got " +
                         std::to_string(ids_.size()));
  std::vector<bool> seen(k, false);
  for (auto id : ids_) {
    if (id >= k || seen[id]) throw InvalidNetwork("identifiers must be a permutation of 0..k-1");
    seen[id] = true;
  }
  const auto adj = topology_.adjacency();
  offsets_.assign(k + 1, 0);
  for (Vertex v = 0; v < k; ++v) offsets_[v + 1] = offsets_[v] + adj[v].size();
  nbrs_.reserve(offsets_[k]);
  for (const auto& a : adj) nbrs_.insert(nbrs_.end(), a.begin(), a.end());
  const auto d = cbt::diameter(topology_);
  if (!d) throw InvalidNetwork("network is disconnected");
  diameter_ = *d;
}

Network make_path_network(std::uint32_t k) {
  if (k == 1) return Network(ComparisonGraph(1, {}));
  return Network(make_path(k));
}

Network make_cycle_network(std::uint32_t k) { return Network(make_cycle(k)); }

Network make_star_network(std::uint32_t k) {
  if (k < 2) throw InvalidNetwork("star network needs k >= 2");
  return Network(make_star(k - 1));
}

Network make_clique_network(std::uint32_t k) {
  if (k == 1) return Network(ComparisonGraph(1, {}));
  return Network(make_clique(k));
}

Network make_random_network(std::uint32_t k, double extra_p, std::uint64_t seed) {
  std::vector<std::uint64_t> ids(k);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 engine(seed ^ 0x9e3779b97f4a7c15ull);
  std::shuffle(ids.begin(), ids.end(), engine);
  return Network(make_random_connected(k, extra_p, seed), std::move(ids));
}

ReplaySummary replay(const Network& net, const std::vector<TranscriptEvent>& events,
                     std::uint32_t channel_bits) {
  ReplaySummary out;
  std::map<std::tuple<std::uint32_t, Vertex, Vertex>, std::uint32_t> load;
  for (const auto& e : events) {
    out.rounds = std::max(out.rounds, e.round);
    const auto nb = e.from < net.k() ? net.neighbors(e.from) : std::span<const Vertex>{};
    if (!std::binary_search(nb.begin(), nb.end(), e.to)) out.within_budget = false;
    auto& l = load[{e.round, e.from, e.to}];
    l += e.bits;
    out.max_edge_bits = std::max(out.max_edge_bits, l);
  }
  if (out.max_edge_bits > channel_bits) out.within_budget = false;
  return out;
}

namespace {

/// Synchronous round clock with a per-directed-edge bit meter.
class Session {
 public:
  Session(const Network& net, std::uint32_t n, bool record)
      : net_(net),
        channel_(channel_bits_for(n, net.k())),
        used_(net.directed_edges(), 0),
        stamp_(net.directed_edges(), 0),
        record_(record) {}

  void begin_phase(std::string name) {
    phase_ = std::move(name);
    phase_start_ = round_;
  }

  void end_phase() { phases_.push_back({phase_, round_ - phase_start_}); }

  void next_round() { ++round_; }

  void send_slot(Vertex from, std::size_t slot, std::uint32_t bits) {
    const auto e = net_.edge_index(from, slot);
    if (stamp_[e] != round_) {
      stamp_[e] = round_;
      used_[e] = 0;
    }
    used_[e] += bits;
    if (used_[e] > channel_)
      throw ModelViolation("edge " + std::to_string(from) + "->" +
                           std::to_string(net_.neighbors(from)[slot]) + " carries " +
                           std::to_string(used_[e]) + " bits in round " + std::to_string(round_) +
                           " (channel " + std::to_string(channel_) + ")");
    max_bits_ = std::max(max_bits_, used_[e]);
    if (record_) events_.push_back({round_, from, net_.neighbors(from)[slot], bits, phase_});
  }

  void send(Vertex from, Vertex to, std::uint32_t bits) {
    const auto nb = net_.neighbors(from);
    const auto it = std::lower_bound(nb.begin(), nb.end(), to);
    if (it == nb.end() || *it != to)
      throw ModelViolation("node " + std::to_string(from) + " is not adjacent to " + std::to_string(to));
    send_slot(from, static_cast<std::size_t>(it - nb.begin()), bits);
  }

  std::uint32_t round() const { return round_; }
  std::uint32_t channel() const { return channel_; }

  RoundReport report() const {
    RoundReport r;
    r.rounds = round_;
    r.phases = phases_;
    r.max_edge_bits = max_bits_;
    r.channel_bits = channel_;
    if (record_) r.transcript = events_;
    return r;
  }

 private:
  const Network& net_;
  std::uint32_t channel_;
  std::vector<std::uint32_t> used_;
  std::vector<std::uint32_t> stamp_;
  bool record_;
  std::uint32_t round_ = 0;
  std::uint32_t max_bits_ = 0;
  std::string phase_;
  std::uint32_t phase_start_ = 0;
  std::vector<PhaseRounds> phases_;
  std::vector<TranscriptEvent> events_;
};

BfsTree bfs_phase(Session& session, const Network& net) {
  const std::uint32_t k = net.k();
  const auto ids = net.ids();
  const std::uint32_t bits = 3 * id_bits(k);
  std::vector<std::uint64_t> best(ids.begin(), ids.end());
  std::vector<std::uint32_t> dist(k, 0);
  std::vector<Vertex> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> changed(k, true);

  session.begin_phase("bfs");
  for (;;) {
    bool any = false;
    for (Vertex v = 0; v < k && !any; ++v) any = changed[v] && !net.neighbors(v).empty();
    if (!any) break;
    session.next_round();
    // Best offer each node hears this round: highest id, then shortest
    // distance, then the sender with the smallest id.
    struct Offer {
      std::uint64_t best = 0;
      std::uint32_t dist = 0;
      Vertex from = 0;
      bool set = false;
    };
    std::vector<Offer> offer(k);
    for (Vertex v = 0; v < k; ++v) {
      if (!changed[v]) continue;
      const auto nbrs = net.neighbors(v);
      for (std::size_t s = 0; s < nbrs.size(); ++s) {
        session.send_slot(v, s, bits);
        const Offer o{best[v], dist[v] + 1, v, true};
        Offer& cur = offer[nbrs[s]];
        if (!cur.set || o.best > cur.best ||
            (o.best == cur.best && (o.dist < cur.dist || (o.dist == cur.dist && ids[v] < ids[cur.from]))))
          cur = o;
      }
    }
    for (Vertex u = 0; u < k; ++u) {
      const Offer& o = offer[u];
      changed[u] = o.set && (o.best > best[u] || (o.best == best[u] && o.dist < dist[u]));
      if (changed[u]) {
        best[u] = o.best;
        dist[u] = o.dist;
        parent[u] = o.from;
      }
    }
  }
  session.end_phase();

  BfsTree tree;
  tree.parent.assign(k, std::nullopt);
  tree.children.assign(k, {});
  tree.depth = dist;
  tree.subtree_height.assign(k, 0);
  for (Vertex v = 0; v < k; ++v) {
    if (parent[v] == v) {
      tree.root = v;
    } else {
      tree.parent[v] = parent[v];
      tree.children[parent[v]].push_back(v);
    }
  }
  for (auto& c : tree.children)
    std::sort(c.begin(), c.end(), [&](Vertex a, Vertex b) { return ids[a] < ids[b]; });
  std::vector<Vertex> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return dist[a] > dist[b]; });
  for (Vertex v : order)
    if (tree.parent[v])
      tree.subtree_height[*tree.parent[v]] =
          std::max(tree.subtree_height[*tree.parent[v]], tree.subtree_height[v] + 1);
  return tree;
}

/// Sums per-node fields up the tree; node v sends in round
/// subtree_height(v) + 1 of the phase. Fields with a cap saturate there.
/// Returns every node's subtree aggregate.
std::vector<std::vector<std::uint64_t>> convergecast(Session& session, const BfsTree& tree,
                                                     std::vector<std::vector<std::uint64_t>> own,
                                                     const std::vector<std::uint32_t>& widths,
                                                     const std::vector<std::uint64_t>& caps,
                                                     const std::string& phase) {
  const auto k = static_cast<Vertex>(own.size());
  const std::uint32_t bits = std::accumulate(widths.begin(), widths.end(), 0u);
  auto saturate = [&](std::vector<std::uint64_t>& x) {
    for (std::size_t f = 0; f < x.size(); ++f)
      if (f < caps.size() && caps[f] > 0) x[f] = std::min(x[f], caps[f]);
  };
  for (auto& x : own) saturate(x);
  std::vector<std::vector<Vertex>> by_height(tree.height() + 1);
  for (Vertex v = 0; v < k; ++v) by_height[tree.subtree_height[v]].push_back(v);

  session.begin_phase(phase);
  for (std::uint32_t h = 0; h < tree.height(); ++h) {
    session.next_round();
    for (Vertex v : by_height[h]) {
      const Vertex up = *tree.parent[v];
      session.send(v, up, bits);
      for (std::size_t f = 0; f < own[v].size(); ++f) own[up][f] += own[v][f];
      saturate(own[up]);
    }
  }
  session.end_phase();
  return own;
}

/// Root-to-leaves broadcast of a `bits`-wide message.
void broadcast(Session& session, const BfsTree& tree, std::uint32_t bits, const std::string& phase) {
  std::vector<std::vector<Vertex>> by_depth(tree.height() + 1);
  for (Vertex v = 0; v < tree.depth.size(); ++v) by_depth[tree.depth[v]].push_back(v);
  session.begin_phase(phase);
  for (std::uint32_t d = 0; d < tree.height(); ++d) {
    session.next_round();
    for (Vertex v : by_depth[d])
      for (Vertex c : tree.children[v]) session.send(v, c, bits);
  }
  session.end_phase();
}

struct Verdict {
  bool certified = false;
  std::optional<double> tau;
};

/// Certifying grid value closest to the middle of the certifying interval, else the middle.
Verdict root_verdict(const GraphStats& s, std::uint32_t n, double eps, const std::vector<double>& grid) {
  Verdict v;
  if (s.edges == 0) return v;
  const auto interval = certifying_tau_interval(s, n, eps);
  const double mid = interval ? interval->midpoint() : 0.5;
  for (double tau : grid) {
    if (!(tau > 0.0 && tau < 1.0)) continue;
    if (!check_theorem(s, tau, n, eps).overall) continue;
    if (!v.tau || std::abs(tau - mid) < std::abs(*v.tau - mid)) v.tau = tau;
  }
  // Intervals narrower than the grid step still certify, at their midpoint.
  if (!v.tau && interval) v.tau = mid;
  v.certified = v.tau.has_value();
  return v;
}

struct BundlePlan {
  std::uint32_t s = 0;
  std::uint32_t bundles = 0;
  double tau = 0.0;
  bool certified = false;
  double threshold = 0.0;
};

BundlePlan choose_bundles(std::uint32_t k, std::uint32_t n, double eps, const PipelineOptions& opt) {
  BundlePlan b;
  b.s = opt.bundle_size ? *opt.bundle_size : smallest_certifying_bundle(k, n, eps);
  if (b.s < 3) throw InvalidArgument("bundle size must be >= 3");
  b.bundles = k / b.s;
  if (b.bundles == 0)
    throw CapacityError("k = " + std::to_string(k) + " samples cannot fill one bundle of " +
                        std::to_string(b.s));
  const auto stats = disjoint_cliques_stats(b.s, b.bundles);
  const auto interval = certifying_tau_interval(stats, n, eps);
  b.certified = interval.has_value();
  if (!b.certified && opt.require_certified)
    throw CapacityError(std::to_string(b.bundles) + " bundles of size " + std::to_string(b.s) +
                        " do not certify for n = " + std::to_string(n));
  b.tau = b.certified ? interval->midpoint() : opt.fallback_tau;
  b.threshold = threshold(stats.edges, b.tau, n, eps);
  return b;
}

struct PipelineOutcome {
  std::vector<std::vector<Symbol>> bundles;
  std::vector<Vertex> holder;
  std::uint64_t z_saturated = 0;
};

/// Remainder forwarding, virtual players, and the saturated sum.
PipelineOutcome pipeline_and_sum(Session& session, const Network& net, const BfsTree& tree,
                                 const std::vector<std::uint64_t>& counts, const BundlePlan& plan,
                                 const std::vector<Symbol>& samples, std::uint32_t n) {
  const std::uint32_t k = net.k();
  const std::uint32_t s = plan.s;
  const std::uint32_t symbol_bits = bits_per_symbol(n);
  std::vector<std::uint64_t> forward(k);
  for (Vertex v = 0; v < k; ++v) forward[v] = counts[v] % s;

  // The root discards its remainder instead of forwarding it.
  // Pool of v: own sample, then each child's forwarded items, children by id.
  std::vector<std::vector<Symbol>> received(k);
  std::vector<std::vector<std::uint64_t>> child_start(k);
  for (Vertex v = 0; v < k; ++v) {
    std::uint64_t pos = 1;
    for (Vertex c : tree.children[v]) {
      child_start[v].push_back(pos);
      pos += forward[c];
    }
  }
  // Received items per (parent, child index), in arrival order.
  std::vector<std::vector<std::vector<Symbol>>> inbox(k);
  for (Vertex v = 0; v < k; ++v) inbox[v].resize(tree.children[v].size());
  std::vector<std::size_t> child_slot(k, 0);
  for (Vertex v = 0; v < k; ++v)
    for (std::size_t i = 0; i < tree.children[v].size(); ++i) child_slot[tree.children[v][i]] = i;

  auto pool_item = [&](Vertex v, std::uint64_t pos) -> std::optional<Symbol> {
    if (pos == 0) return samples[v];
    const auto& starts = child_start[v];
    if (starts.empty()) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), pos) -
                                            starts.begin()) - 1;
    const auto idx = pos - starts[i];
    if (idx < inbox[v][i].size()) return inbox[v][i][idx];
    return std::nullopt;
  };

  std::vector<std::uint64_t> sent(k, 0);
  session.begin_phase("pipeline");
  for (;;) {
    std::vector<std::pair<Vertex, Symbol>> moves;
    for (Vertex v = 0; v < k; ++v) {
      if (!tree.parent[v] || sent[v] >= forward[v]) continue;
      if (auto item = pool_item(v, sent[v])) moves.emplace_back(v, *item);
    }
    if (moves.empty()) break;
    session.next_round();
    for (auto [v, item] : moves) {
      const Vertex up = *tree.parent[v];
      session.send(v, up, symbol_bits);
      inbox[up][child_slot[v]].push_back(item);
      ++sent[v];
    }
  }
  session.end_phase();
  for (Vertex v = 0; v < k; ++v)
    if (tree.parent[v] && sent[v] != forward[v])
      throw ModelViolation("node " + std::to_string(v) + " could not forward its remainder");

  // Bundles in depth-first pre-order, children by increasing id.
  PipelineOutcome out;
  const MessageCodec codec(plan.threshold);
  const std::uint64_t cap = codec.sentinel_code();
  std::vector<std::vector<std::uint64_t>> own(k, std::vector<std::uint64_t>(1, 0));
  std::vector<Vertex> stack{tree.root};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    std::vector<Symbol> pool;
    for (std::uint64_t pos = forward[v];; ++pos) {
      const auto item = pool_item(v, pos);
      if (!item) break;
      pool.push_back(*item);
    }
    if (pool.size() % s != 0) throw ModelViolation("kept samples do not split into bundles");
    for (std::size_t b = 0; b < pool.size(); b += s) {
      std::vector<Symbol> bundle(pool.begin() + b, pool.begin() + b + s);
      const Message m = codec.encode(clique_collisions(bundle));
      own[v][0] = std::min(cap, own[v][0] + codec.to_code(m));
      out.bundles.push_back(std::move(bundle));
      out.holder.push_back(v);
    }
    for (auto it = tree.children[v].rbegin(); it != tree.children[v].rend(); ++it) stack.push_back(*it);
  }
  const auto sums = convergecast(session, tree, std::move(own), {width(cap)}, {cap}, "sum");
  out.z_saturated = sums[tree.root][0];
  return out;
}

DetectionResult detect_impl(Session& session, const Network& net, const BfsTree& tree, std::uint32_t n,
                            double eps, const std::vector<double>& grid,
                            std::vector<std::uint64_t>* counts, std::optional<BundlePlan>* fallback,
                            const PipelineOptions& pipe) {
  const std::uint32_t k = net.k();
  std::vector<std::vector<std::uint64_t>> own(k);
  for (Vertex v = 0; v < k; ++v) {
    const std::uint64_t d = net.neighbors(v).size();
    own[v] = {d, d * (d ? d - 1 : 0), 1};
  }
  const std::uint64_t kk = k;
  const auto sums = convergecast(session, tree, std::move(own), {width(kk * kk), width(kk * kk * kk), width(kk)},
                                 {}, "detect-up");
  DetectionResult r;
  r.edges = sums[tree.root][0] / 2;
  r.two_paths = sums[tree.root][1];
  if (counts) {
    counts->resize(k);
    for (Vertex v = 0; v < k; ++v) (*counts)[v] = sums[v][2];
  }
  const Verdict verdict = root_verdict({kk, r.edges, r.two_paths}, n, eps, grid);
  r.certified = verdict.certified;
  r.tau_star = verdict.tau;
  std::uint32_t bits = 1 + width(grid.size());
  if (!r.certified && fallback) {
    *fallback = choose_bundles(k, n, eps, pipe);
    bits += 2 * width(kk) + width(static_cast<std::uint64_t>(std::ceil((*fallback)->threshold)));
  }
  broadcast(session, tree, bits, "detect-down");
  return r;
}

}  // namespace

BfsResult build_bfs_tree(const Network& net, std::uint32_t n, bool record_transcript) {
  Session session(net, n, record_transcript);
  BfsResult r;
  r.tree = bfs_phase(session, net);
  r.report = session.report();
  return r;
}

DetectionResult detect_topology(const Network& net, const BfsTree& tree, std::uint32_t n, double eps,
                                const std::vector<double>& tau_grid, bool record_transcript) {
  Session session(net, n, record_transcript);
  auto r = detect_impl(session, net, tree, n, eps, tau_grid, nullptr, nullptr, {});
  r.report = session.report();
  return r;
}

namespace {

ProtocolResult local_impl(Session& session, const Network& net, const BfsTree& tree, std::uint32_t n,
                          double eps, double tau, const Distribution& p, const StreamId& trial) {
  const std::uint32_t k = net.k();
  const auto ids = net.ids();
  const auto x = sample_labeling(p, k, trial).values;
  std::vector<std::vector<std::uint64_t>> own(k, std::vector<std::uint64_t>(1, 0));
  session.begin_phase("exchange");
  session.next_round();
  const std::uint32_t bits = bits_per_symbol(n);
  for (Vertex v = 0; v < k; ++v) {
    const auto nbrs = net.neighbors(v);
    for (std::size_t s = 0; s < nbrs.size(); ++s) {
      const Vertex u = nbrs[s];
      if (ids[u] <= ids[v]) continue;
      session.send_slot(v, s, bits);
      own[u][0] += x[u] == x[v];
    }
  }
  session.end_phase();
  const std::uint64_t edges = net.topology().stats().edges;
  const auto sums = convergecast(session, tree, std::move(own), {width(edges)}, {}, "collision-sum");
  ProtocolResult r;
  r.z = sums[tree.root][0];
  r.threshold = threshold(edges, tau, n, eps);
  r.decision = decide(r.z, r.threshold);
  return r;
}

}  // namespace

ProtocolResult local_collision_protocol(const Network& net, const BfsTree& tree, std::uint32_t n,
                                        double eps, std::optional<double> tau_star,
                                        const Distribution& p, const StreamId& trial,
                                        bool record_transcript) {
  if (!tau_star) throw ProtocolRefused("topology is not certified; the local protocol does not apply");
  if (p.n() != n) throw InvalidArgument("distribution domain does not match n");
  if (net.topology().stats().edges == 0) throw ProtocolRefused("topology has no edge");
  Session session(net, n, record_transcript);
  auto r = local_impl(session, net, tree, n, eps, *tau_star, p, trial);
  r.report = session.report();
  return r;
}

std::uint32_t smallest_certifying_bundle(std::uint32_t k, std::uint32_t n, double eps) {
  for (std::uint32_t s = 3; s <= k; ++s)
    if (certifying_tau_interval(disjoint_cliques_stats(s, k / s), n, eps)) return s;
  throw CapacityError("no bundle size s >= 3 certifies with k = " + std::to_string(k) +
                      " samples (n = " + std::to_string(n) + ")");
}

namespace {

PipelineResult finish_pipeline(const BundlePlan& plan, PipelineOutcome&& out) {
  PipelineResult r;
  r.bundle_size = plan.s;
  r.bundles = plan.bundles;
  r.tau = plan.tau;
  r.certified = plan.certified;
  r.protocol.z = out.z_saturated;
  r.protocol.threshold = plan.threshold;
  r.protocol.decision = decide(out.z_saturated, plan.threshold);
  r.bundle_samples = std::move(out.bundles);
  r.bundle_holder = std::move(out.holder);
  return r;
}

}  // namespace

PipelineResult pipelined_bundle_protocol(const Network& net, std::uint32_t n, double eps,
                                         const Distribution& p, const StreamId& trial,
                                         const PipelineOptions& options, bool record_transcript) {
  if (p.n() != n) throw InvalidArgument("distribution domain does not match n");
  const std::uint32_t k = net.k();
  const BundlePlan plan = choose_bundles(k, n, eps, options);
  Session session(net, n, record_transcript);
  const BfsTree tree = bfs_phase(session, net);
  std::vector<std::vector<std::uint64_t>> own(k, std::vector<std::uint64_t>(1, 1));
  const auto counted = convergecast(session, tree, std::move(own), {width(k)}, {}, "count");
  std::vector<std::uint64_t> counts(k);
  for (Vertex v = 0; v < k; ++v) counts[v] = counted[v][0];
  broadcast(session, tree,
            2 * width(k) + width(static_cast<std::uint64_t>(std::ceil(plan.threshold))), "parameters");
  const auto x = sample_labeling(p, k, trial).values;
  auto r = finish_pipeline(plan, pipeline_and_sum(session, net, tree, counts, plan, x, n));
  r.protocol.report = session.report();
  return r;
}

std::string_view to_string(CombinedPath p) noexcept {
  return p == CombinedPath::local ? "local" : "pipelined";
}

CombinedResult combined_protocol(const Network& net, std::uint32_t n, double eps, const Distribution& p,
                                 const StreamId& trial, const std::vector<double>& tau_grid,
                                 bool record_transcript) {
  if (p.n() != n) throw InvalidArgument("distribution domain does not match n");
  Session session(net, n, record_transcript);
  const BfsTree tree = bfs_phase(session, net);
  std::vector<std::uint64_t> counts;
  std::optional<BundlePlan> fallback;
  CombinedResult r;
  r.detection = detect_impl(session, net, tree, n, eps, tau_grid, &counts, &fallback, {});
  if (r.detection.certified) {
    r.path = CombinedPath::local;
    r.local = local_impl(session, net, tree, n, eps, *r.detection.tau_star, p, trial);
    r.decision = r.local->decision;
  } else {
    r.path = CombinedPath::pipelined;
    const auto x = sample_labeling(p, net.k(), trial).values;
    r.pipeline = finish_pipeline(*fallback, pipeline_and_sum(session, net, tree, counts, *fallback, x, n));
    r.decision = r.pipeline->protocol.decision;
  }
  r.report = session.report();
  r.rounds = r.report.rounds;
  return r;
}

std::uint64_t default_ball_cap(std::uint32_t n, std::uint32_t k) {
  return std::uint64_t{RoundConstants::power_batches} * (channel_bits_for(n, k) / id_bits(k));
}

PowerDetectionResult graph_power_detection(const Network& net, const BfsTree& tree, std::uint32_t n,
                                           double eps, std::uint32_t t,
                                           const std::vector<double>& tau_grid,
                                           std::optional<std::uint64_t> ball_cap,
                                           bool record_transcript) {
  if (t < 1) throw InvalidArgument("graph power detection needs t >= 1");
  const std::uint32_t k = net.k();
  const std::uint64_t cap = ball_cap ? *ball_cap : default_ball_cap(n, k);
  Session session(net, n, record_transcript);
  const std::uint32_t lk = id_bits(k);
  const std::uint32_t per_round = session.channel() / lk;
  const auto ids = net.ids();

  std::vector<std::vector<bool>> known(k, std::vector<bool>(k, false));
  std::vector<std::uint64_t> ball(k, 1);
  std::vector<std::vector<std::uint64_t>> frontier(k);
  for (Vertex v = 0; v < k; ++v) {
    known[v][ids[v]] = true;
    frontier[v] = {ids[v]};
  }
  session.begin_phase("ball");
  for (std::uint32_t hop = 0; hop < t; ++hop) {
    std::size_t widest = 0;
    for (Vertex v = 0; v < k; ++v)
      if (!net.neighbors(v).empty()) widest = std::max(widest, frontier[v].size());
    if (widest == 0) break;
    const auto batches = (widest + per_round - 1) / per_round;
    std::vector<std::vector<std::uint64_t>> next(k);
    for (std::size_t b = 0; b < batches; ++b) {
      session.next_round();
      for (Vertex v = 0; v < k; ++v) {
        const auto lo = b * per_round;
        if (lo >= frontier[v].size()) continue;
        const auto hi = std::min<std::size_t>(frontier[v].size(), lo + per_round);
        const auto nbrs = net.neighbors(v);
        for (std::size_t s = 0; s < nbrs.size(); ++s) {
          session.send_slot(v, s, static_cast<std::uint32_t>((hi - lo) * lk));
          const Vertex u = nbrs[s];
          for (auto i = lo; i < hi; ++i) {
            const auto id = frontier[v][i];
            if (!known[u][id]) {
              known[u][id] = true;
              ++ball[u];
              next[u].push_back(id);
            }
          }
        }
      }
    }
    frontier = std::move(next);
  }
  session.end_phase();

  PowerDetectionResult r;
  for (Vertex v = 0; v < k; ++v) r.local_congestion_ok = r.local_congestion_ok && ball[v] <= cap;
  std::vector<std::vector<std::uint64_t>> own(k);
  for (Vertex v = 0; v < k; ++v) {
    const std::uint64_t d = ball[v] - 1;
    own[v] = {d, d * (d ? d - 1 : 0)};
  }
  const std::uint64_t kk = k;
  const auto sums =
      convergecast(session, tree, std::move(own), {width(kk * kk), width(kk * kk * kk)}, {}, "power-up");
  r.stats = {kk, sums[tree.root][0] / 2, sums[tree.root][1]};
  const Verdict verdict = root_verdict(r.stats, n, eps, tau_grid);
  r.certified = verdict.certified;
  r.tau_star = verdict.tau;
  broadcast(session, tree, 1 + width(tau_grid.size()), "power-down");
  r.report = session.report();
  return r;
}

}  // namespace cbt
