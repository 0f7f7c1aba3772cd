#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbt/conditions.hpp"
#include "cbt/dist.hpp"
#include "cbt/graph.hpp"
#include "cbt/rng.hpp"
#include "cbt/tester.hpp"

namespace cbt {

/// Round budget constants. Every protocol bound below is stated with them.
struct RoundConstants {
  static constexpr std::uint32_t c_bfs = 1;
  static constexpr std::uint32_t c0 = 2;
  static constexpr std::uint32_t c_det = 2;
  static constexpr std::uint32_t c_sum = 1;
  static constexpr std::uint32_t c_pipe = 5;
  /// Id batches per hop in graph-power detection.
  static constexpr std::uint32_t power_batches = 8;
  static constexpr std::uint32_t c_pow = power_batches + 2;
  /// Multiplier c in channel_bits = c (ceil(log2 n) + ceil(log2 k)).
  static constexpr std::uint32_t channel_factor = 6;
};

/// Bits one directed edge may carry per round.
std::uint32_t channel_bits_for(std::uint32_t n, std::uint32_t k);

/// Connected communication graph over k nodes. Node i of the topology has
/// identifier ids[i]; identifiers are distinct. The diameter is recomputed
/// at construction.
class Network {
 public:
  /// Identity ids when `ids` is empty. Throws InvalidNetwork when the graph
  /// is empty or disconnected, or the ids are not distinct.
  explicit Network(ComparisonGraph topology, std::vector<std::uint64_t> ids = {});

  std::uint32_t k() const noexcept { return topology_.vertex_count(); }
  std::uint32_t diameter() const noexcept { return diameter_; }
  const ComparisonGraph& topology() const noexcept { return topology_; }
  std::span<const std::uint64_t> ids() const noexcept { return ids_; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {nbrs_.data() + offsets_[v], nbrs_.data() + offsets_[v + 1]};
  }
  /// Index of the directed edge v -> neighbors(v)[slot].
  std::size_t edge_index(Vertex v, std::size_t slot) const noexcept { return offsets_[v] + slot; }
  std::size_t directed_edges() const noexcept { return nbrs_.size(); }

 private:
  ComparisonGraph topology_;
  std::vector<std::uint64_t> ids_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> nbrs_;
  std::uint32_t diameter_ = 0;
};

/// Named topologies: path, cycle, star (node 0 is the centre), clique and a
/// seeded random connected graph.
Network make_path_network(std::uint32_t k);
Network make_cycle_network(std::uint32_t k);
Network make_star_network(std::uint32_t k);
Network make_clique_network(std::uint32_t k);
Network make_random_network(std::uint32_t k, double extra_p, std::uint64_t seed);

// --- Transcript --------------------------------------------------------------

struct TranscriptEvent {
  std::uint32_t round = 0;  // 1-based, global across the phases of one run
  Vertex from = 0;
  Vertex to = 0;
  std::uint32_t bits = 0;
  std::string phase;
};

/// Rounds spent in one named phase of a protocol.
struct PhaseRounds {
  std::string phase;
  std::uint32_t rounds = 0;
};

struct RoundReport {
  std::uint32_t rounds = 0;
  std::vector<PhaseRounds> phases;
  /// Largest number of bits any directed edge carried in a single round.
  std::uint32_t max_edge_bits = 0;
  std::uint32_t channel_bits = 0;
  /// Filled only when a transcript was requested.
  std::optional<std::vector<TranscriptEvent>> transcript;
};

struct ReplaySummary {
  std::uint32_t rounds = 0;
  std::uint32_t max_edge_bits = 0;
  /// Every event is on a topology edge and no edge exceeds the channel in a
  /// round.
  bool within_budget = true;
};

/// Recomputes round count and per-edge load from a transcript.
ReplaySummary replay(const Network& net, const std::vector<TranscriptEvent>& events,
                     std::uint32_t channel_bits);

// --- BFS ---------------------------------------------------------------------

/// Rooted spanning tree; indices are topology vertices.
struct BfsTree {
  Vertex root = 0;
  std::vector<std::optional<Vertex>> parent;
  /// Children sorted by increasing identifier.
  std::vector<std::vector<Vertex>> children;
  std::vector<std::uint32_t> depth;
  /// Height of the subtree below each node (leaves 0).
  std::vector<std::uint32_t> subtree_height;
  std::uint32_t height() const { return subtree_height.empty() ? 0 : subtree_height[root]; }
};

struct BfsResult {
  BfsTree tree;
  RoundReport report;
};

/// Max-id flooding that builds the BFS tree rooted at the largest identifier.
/// At most c_bfs D + c0 rounds.
BfsResult build_bfs_tree(const Network& net, std::uint32_t n, bool record_transcript = false);

// --- Detection ---------------------------------------------------------------

struct DetectionResult {
  bool certified = false;
  std::optional<double> tau_star;
  std::uint64_t edges = 0;
  std::uint64_t two_paths = 0;
  RoundReport report;
};

/// Convergecast of sum d and sum d(d-1), check of the three conditions at the
/// root over `tau_grid`, and a broadcast of the verdict. tau_star is the
/// certifying grid value closest to the middle of the certifying interval,
/// or the middle itself when no grid value lies inside it.
/// At most c_det D rounds.
DetectionResult detect_topology(const Network& net, const BfsTree& tree, std::uint32_t n, double eps,
                                const std::vector<double>& tau_grid, bool record_transcript = false);

// --- Protocols ---------------------------------------------------------------

struct ProtocolResult {
  Decision decision = Decision::yes;
  std::uint64_t z = 0;
  double threshold = 0.0;
  RoundReport report;
};

/// Each node sends its sample to its higher-id neighbours in one round; the
/// per-node counts are summed up the tree. At most 1 + c_sum D + c0 rounds.
/// The topology itself is the comparison graph, node v holding
/// sample_labeling(P, k, trial).values[v]. Throws ProtocolRefused without
/// tau_star.
ProtocolResult local_collision_protocol(const Network& net, const BfsTree& tree, std::uint32_t n,
                                        double eps, std::optional<double> tau_star,
                                        const Distribution& p, const StreamId& trial,
                                        bool record_transcript = false);

struct PipelineOptions {
  /// Forces the bundle size s instead of the smallest certifying one.
  std::optional<std::uint32_t> bundle_size;
  /// When false, a forced bundle size that does not certify runs at
  /// `fallback_tau`.
  bool require_certified = true;
  double fallback_tau = 0.5;
};

struct PipelineResult {
  ProtocolResult protocol;
  std::uint32_t bundle_size = 0;
  std::uint32_t bundles = 0;
  double tau = 0.0;
  bool certified = false;
  /// Bundle contents in assignment order: nodes in depth-first pre-order
  /// (children by increasing id), and within a node the kept part of its
  /// pool. Evaluating the disjoint-cliques tester on these gives the same
  /// decision.
  std::vector<std::vector<Symbol>> bundle_samples;
  /// Node holding each bundle.
  std::vector<Vertex> bundle_holder;
};

/// Smallest s >= 3 for which floor(k/s) disjoint cliques of size s certify.
/// Throws CapacityError when none does.
std::uint32_t smallest_certifying_bundle(std::uint32_t k, std::uint32_t n, double eps);

/// Counts per subtree, forwards remainders cnt(v) mod s one sample per round,
/// has every held bundle act as a simultaneous player and sums the messages
/// up the tree. Builds its own BFS tree when `tree` is null. At most
/// c_pipe (D + s) + c0 rounds including the BFS.
PipelineResult pipelined_bundle_protocol(const Network& net, std::uint32_t n, double eps,
                                         const Distribution& p, const StreamId& trial,
                                         const PipelineOptions& options = {},
                                         bool record_transcript = false);

enum class CombinedPath { local, pipelined };
std::string_view to_string(CombinedPath p) noexcept;

struct CombinedResult {
  CombinedPath path = CombinedPath::local;
  Decision decision = Decision::yes;
  std::uint32_t rounds = 0;
  DetectionResult detection;
  std::optional<PipelineResult> pipeline;
  std::optional<ProtocolResult> local;
  RoundReport report;
};

/// BFS and detection, then the local protocol on a certified topology or the
/// pipelined protocol otherwise. Detection carries the subtree counts and
/// bundle parameters, so the pipelined path stays within c_pipe (D + s) + c0.
CombinedResult combined_protocol(const Network& net, std::uint32_t n, double eps,
                                 const Distribution& p, const StreamId& trial,
                                 const std::vector<double>& tau_grid = default_tau_grid(),
                                 bool record_transcript = false);

struct PowerDetectionResult {
  bool certified = false;
  std::optional<double> tau_star;
  /// Every t-ball fits under the congestion cap.
  bool local_congestion_ok = true;
  GraphStats stats;
  RoundReport report;
};

/// Default t-ball cap: power_batches * floor(channel_bits / ceil(log2 k)).
std::uint64_t default_ball_cap(std::uint32_t n, std::uint32_t k);

/// t-hop identifier flooding followed by a convergecast of the degrees in
/// G^t and a broadcast of the verdict. With every ball under the cap the run
/// uses at most c_pow t D rounds.
PowerDetectionResult graph_power_detection(const Network& net, const BfsTree& tree, std::uint32_t n,
                                           double eps, std::uint32_t t,
                                           const std::vector<double>& tau_grid = default_tau_grid(),
                                           std::optional<std::uint64_t> ball_cap = std::nullopt,
                                           bool record_transcript = false);

}  // namespace cbt
