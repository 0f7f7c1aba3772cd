#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cbt {

using Vertex = std::uint32_t;

/// Unordered vertex pair, stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// |V|, |E| and the directed 2-path count c(G) = sum_v d_v (d_v - 1).
struct GraphStats {
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint64_t two_paths = 0;
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// A contiguous vertex range [first, first + size) that forms a clique.
struct CliqueBlock {
  Vertex first = 0;
  Vertex size = 0;
};

/// Simple undirected graph on vertices 0..|V|-1 whose edges are the sample
/// pairs a tester compares. Immutable; statistics are computed once at
/// construction.
///
/// The optional owner map assigns each vertex to a player or batch. Every
/// edge must join two vertices with the same owner, since partitioned models
/// cannot compare samples held by different parties.
///
/// Graphs built by the clique constructors also carry their clique blocks,
/// which lets collision counting run in O(|V|) instead of O(|E|).
class ComparisonGraph {
 public:
  /// Validates simplicity and owner consistency; throws InvalidArgument.
  ComparisonGraph(Vertex vertex_count, std::vector<Edge> edges,
                  std::optional<std::vector<std::uint32_t>> owner = std::nullopt);

  /// Disjoint cliques laid out back to back. Sizes 0 and 1 are allowed and
  /// contribute isolated vertices only.
  static ComparisonGraph from_clique_blocks(std::span<const Vertex> sizes,
                                            std::optional<std::vector<std::uint32_t>> block_owner);

  Vertex vertex_count() const noexcept { return vertex_count_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::optional<std::vector<std::uint32_t>>& owner() const noexcept { return owner_; }
  const GraphStats& stats() const noexcept { return stats_; }
  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }
  std::span<const CliqueBlock> clique_blocks() const noexcept { return blocks_; }
  bool has_clique_blocks() const noexcept { return clique_structured_; }

  /// CSR adjacency (neighbors sorted ascending).
  std::vector<std::vector<Vertex>> adjacency() const;

 private:
  struct Trusted {};
  ComparisonGraph(Trusted, Vertex vertex_count, std::vector<Edge> edges,
                  std::optional<std::vector<std::uint32_t>> owner, std::vector<CliqueBlock> blocks);
  void finish();

  Vertex vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<std::uint32_t>> owner_;
  std::vector<std::uint32_t> degrees_;
  std::vector<CliqueBlock> blocks_;
  bool clique_structured_ = false;
  GraphStats stats_;
};

/// c(G) by the degree formula.
std::uint64_t two_path_count(const ComparisonGraph& g);

ComparisonGraph make_clique(Vertex q);
/// `count` copies of K_q; owner of each vertex is its clique index.
ComparisonGraph make_disjoint_cliques(Vertex q, std::uint32_t count);
ComparisonGraph make_matching(Vertex pairs);
ComparisonGraph make_star(Vertex leaves);
ComparisonGraph make_bipartite(Vertex a, Vertex b);
ComparisonGraph make_cycle(Vertex length);
ComparisonGraph make_path(Vertex vertices);

/// Erdős–Rényi G(vertices, p) from a seeded engine.
ComparisonGraph make_random_graph(Vertex vertices, double p, std::uint64_t seed);
/// Random spanning tree plus each remaining pair independently with
/// probability `extra_p`; always connected.
ComparisonGraph make_random_connected(Vertex vertices, double extra_p, std::uint64_t seed);

/// Edge (u, v) iff the distance between u and v in g lies in [1, t].
/// The owner map is dropped.
ComparisonGraph graph_power(const ComparisonGraph& g, std::uint32_t t);

/// Maximum eccentricity, or nullopt when g is disconnected.
std::optional<std::uint32_t> diameter(const ComparisonGraph& g);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool pass = true;
};

/// Structural inequalities every simple graph satisfies:
///   edge_bound:     |E| <= |V|^2 / 2
///   vertex_bound:   |V| >= 4|E|^2 / (2|E| + c(G))
///   two_path_bound: |V| <= |E|  implies  c(G) >= 2|E|
///   product_bound:  |V| <= |E|  implies  |V| c(G) >= 2|E|^2
/// Pass flags are decided in exact integer arithmetic; lhs/rhs are for
/// reporting. A failure means a bug in the statistics, not a graph property.
struct InequalityReport {
  InequalityCheck edge_bound;
  InequalityCheck vertex_bound;
  InequalityCheck two_path_bound;
  InequalityCheck product_bound;
  bool all_pass() const {
    return edge_bound.pass && vertex_bound.pass && two_path_bound.pass && product_bound.pass;
  }
};

InequalityReport check_graph_inequalities(const GraphStats& stats);
inline InequalityReport check_graph_inequalities(const ComparisonGraph& g) {
  return check_graph_inequalities(g.stats());
}

}  // namespace cbt
