#include "cbt/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <string>

#include "cbt/error.hpp"

namespace cbt {

namespace {

using u128 = unsigned __int128;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

ComparisonGraph::ComparisonGraph(Vertex vertex_count, std::vector<Edge> edges,
                                 std::optional<std::vector<std::uint32_t>> owner)
    : vertex_count_(vertex_count), edges_(std::move(edges)), owner_(std::move(owner)) {
  for (auto& e : edges_) {
    require(e.u != e.v, "self-loop on vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    require(e.v < vertex_count_, "edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(), "duplicate edge");
  finish();
}

ComparisonGraph::ComparisonGraph(Trusted, Vertex vertex_count, std::vector<Edge> edges,
                                 std::optional<std::vector<std::uint32_t>> owner,
                                 std::vector<CliqueBlock> blocks)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      owner_(std::move(owner)),
      blocks_(std::move(blocks)),
      clique_structured_(true) {
  finish();
}

void ComparisonGraph::finish() {
  if (owner_) {
    require(owner_->size() == vertex_count_, "owner map length must equal |V|");
    for (const auto& e : edges_)
      require((*owner_)[e.u] == (*owner_)[e.v],
              "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") crosses owners");
  }
  degrees_.assign(vertex_count_, 0);
  for (const auto& e : edges_) {
    ++degrees_[e.u];
    ++degrees_[e.v];
  }
  stats_.vertices = vertex_count_;
  stats_.edges = edges_.size();
  stats_.two_paths = 0;
  for (auto d : degrees_) stats_.two_paths += static_cast<std::uint64_t>(d) * (d ? d - 1 : 0);
}

ComparisonGraph ComparisonGraph::from_clique_blocks(
    std::span<const Vertex> sizes, std::optional<std::vector<std::uint32_t>> block_owner) {
  if (block_owner) require(block_owner->size() == sizes.size(), "one owner per block required");
  std::uint64_t total = 0, edge_total = 0;
  for (auto s : sizes) {
    total += s;
    edge_total += static_cast<std::uint64_t>(s) * (s ? s - 1 : 0) / 2;
  }
  if (total > 0xffffffffull) throw CapacityError("clique blocks exceed 2^32 vertices");
  std::vector<Edge> edges;
  edges.reserve(edge_total);
  std::vector<CliqueBlock> blocks;
  blocks.reserve(sizes.size());
  std::optional<std::vector<std::uint32_t>> owner;
  if (block_owner) owner.emplace(total);
  Vertex first = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    const Vertex s = sizes[b];
    for (Vertex i = 0; i < s; ++i) {
      if (owner) (*owner)[first + i] = (*block_owner)[b];
      for (Vertex j = i + 1; j < s; ++j) edges.push_back({first + i, first + j});
    }
    blocks.push_back({first, s});
    first += s;
  }
  return ComparisonGraph(Trusted{}, static_cast<Vertex>(total), std::move(edges), std::move(owner),
                         std::move(blocks));
}

std::vector<std::vector<Vertex>> ComparisonGraph::adjacency() const {
  std::vector<std::vector<Vertex>> adj(vertex_count_);
  for (Vertex v = 0; v < vertex_count_; ++v) adj[v].reserve(degrees_[v]);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

std::uint64_t two_path_count(const ComparisonGraph& g) { return g.stats().two_paths; }

ComparisonGraph make_clique(Vertex q) {
  require(q >= 2, "clique needs q >= 2");
  const Vertex sizes[] = {q};
  return ComparisonGraph::from_clique_blocks(sizes, std::nullopt);
}

ComparisonGraph make_disjoint_cliques(Vertex q, std::uint32_t count) {
  require(q >= 2, "disjoint cliques need q >= 2");
  require(count >= 1, "disjoint cliques need at least one clique");
  std::vector<Vertex> sizes(count, q);
  std::vector<std::uint32_t> owners(count);
  std::iota(owners.begin(), owners.end(), 0u);
  return ComparisonGraph::from_clique_blocks(sizes, std::move(owners));
}

ComparisonGraph make_matching(Vertex pairs) {
  require(pairs >= 1, "matching needs at least one pair");
  std::vector<Vertex> sizes(pairs, 2);
  return ComparisonGraph::from_clique_blocks(sizes, std::nullopt);
}

ComparisonGraph make_star(Vertex leaves) {
  require(leaves >= 1, "star needs at least one leaf");
  std::vector<Edge> edges;
  for (Vertex i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return ComparisonGraph(leaves + 1, std::move(edges));
}

ComparisonGraph make_bipartite(Vertex a, Vertex b) {
  require(a >= 1 && b >= 1, "bipartite graph needs both sides non-empty");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(a) * b);
  for (Vertex i = 0; i < a; ++i)
    for (Vertex j = 0; j < b; ++j) edges.push_back({i, a + j});
  return ComparisonGraph(a + b, std::move(edges));
}

ComparisonGraph make_cycle(Vertex length) {
  require(length >= 3, "cycle needs length >= 3");
  std::vector<Edge> edges;
  for (Vertex i = 0; i < length; ++i) edges.push_back({i, (i + 1) % length});
  return ComparisonGraph(length, std::move(edges));
}

ComparisonGraph make_path(Vertex vertices) {
  require(vertices >= 2, "path needs at least two vertices");
  std::vector<Edge> edges;
  for (Vertex i = 0; i + 1 < vertices; ++i) edges.push_back({i, i + 1});
  return ComparisonGraph(vertices, std::move(edges));
}

ComparisonGraph make_random_graph(Vertex vertices, double p, std::uint64_t seed) {
  require(vertices >= 1, "random graph needs at least one vertex");
  require(p >= 0.0 && p <= 1.0, "edge probability must lie in [0, 1]");
  std::mt19937_64 engine(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (Vertex i = 0; i < vertices; ++i)
    for (Vertex j = i + 1; j < vertices; ++j)
      if (coin(engine)) edges.push_back({i, j});
  return ComparisonGraph(vertices, std::move(edges));
}

ComparisonGraph make_random_connected(Vertex vertices, double extra_p, std::uint64_t seed) {
  require(vertices >= 1, "random connected graph needs at least one vertex");
  require(extra_p >= 0.0 && extra_p <= 1.0, "edge probability must lie in [0, 1]");
  std::mt19937_64 engine(seed);
  std::vector<Edge> edges;
  // Random recursive tree: vertex i attaches to a uniform earlier vertex.
  for (Vertex i = 1; i < vertices; ++i) {
    const Vertex parent = std::uniform_int_distribution<Vertex>(0, i - 1)(engine);
    edges.push_back({parent, i});
  }
  std::sort(edges.begin(), edges.end());
  std::bernoulli_distribution coin(extra_p);
  std::vector<Edge> extra;
  for (Vertex i = 0; i < vertices; ++i)
    for (Vertex j = i + 1; j < vertices; ++j)
      if (coin(engine) && !std::binary_search(edges.begin(), edges.end(), Edge{i, j}))
        extra.push_back({i, j});
  edges.insert(edges.end(), extra.begin(), extra.end());
  return ComparisonGraph(vertices, std::move(edges));
}

namespace {

/// Hop distances from `source`, truncated at `limit` (unreached = UINT32_MAX).
std::vector<std::uint32_t> bfs_distances(const std::vector<std::vector<Vertex>>& adj, Vertex source,
                                         std::uint32_t limit) {
  std::vector<std::uint32_t> dist(adj.size(), UINT32_MAX);
  std::deque<Vertex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    if (dist[u] == limit) continue;
    for (Vertex w : adj[u]) {
      if (dist[w] != UINT32_MAX) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

}  // namespace

ComparisonGraph graph_power(const ComparisonGraph& g, std::uint32_t t) {
  require(t >= 1, "graph power needs t >= 1");
  if (t == 1) return ComparisonGraph(g.vertex_count(), {g.edges().begin(), g.edges().end()});
  const auto adj = g.adjacency();
  std::vector<Edge> edges;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    const auto dist = bfs_distances(adj, u, t);
    for (Vertex v = u + 1; v < g.vertex_count(); ++v)
      if (dist[v] != UINT32_MAX) edges.push_back({u, v});
  }
  return ComparisonGraph(g.vertex_count(), std::move(edges));
}

std::optional<std::uint32_t> diameter(const ComparisonGraph& g) {
  if (g.vertex_count() == 0) return 0;
  const auto adj = g.adjacency();
  std::uint32_t best = 0;
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    const auto dist = bfs_distances(adj, u, UINT32_MAX - 1);
    for (auto d : dist) {
      if (d == UINT32_MAX) return std::nullopt;
      best = std::max(best, d);
    }
  }
  return best;
}

InequalityReport check_graph_inequalities(const GraphStats& s) {
  const u128 v = s.vertices, e = s.edges, c = s.two_paths;
  InequalityReport r;

  r.edge_bound.lhs = static_cast<double>(s.edges);
  r.edge_bound.rhs = static_cast<double>(s.vertices) * static_cast<double>(s.vertices) / 2.0;
  r.edge_bound.pass = 2 * e <= v * v;

  const u128 denom = 2 * e + c;
  r.vertex_bound.lhs = static_cast<double>(s.vertices);
  r.vertex_bound.rhs = denom == 0 ? 0.0
                                  : 4.0 * static_cast<double>(s.edges) * static_cast<double>(s.edges) /
                                        static_cast<double>(denom);
  r.vertex_bound.pass = v * denom >= 4 * e * e;

  const bool dense = v <= e;
  r.two_path_bound.applicable = dense;
  r.two_path_bound.lhs = static_cast<double>(s.two_paths);
  r.two_path_bound.rhs = 2.0 * static_cast<double>(s.edges);
  r.two_path_bound.pass = !dense || c >= 2 * e;

  r.product_bound.applicable = dense;
  r.product_bound.lhs = static_cast<double>(s.vertices) * static_cast<double>(s.two_paths);
  r.product_bound.rhs = 2.0 * static_cast<double>(s.edges) * static_cast<double>(s.edges);
  r.product_bound.pass = !dense || v * c >= 2 * e * e;
  return r;
}

}  // namespace cbt
