#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "cbt/dist.hpp"
#include "cbt/graph.hpp"

namespace cbt {

enum class Decision { yes, no };

std::string_view to_string(Decision d) noexcept;

/// A collision-based tester: comparison graph, threshold parameter tau in
/// [0, 1], domain size n and proximity eps in (0, 1].
class TesterSpec {
 public:
  /// Throws InvalidArgument when tau or eps is out of range, n is zero or the
  /// graph has no edge.
  TesterSpec(std::shared_ptr<const ComparisonGraph> graph, double tau, std::uint32_t n, double eps);

  const ComparisonGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const ComparisonGraph>& graph_ptr() const noexcept { return graph_; }
  double tau() const noexcept { return tau_; }
  std::uint32_t n() const noexcept { return n_; }
  double eps() const noexcept { return eps_; }

 private:
  std::shared_ptr<const ComparisonGraph> graph_;
  double tau_;
  std::uint32_t n_;
  double eps_;
};

struct TestOutcome {
  std::uint64_t z = 0;
  double t = 0.0;
  Decision decision = Decision::yes;
};

/// T = |E| (1 + tau eps^2) / n, kept real.
double threshold(std::uint64_t edges, double tau, std::uint32_t n, double eps);
inline double threshold(const TesterSpec& spec) {
  return threshold(spec.graph().stats().edges, spec.tau(), spec.n(), spec.eps());
}

/// YES iff z < t; a tie is NO.
inline Decision decide(std::uint64_t z, double t) {
  return static_cast<double>(z) < t ? Decision::yes : Decision::no;
}

/// Number of edges whose endpoints carry equal samples. Uses the clique
/// blocks when the graph has them, otherwise walks the edge list.
std::uint64_t count_collisions(const ComparisonGraph& g, const SampleLabeling& labeling);

/// Always walks the edge list. Kept separate so the two routes can be
/// checked against each other.
std::uint64_t count_collisions_by_edges(const ComparisonGraph& g, const SampleLabeling& labeling);

/// Collisions inside one clique of samples: sum over symbols of C(count, 2).
std::uint64_t clique_collisions(std::span<const Symbol> samples);

TestOutcome evaluate(const TesterSpec& spec, const SampleLabeling& labeling);

/// Draws |V| samples from `stream` and decides.
TestOutcome run(const TesterSpec& spec, const Distribution& p, const StreamId& stream);

/// E[Z] = |E| mu.
double expected_collisions(const GraphStats& g, const Distribution& p);
/// Var[Z] = |E| (mu - mu^2) + c(G) (gamma - mu^2), with the directed c(G).
double variance_collisions(const GraphStats& g, const Distribution& p);

inline double expected_collisions(const ComparisonGraph& g, const Distribution& p) {
  return expected_collisions(g.stats(), p);
}
inline double variance_collisions(const ComparisonGraph& g, const Distribution& p) {
  return variance_collisions(g.stats(), p);
}

/// Largest labeling space the exact oracle will enumerate.
inline constexpr std::uint64_t kMaxEnumeratedOutcomes = 10'000'000;

/// Exact Pr[decision = YES] over all n^|V| labelings weighted by prod P.
/// Throws CapacityError when n^|V| exceeds kMaxEnumeratedOutcomes.
double exact_yes_probability(const TesterSpec& spec, const Distribution& p);

/// Exact probability of a wrong answer: Pr[NO] when p is uniform, Pr[YES]
/// when p is eps-far. Throws InvalidArgument when p is neither.
double exact_error_probability(const TesterSpec& spec, const Distribution& p);

}  // namespace cbt
