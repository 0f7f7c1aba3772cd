#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbt/graph.hpp"

namespace cbt {

/// One sufficiency condition: `actual` compared against `required`.
/// Conditions 1 and 2 are lower bounds on |E|; condition 3 is an upper bound
/// on c(G)/|E|^2.
struct ConditionCheck {
  double required = 0.0;
  double actual = 0.0;
  bool pass = false;
};

struct ConditionReport {
  double tau = 0.0;
  ConditionCheck cond1;  // |E| >= 4n / (tau^2 eps^4)
  ConditionCheck cond2;  // |E| >= 16n / ((1-tau)^2 eps^4)
  ConditionCheck cond3;  // c(G)/|E|^2 <= (1-tau)^2 eps^2 / (16 sqrt(n))
  bool overall = false;
};

/// Relative slack granted to each comparison so that boundary cases such as
/// tau = 1/3 are not decided by floating-point rounding.
inline constexpr double kConditionSlack = 1e-12;

/// The three graph conditions that certify (G, tau) as an (n, eps)
/// uniformity tester with error at most 1/4. `actual` values are always
/// taken from the statistics passed in. Throws InvalidArgument unless
/// 0 < tau < 1, 0 < eps <= 1, n >= 1 and |E| >= 1.
ConditionReport check_theorem(const GraphStats& stats, double tau, std::uint32_t n, double eps);
inline ConditionReport check_theorem(const ComparisonGraph& g, double tau, std::uint32_t n,
                                     double eps) {
  return check_theorem(g.stats(), tau, n, eps);
}

/// Closed interval of thresholds tau for which all three conditions hold.
/// Condition 1 bounds tau from below and conditions 2-3 bound it from above,
/// so the certifying set is always an interval (possibly empty).
struct TauInterval {
  double lo = 0.0;
  double hi = 0.0;
  double midpoint() const { return 0.5 * (lo + hi); }
};

std::optional<TauInterval> certifying_tau_interval(const GraphStats& stats, std::uint32_t n,
                                                   double eps);

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_tau_grid();

/// Statistics of disjoint cliques with the given sizes, in closed form.
/// Throws CapacityError if a count does not fit in 64 bits.
GraphStats clique_family_stats(std::span<const std::uint64_t> sizes);
GraphStats disjoint_cliques_stats(std::uint64_t q, std::uint64_t count);

// --- Disjoint cliques ------------------------------------------------------

/// The disjoint-cliques conditions evaluated four ways.
///
/// `lemma` uses the published closed forms (q sqrt(l) against sqrt(12) and
/// sqrt(48), q l against 24), whose third constant assumes c(G) = l C(q,3).
/// `rederived` keeps conditions 1-2 and replaces the third with
/// q l >= 144 sqrt(n) / ((1-tau)^2 eps^2), which follows from the directed
/// count c(G) = l q (q-1) (q-2) via |E|^2 / c(G) >= l q / 9.
/// `direct` is check_theorem on the exact directed statistics and is the
/// authoritative verdict. `triple_convention` is check_theorem with c(G)
/// replaced by l C(q,3), i.e. one sixth of the directed count; it is the
/// band inside which `lemma` and `direct` may legitimately disagree.
struct DisjointCliquesReport {
  std::uint64_t q = 0;
  std::uint64_t ell = 0;
  ConditionReport lemma;
  ConditionReport rederived;
  ConditionReport direct;
  ConditionReport triple_convention;
  /// q sqrt(l) >= 35 sqrt(n) / eps^2.
  bool corollary_bound_met = false;
};

DisjointCliquesReport check_disjoint_cliques(std::uint64_t q, std::uint64_t ell, double tau,
                                             std::uint32_t n, double eps);

// --- Plans -------------------------------------------------------------------

enum class Model { centralized, simultaneous, asymmetric, streaming, simultaneous_streaming };
enum class GraphFamily { clique, disjoint_cliques, per_rate_cliques, batched_cliques };

std::string_view to_string(Model m) noexcept;
std::string_view to_string(GraphFamily f) noexcept;
std::optional<Model> parse_model(std::string_view s) noexcept;

struct PredictedResources {
  std::uint64_t total_samples = 0;
  std::uint64_t max_samples_per_player = 0;
  /// Sampling time t; only meaningful for the asymmetric-cost model.
  double time = 0.0;
  /// Bits per player message; 0 for single-processor models.
  std::uint32_t message_bits = 0;
  /// Peak memory per processor; 0 for models without a memory budget.
  std::uint64_t memory_bits = 0;
};

/// A planned tester: which disjoint-cliques graph to use, where each clique
/// lives, and the threshold parameter. Every plan returned by a planner
/// certifies under check_theorem on its own graph.
struct Plan {
  Model model = Model::centralized;
  GraphFamily family = GraphFamily::clique;
  std::uint32_t n = 0;
  double eps = 0.0;
  double tau = 0.0;
  TauInterval tau_interval;

  std::uint32_t players = 1;
  /// Clique sizes per player, in the order the player processes them.
  std::vector<std::vector<std::uint64_t>> player_blocks;

  /// q for a clique, q' for equal per-player cliques, the batch size for
  /// batched families, 0 for per-rate cliques.
  std::uint64_t clique_size = 0;
  /// Total number of cliques (l).
  std::uint64_t clique_count = 0;

  std::vector<double> rates;  // asymmetric only
  double time = 0.0;          // asymmetric only

  std::uint64_t memory_budget_bits = 0;  // m, memory models only
  std::uint64_t storable_samples = 0;    // m' = floor(m / (2 bits_per_symbol))

  GraphStats stats;
  double threshold = 0.0;
  ConditionReport certificate;
  PredictedResources predicted;
};

/// Number of bits charged for one stored symbol: max(1, ceil(log2 n)).
std::uint32_t bits_per_symbol(std::uint32_t n);
/// ceil(log2(x)) for x >= 1.
std::uint32_t ceil_log2(std::uint64_t x);
/// Fixed message width: ceil(log2(ceil(T) + 2)).
std::uint32_t message_bits_for(double threshold);
/// Saturating collision counter width: ceil(log2(ceil(T) + 1)).
std::uint32_t counter_bits_for(double threshold);
/// m' = floor(m / (2 bits_per_symbol(n))).
std::uint64_t storable_samples(std::uint32_t n, std::uint64_t memory_bits);

Plan plan_centralized(std::uint32_t n, double eps);
Plan plan_simultaneous(std::uint32_t n, double eps, std::uint32_t players);
Plan plan_asymmetric(std::uint32_t n, double eps, std::span<const double> rates);
Plan plan_streaming(std::uint32_t n, double eps, std::uint64_t memory_bits);
Plan plan_simultaneous_streaming(std::uint32_t n, double eps, std::uint32_t players,
                                 std::uint64_t memory_bits);

/// The plan's comparison graph. Owners are player indices, except for the
/// single-processor streaming model where each batch is its own owner.
ComparisonGraph instantiate(const Plan& plan);

/// The clique size that the player/time resource refers to: q for the
/// centralized model, per-player samples for simultaneous models, t for the
/// asymmetric model, total samples for streaming.
double headline_resource(const Plan& plan);

// --- Conjecture-conditional floors ------------------------------------------

/// Minimum edge count any collision-based tester is conjectured to need:
/// coefficient * n / eps^4. An assumption, not a theorem.
double conjectured_min_edges(std::uint32_t n, double eps, double coefficient = 1.0);

double floor_centralized(double min_edges);
double floor_simultaneous(double min_edges, std::uint32_t players);
double floor_asymmetric(double min_edges, std::span<const double> rates);
/// |E| <= m' |V| rearranged: |V| >= E_min / m'.
double floor_streaming(double min_edges, std::uint64_t storable);
double floor_simultaneous_streaming(double min_edges, std::uint32_t players,
                                    std::uint64_t storable);

/// Floor for the plan's headline resource under the same model parameters.
double conjectured_floor(const Plan& plan, double min_edges);

// --- Adding edges can break certification -----------------------------------

struct CounterexampleResult {
  ComparisonGraph cycle;   // H
  ComparisonGraph augmented;  // G: H plus a hub joined to every non-neighbour
  std::vector<ConditionReport> cycle_reports;
  std::vector<ConditionReport> augmented_reports;
  bool cycle_certified_somewhere = false;
  bool augmented_fails_cond3_everywhere = false;
  double augmented_ratio = 0.0;  // c(G)/|E_G|^2
};

/// H is the cycle on ceil(b n / eps^4) vertices; G adds edges from vertex 0
/// to every vertex it is not yet adjacent to. Throws CapacityError naming b
/// when no tau of the grid certifies H.
CounterexampleResult appendix_counterexample(std::uint32_t n, double eps, double b,
                                             std::span<const double> tau_grid);

}  // namespace cbt
