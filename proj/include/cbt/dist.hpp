#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cbt/rng.hpp"

namespace cbt {

/// Domain element in [1, n].
using Symbol = std::uint32_t;

/// Probability vector over [n]. Immutable after construction.
///
/// Construction validates non-negativity and that the entries sum to one
/// within 1e-12, then builds a Vose alias table so each draw costs O(1).
class Distribution {
 public:
  /// Throws InvalidDomain for an empty vector, InvalidArgument for negative,
  /// non-finite or non-normalized entries.
  explicit Distribution(std::vector<double> probs);

  std::uint32_t n() const noexcept { return static_cast<std::uint32_t>(probs_.size()); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](Symbol s) const { return probs_.at(s - 1); }

  /// One draw in [1, n].
  Symbol draw(Engine& engine) const;

  static constexpr double kSumTolerance = 1e-12;

 private:
  std::vector<double> probs_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

Distribution make_uniform(std::uint32_t n);

/// First half of the domain at (1+eps)/n, second half at (1-eps)/n.
/// L1 distance to uniform is exactly eps.
Distribution make_bump(std::uint32_t n, double eps);

/// Element 1 at 1/n + eps/2, the rest rescaled evenly. L1 distance to
/// uniform is exactly eps.
Distribution make_heavy(std::uint32_t n, double eps);

Distribution make_point_mass(std::uint32_t n, Symbol at);

double collision_probability(const Distribution& p);
double three_way_collision_probability(const Distribution& p);
double l1_distance(const Distribution& p, const Distribution& q);
double distance_to_uniform(const Distribution& p);

/// Samples attached to comparison-graph vertices, plus the stream they came
/// from.
struct SampleLabeling {
  std::vector<Symbol> values;
  StreamId stream;
};

/// `vertex_count` i.i.d. draws from `p`, taken in order from the engine of
/// `stream`. Deterministic in (p, vertex_count, stream); the first j draws do
/// not depend on vertex_count.
SampleLabeling sample_labeling(const Distribution& p, std::uint64_t vertex_count,
                               const StreamId& stream);

/// Hook for a per-sample transformation applied before collision counting
/// (for instance a reduction from identity testing to uniformity testing).
using SampleFilter = std::function<Symbol(Symbol)>;

void apply_filter(SampleLabeling& labeling, const SampleFilter& filter);

}  // namespace cbt
