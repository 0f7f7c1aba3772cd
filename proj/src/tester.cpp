#include "cbt/tester.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cbt/error.hpp"

namespace cbt {

std::string_view to_string(Decision d) noexcept { return d == Decision::yes ? "YES" : "NO"; }

TesterSpec::TesterSpec(std::shared_ptr<const ComparisonGraph> graph, double tau, std::uint32_t n,
                       double eps)
    : graph_(std::move(graph)), tau_(tau), n_(n), eps_(eps) {
  if (!graph_) throw InvalidArgument("tester needs a graph");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  if (n == 0) throw InvalidDomain("tester needs n >= 1");
  if (graph_->stats().edges == 0) throw InvalidArgument("tester graph needs at least one edge");
}

double threshold(std::uint64_t edges, double tau, std::uint32_t n, double eps) {
  return static_cast<double>(edges) * ((1.0 + tau * eps * eps) / n);
}

std::uint64_t clique_collisions(std::span<const Symbol> samples) {
  if (samples.size() < 2) return 0;
  // Sorting keeps this independent of the domain size.
  std::vector<Symbol> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t z = 0, run = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      z += run;
      ++run;
    } else {
      run = 1;
    }
  }
  return z;
}

std::uint64_t count_collisions_by_edges(const ComparisonGraph& g, const SampleLabeling& labeling) {
  if (labeling.values.size() != g.vertex_count())
    throw InvalidArgument("labeling length " + std::to_string(labeling.values.size()) +
                          " does not match |V| = " + std::to_string(g.vertex_count()));
  const auto& x = labeling.values;
  std::uint64_t z = 0;
  for (const auto& e : g.edges()) z += x[e.u] == x[e.v];
  return z;
}

std::uint64_t count_collisions(const ComparisonGraph& g, const SampleLabeling& labeling) {
  if (!g.has_clique_blocks()) return count_collisions_by_edges(g, labeling);
  if (labeling.values.size() != g.vertex_count())
    throw InvalidArgument("labeling length " + std::to_string(labeling.values.size()) +
                          " does not match |V| = " + std::to_string(g.vertex_count()));
  std::span<const Symbol> all(labeling.values);
  std::uint64_t z = 0;
  for (const auto& b : g.clique_blocks()) z += clique_collisions(all.subspan(b.first, b.size));
  return z;
}

TestOutcome evaluate(const TesterSpec& spec, const SampleLabeling& labeling) {
  TestOutcome out;
  out.z = count_collisions(spec.graph(), labeling);
  out.t = threshold(spec);
  out.decision = decide(out.z, out.t);
  return out;
}

TestOutcome run(const TesterSpec& spec, const Distribution& p, const StreamId& stream) {
  if (p.n() != spec.n())
    throw InvalidArgument("distribution domain " + std::to_string(p.n()) +
                          " does not match tester n = " + std::to_string(spec.n()));
  return evaluate(spec, sample_labeling(p, spec.graph().vertex_count(), stream));
}

double expected_collisions(const GraphStats& g, const Distribution& p) {
  return static_cast<double>(g.edges) * collision_probability(p);
}

double variance_collisions(const GraphStats& g, const Distribution& p) {
  const double mu = collision_probability(p);
  const double gamma = three_way_collision_probability(p);
  return static_cast<double>(g.edges) * (mu - mu * mu) +
         static_cast<double>(g.two_paths) * (gamma - mu * mu);
}

namespace {

/// Depth-first enumeration of labelings, vertex by vertex. Each vertex only
/// compares against already-labelled lower neighbours, so the partial
/// collision count is exact at every depth. Once it reaches T the remaining
/// subtree is all NO and is skipped.
class YesEnumerator {
 public:
  YesEnumerator(const ComparisonGraph& g, const Distribution& p, double t)
      : p_(p), t_(t), labels_(g.vertex_count(), 0), lower_(g.vertex_count()) {
    for (const auto& e : g.edges()) lower_[e.v].push_back(e.u);
    for (Symbol s = 1; s <= p.n(); ++s)
      if (p[s] > 0.0) support_.push_back(s);
  }

  double yes_mass() { return descend(0, 0, 1.0); }

 private:
  double descend(Vertex v, std::uint64_t z, double weight) {
    if (static_cast<double>(z) >= t_) return 0.0;
    if (v == labels_.size()) return weight;
    double mass = 0.0;
    for (Symbol s : support_) {
      std::uint64_t extra = 0;
      for (Vertex u : lower_[v]) extra += labels_[u] == s;
      labels_[v] = s;
      mass += descend(v + 1, z + extra, weight * p_[s]);
    }
    labels_[v] = 0;
    return mass;
  }

  const Distribution& p_;
  double t_;
  std::vector<Symbol> labels_;
  std::vector<std::vector<Vertex>> lower_;
  std::vector<Symbol> support_;
};

}  // namespace

double exact_yes_probability(const TesterSpec& spec, const Distribution& p) {
  if (p.n() != spec.n()) throw InvalidArgument("distribution domain does not match tester n");
  const auto& g = spec.graph();
  double outcomes = 1.0;
  for (Vertex i = 0; i < g.vertex_count(); ++i) {
    outcomes *= p.n();
    if (outcomes > static_cast<double>(kMaxEnumeratedOutcomes))
      throw CapacityError("n^|V| exceeds the enumeration cap of " +
                          std::to_string(kMaxEnumeratedOutcomes));
  }
  return YesEnumerator(g, p, threshold(spec)).yes_mass();
}

double exact_error_probability(const TesterSpec& spec, const Distribution& p) {
  const double d = distance_to_uniform(p);
  const double yes = exact_yes_probability(spec, p);
  if (d < 1e-12) return 1.0 - yes;
  if (d >= spec.eps() - 1e-12) return yes;
  throw InvalidArgument("distribution is neither uniform nor eps-far; error is undefined");
}

}  // namespace cbt
