#include "cbt/conditions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "cbt/error.hpp"
#include "cbt/tester.hpp"

namespace cbt {

namespace {

using u128 = unsigned __int128;

std::uint64_t narrow(u128 x, const char* what) {
  if (x > std::numeric_limits<std::uint64_t>::max())
    throw CapacityError(std::string(what) + " does not fit in 64 bits");
  return static_cast<std::uint64_t>(x);
}

void validate_problem(std::uint32_t n, double eps) {
  if (n == 0) throw InvalidDomain("n must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
}

ConditionCheck at_least(double actual, double required) {
  return {required, actual, actual >= required * (1.0 - kConditionSlack)};
}

ConditionCheck at_most(double actual, double bound) {
  return {bound, actual, actual <= bound * (1.0 + kConditionSlack)};
}

ConditionReport finish(ConditionReport r) {
  r.overall = r.cond1.pass && r.cond2.pass && r.cond3.pass;
  return r;
}

bool certifiable(const GraphStats& s, std::uint32_t n, double eps) {
  return certifying_tau_interval(s, n, eps).has_value();
}

/// Smallest x >= lo with pred(x), assuming pred is monotone on [lo, inf).
std::uint64_t smallest_satisfying(std::uint64_t lo, const std::function<bool(std::uint64_t)>& pred,
                                  const char* what) {
  if (pred(lo)) return lo;
  std::uint64_t bad = lo, good = lo;
  for (std::uint64_t step = 1;; step *= 2) {
    if (step > (1ull << 40)) throw CapacityError(std::string(what) + ": no size up to 2^40 certifies");
    good = lo + step;
    if (pred(good)) break;
    bad = good;
  }
  while (good - bad > 1) {
    const std::uint64_t mid = bad + (good - bad) / 2;
    (pred(mid) ? good : bad) = mid;
  }
  return good;
}

/// Attach tau, threshold, certificate and graph statistics to a plan whose
/// blocks are already filled in.
void certify(Plan& plan) {
  std::vector<std::uint64_t> sizes;
  for (const auto& blocks : plan.player_blocks) sizes.insert(sizes.end(), blocks.begin(), blocks.end());
  plan.stats = clique_family_stats(sizes);
  plan.clique_count = 0;
  for (auto s : sizes) plan.clique_count += s > 0;
  const auto interval = certifying_tau_interval(plan.stats, plan.n, plan.eps);
  if (!interval) throw CapacityError("internal: planned graph does not certify");
  plan.tau_interval = *interval;
  plan.tau = interval->midpoint();
  plan.threshold = threshold(plan.stats.edges, plan.tau, plan.n, plan.eps);
  plan.certificate = check_theorem(plan.stats, plan.tau, plan.n, plan.eps);

  plan.predicted.total_samples = plan.stats.vertices;
  plan.predicted.max_samples_per_player = 0;
  for (const auto& blocks : plan.player_blocks)
    plan.predicted.max_samples_per_player = std::max<std::uint64_t>(
        plan.predicted.max_samples_per_player, std::accumulate(blocks.begin(), blocks.end(), std::uint64_t{0}));
  plan.predicted.time = plan.time;
  const bool messages = plan.model == Model::simultaneous || plan.model == Model::asymmetric ||
                        plan.model == Model::simultaneous_streaming;
  plan.predicted.message_bits = messages ? message_bits_for(plan.threshold) : 0;
  if (plan.model == Model::streaming || plan.model == Model::simultaneous_streaming) {
    std::uint64_t largest = 0;
    for (auto s : sizes) largest = std::max(largest, s);
    plan.predicted.memory_bits = largest * bits_per_symbol(plan.n) + counter_bits_for(plan.threshold);
  }
}

void check_counter_budget(const Plan& plan) {
  const auto need = message_bits_for(plan.threshold);
  if (plan.memory_budget_bits / 2 < need)
    throw CapacityError("counter budget: m/2 = " + std::to_string(plan.memory_budget_bits / 2) +
                        " bits < ceil(log2(ceil(T)+2)) = " + std::to_string(need) + " bits");
}

std::uint64_t storable_or_throw(std::uint32_t n, std::uint64_t memory_bits) {
  const auto m_prime = storable_samples(n, memory_bits);
  if (m_prime < 3)
    throw CapacityError("storable samples m' = " + std::to_string(m_prime) +
                        " < 3 (memory " + std::to_string(memory_bits) + " bits)");
  return m_prime;
}

}  // namespace

ConditionReport check_theorem(const GraphStats& s, double tau, std::uint32_t n, double eps) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in the open interval (0, 1)");
  validate_problem(n, eps);
  if (s.edges == 0) throw InvalidArgument("graph needs at least one edge");
  const double e = static_cast<double>(s.edges);
  const double e4 = std::pow(eps, 4);
  const double slack = 1.0 - tau;
  ConditionReport r;
  r.tau = tau;
  r.cond1 = at_least(e, 4.0 * n / (tau * tau * e4));
  r.cond2 = at_least(e, 16.0 * n / (slack * slack * e4));
  r.cond3 = at_most(static_cast<double>(s.two_paths) / (e * e),
                    slack * slack * eps * eps / (16.0 * std::sqrt(static_cast<double>(n))));
  return finish(r);
}

std::optional<TauInterval> certifying_tau_interval(const GraphStats& s, std::uint32_t n, double eps) {
  validate_problem(n, eps);
  if (s.edges == 0) return std::nullopt;
  const double e = static_cast<double>(s.edges);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double lo = 2.0 * root_n / (eps * eps * std::sqrt(e));
  const double from_edges = 4.0 * root_n / (eps * eps * std::sqrt(e));
  const double from_paths = 4.0 * std::sqrt(root_n * static_cast<double>(s.two_paths)) / (e * eps);
  const double hi = 1.0 - std::max(from_edges, from_paths);
  if (!(lo < 1.0 && hi > 0.0 && lo <= hi)) return std::nullopt;
  return TauInterval{lo, hi};
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

GraphStats clique_family_stats(std::span<const std::uint64_t> sizes) {
  u128 v = 0, e = 0, c = 0;
  for (u128 q : sizes) {
    v += q;
    if (q >= 2) e += q * (q - 1) / 2;
    if (q >= 3) c += q * (q - 1) * (q - 2);
  }
  return {narrow(v, "|V|"), narrow(e, "|E|"), narrow(c, "c(G)")};
}

GraphStats disjoint_cliques_stats(std::uint64_t q, std::uint64_t count) {
  const u128 qq = q, l = count;
  const u128 e = qq >= 2 ? l * (qq * (qq - 1) / 2) : 0;
  const u128 c = qq >= 3 ? l * (qq * (qq - 1) * (qq - 2)) : 0;
  return {narrow(qq * l, "|V|"), narrow(e, "|E|"), narrow(c, "c(G)")};
}

DisjointCliquesReport check_disjoint_cliques(std::uint64_t q, std::uint64_t ell, double tau,
                                             std::uint32_t n, double eps) {
  if (q < 3) throw InvalidArgument("disjoint cliques check needs q >= 3");
  if (ell < 1) throw InvalidArgument("disjoint cliques check needs l >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in the open interval (0, 1)");
  validate_problem(n, eps);

  const double root_n = std::sqrt(static_cast<double>(n));
  const double e2 = eps * eps;
  const double slack = 1.0 - tau;
  const double q_root_l = static_cast<double>(q) * std::sqrt(static_cast<double>(ell));
  const double q_l = static_cast<double>(q) * static_cast<double>(ell);

  DisjointCliquesReport r;
  r.q = q;
  r.ell = ell;

  r.lemma.tau = tau;
  r.lemma.cond1 = at_least(q_root_l, std::sqrt(12.0) * root_n / (tau * e2));
  r.lemma.cond2 = at_least(q_root_l, std::sqrt(48.0) * root_n / (slack * e2));
  r.lemma.cond3 = at_least(q_l, 24.0 * root_n / (slack * slack * e2));
  r.lemma = finish(r.lemma);

  r.rederived = r.lemma;
  r.rederived.cond3 = at_least(q_l, 144.0 * root_n / (slack * slack * e2));
  r.rederived = finish(r.rederived);

  const GraphStats exact = disjoint_cliques_stats(q, ell);
  r.direct = check_theorem(exact, tau, n, eps);
  GraphStats triples = exact;
  triples.two_paths = exact.two_paths / 6;  // l C(q,3), exact since 6 | q(q-1)(q-2)
  r.triple_convention = check_theorem(triples, tau, n, eps);

  r.corollary_bound_met = q_root_l >= 35.0 * root_n / e2 * (1.0 - kConditionSlack);
  return r;
}

std::string_view to_string(Model m) noexcept {
  switch (m) {
    case Model::centralized: return "centralized";
    case Model::simultaneous: return "simultaneous";
    case Model::asymmetric: return "asymmetric";
    case Model::streaming: return "streaming";
    case Model::simultaneous_streaming: return "simultaneous_streaming";
  }
  return "unknown";
}

std::string_view to_string(GraphFamily f) noexcept {
  switch (f) {
    case GraphFamily::clique: return "clique";
    case GraphFamily::disjoint_cliques: return "disjoint_cliques";
    case GraphFamily::per_rate_cliques: return "per_rate_cliques";
    case GraphFamily::batched_cliques: return "batched_cliques";
  }
  return "unknown";
}

std::optional<Model> parse_model(std::string_view s) noexcept {
  for (auto m : {Model::centralized, Model::simultaneous, Model::asymmetric, Model::streaming,
                 Model::simultaneous_streaming})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::uint32_t bits_per_symbol(std::uint32_t n) { return std::max<std::uint32_t>(1, ceil_log2(n)); }

std::uint32_t ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return static_cast<std::uint32_t>(std::bit_width(x - 1));
}

std::uint32_t message_bits_for(double t) {
  return ceil_log2(static_cast<std::uint64_t>(std::ceil(t)) + 2);
}

std::uint32_t counter_bits_for(double t) {
  return ceil_log2(static_cast<std::uint64_t>(std::ceil(t)) + 1);
}

std::uint64_t storable_samples(std::uint32_t n, std::uint64_t memory_bits) {
  return memory_bits / (2ull * bits_per_symbol(n));
}

Plan plan_centralized(std::uint32_t n, double eps) {
  validate_problem(n, eps);
  const auto q = smallest_satisfying(
      3, [&](std::uint64_t q) { return certifiable(disjoint_cliques_stats(q, 1), n, eps); },
      "centralized clique");
  Plan plan;
  plan.model = Model::centralized;
  plan.family = GraphFamily::clique;
  plan.n = n;
  plan.eps = eps;
  plan.players = 1;
  plan.player_blocks = {{q}};
  plan.clique_size = q;
  certify(plan);
  return plan;
}

Plan plan_simultaneous(std::uint32_t n, double eps, std::uint32_t players) {
  validate_problem(n, eps);
  if (players < 1) throw InvalidArgument("simultaneous model needs k >= 1");
  auto ok = [&](std::uint64_t q) { return certifiable(disjoint_cliques_stats(q, players), n, eps); };
  // Sizes 2 and 3 break monotonicity of c(G)/|E|^2 (a matching has none), so
  // q' = 2 is tried on its own before searching from 3.
  const std::uint64_t q = ok(2) ? 2 : smallest_satisfying(3, ok, "per-player clique");
  Plan plan;
  plan.model = Model::simultaneous;
  plan.family = GraphFamily::disjoint_cliques;
  plan.n = n;
  plan.eps = eps;
  plan.players = players;
  plan.player_blocks.assign(players, {q});
  plan.clique_size = q;
  certify(plan);
  return plan;
}

namespace {

std::vector<std::uint64_t> sizes_at(std::span<const double> rates, double t) {
  std::vector<std::uint64_t> q(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i)
    q[i] = static_cast<std::uint64_t>(std::floor(rates[i] * t));
  return q;
}

}  // namespace

Plan plan_asymmetric(std::uint32_t n, double eps, std::span<const double> rates) {
  validate_problem(n, eps);
  if (rates.empty()) throw InvalidArgument("asymmetric model needs at least one rate");
  double norm = 0.0;
  for (double r : rates) {
    if (!std::isfinite(r) || r < 0.0) throw InvalidArgument("rates must be finite and >= 0");
    norm += r * r;
  }
  if (norm == 0.0) throw InvalidArgument("at least one rate must be positive");

  auto ok = [&](double t) { return certifiable(clique_family_stats(sizes_at(rates, t)), n, eps); };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > 1e15) throw CapacityError("asymmetric plan: no sampling time up to 1e15 certifies");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (ok(mid) ? hi : lo) = mid;
  }
  // Snap to the earliest time at which every player has her final count.
  const auto q = sizes_at(rates, hi);
  double t = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (rates[i] > 0.0) t = std::max(t, static_cast<double>(q[i]) / rates[i]);
  auto reached = [&](double at) {
    const auto now = sizes_at(rates, at);
    for (std::size_t i = 0; i < q.size(); ++i)
      if (now[i] < q[i]) return false;
    return true;
  };
  while (!reached(t)) t = std::nextafter(t, hi + 1.0);

  Plan plan;
  plan.model = Model::asymmetric;
  plan.family = GraphFamily::per_rate_cliques;
  plan.n = n;
  plan.eps = eps;
  plan.players = static_cast<std::uint32_t>(rates.size());
  plan.rates.assign(rates.begin(), rates.end());
  plan.time = t;
  for (auto s : sizes_at(rates, t)) plan.player_blocks.push_back({s});
  certify(plan);
  return plan;
}

Plan plan_streaming(std::uint32_t n, double eps, std::uint64_t memory_bits) {
  validate_problem(n, eps);
  const auto m_prime = storable_or_throw(n, memory_bits);
  const Plan central = plan_centralized(n, eps);

  Plan plan;
  plan.model = Model::streaming;
  plan.n = n;
  plan.eps = eps;
  plan.players = 1;
  plan.memory_budget_bits = memory_bits;
  plan.storable_samples = m_prime;
  if (m_prime >= central.clique_size) {
    plan.family = GraphFamily::clique;
    plan.clique_size = central.clique_size;
    plan.player_blocks = {{central.clique_size}};
  } else {
    // Any batch size up to m' is storable; the smallest total wins, ties
    // going to the larger batch.
    std::uint64_t best_total = std::numeric_limits<std::uint64_t>::max(), best_b = 0, best_l = 0;
    for (std::uint64_t b = m_prime; b >= 3; --b) {
      const auto l = smallest_satisfying(
          1, [&](std::uint64_t l) { return certifiable(disjoint_cliques_stats(b, l), n, eps); },
          "streaming batches");
      if (b * l < best_total) {
        best_total = b * l;
        best_b = b;
        best_l = l;
      }
    }
    plan.family = GraphFamily::batched_cliques;
    plan.clique_size = best_b;
    plan.player_blocks = {std::vector<std::uint64_t>(best_l, best_b)};
  }
  certify(plan);
  check_counter_budget(plan);
  return plan;
}

Plan plan_simultaneous_streaming(std::uint32_t n, double eps, std::uint32_t players,
                                 std::uint64_t memory_bits) {
  validate_problem(n, eps);
  if (players < 1) throw InvalidArgument("simultaneous model needs k >= 1");
  const auto m_prime = storable_or_throw(n, memory_bits);
  const Plan simultaneous = plan_simultaneous(n, eps, players);

  Plan plan;
  plan.model = Model::simultaneous_streaming;
  plan.n = n;
  plan.eps = eps;
  plan.players = players;
  plan.memory_budget_bits = memory_bits;
  plan.storable_samples = m_prime;
  if (m_prime >= simultaneous.clique_size) {
    plan.family = GraphFamily::disjoint_cliques;
    plan.clique_size = simultaneous.clique_size;
    plan.player_blocks.assign(players, {simultaneous.clique_size});
  } else {
    std::uint64_t best_per_player = std::numeric_limits<std::uint64_t>::max(), best_b = 0, best_l = 0;
    for (std::uint64_t b = m_prime; b >= 3; --b) {
      const auto l = smallest_satisfying(
          1,
          [&](std::uint64_t l) { return certifiable(disjoint_cliques_stats(b, l * players), n, eps); },
          "per-player batches");
      if (b * l < best_per_player) {
        best_per_player = b * l;
        best_b = b;
        best_l = l;
      }
    }
    plan.family = GraphFamily::batched_cliques;
    plan.clique_size = best_b;
    plan.player_blocks.assign(players, std::vector<std::uint64_t>(best_l, best_b));
  }
  certify(plan);
  check_counter_budget(plan);
  return plan;
}

ComparisonGraph instantiate(const Plan& plan) {
  std::vector<Vertex> sizes;
  std::vector<std::uint32_t> owners;
  std::uint32_t batch = 0;
  for (std::uint32_t p = 0; p < plan.player_blocks.size(); ++p) {
    for (auto s : plan.player_blocks[p]) {
      if (s > std::numeric_limits<Vertex>::max()) throw CapacityError("clique too large to instantiate");
      sizes.push_back(static_cast<Vertex>(s));
      owners.push_back(plan.model == Model::streaming ? batch++ : p);
    }
  }
  return ComparisonGraph::from_clique_blocks(sizes, std::move(owners));
}

double headline_resource(const Plan& plan) {
  switch (plan.model) {
    case Model::centralized:
    case Model::streaming: return static_cast<double>(plan.predicted.total_samples);
    case Model::simultaneous:
    case Model::simultaneous_streaming:
      return static_cast<double>(plan.predicted.max_samples_per_player);
    case Model::asymmetric: return plan.time;
  }
  return 0.0;
}

double conjectured_min_edges(std::uint32_t n, double eps, double coefficient) {
  validate_problem(n, eps);
  return coefficient * n / std::pow(eps, 4);
}

double floor_centralized(double min_edges) { return std::sqrt(2.0 * min_edges); }

double floor_simultaneous(double min_edges, std::uint32_t players) {
  if (players < 1) throw InvalidArgument("k must be >= 1");
  return std::sqrt(2.0 * min_edges / players);
}

double floor_asymmetric(double min_edges, std::span<const double> rates) {
  double norm = 0.0;
  for (double r : rates) norm += r * r;
  if (norm <= 0.0) throw InvalidArgument("at least one rate must be positive");
  return std::sqrt(2.0 * min_edges) / std::sqrt(norm);
}

double floor_streaming(double min_edges, std::uint64_t storable) {
  if (storable < 1) throw InvalidArgument("m' must be >= 1");
  return min_edges / static_cast<double>(storable);
}

double floor_simultaneous_streaming(double min_edges, std::uint32_t players, std::uint64_t storable) {
  if (storable < 1) throw InvalidArgument("m' must be >= 1");
  return std::max(floor_simultaneous(min_edges, players),
                  min_edges / (static_cast<double>(storable) * players));
}

double conjectured_floor(const Plan& plan, double min_edges) {
  switch (plan.model) {
    case Model::centralized: return floor_centralized(min_edges);
    case Model::simultaneous: return floor_simultaneous(min_edges, plan.players);
    case Model::asymmetric: return floor_asymmetric(min_edges, plan.rates);
    case Model::streaming: return floor_streaming(min_edges, plan.storable_samples);
    case Model::simultaneous_streaming:
      return floor_simultaneous_streaming(min_edges, plan.players, plan.storable_samples);
  }
  return 0.0;
}

CounterexampleResult appendix_counterexample(std::uint32_t n, double eps, double b,
                                             std::span<const double> tau_grid) {
  validate_problem(n, eps);
  if (!(b > 0.0)) throw InvalidArgument("b must be positive");
  if (tau_grid.empty()) throw InvalidArgument("tau grid is empty");
  const double length_real = std::ceil(b * n / std::pow(eps, 4));
  if (length_real > 5e6) throw CapacityError("cycle length b n / eps^4 exceeds 5e6 vertices");
  const auto length = static_cast<Vertex>(std::max(3.0, length_real));

  ComparisonGraph cycle = make_cycle(length);
  std::vector<Edge> edges(cycle.edges().begin(), cycle.edges().end());
  for (Vertex v = 2; v + 1 < length; ++v) edges.push_back({0, v});
  ComparisonGraph augmented(length, std::move(edges));

  std::vector<ConditionReport> h_reports, g_reports;
  bool h_any = false, g_fail_all = true;
  for (double tau : tau_grid) {
    h_reports.push_back(check_theorem(cycle, tau, n, eps));
    g_reports.push_back(check_theorem(augmented, tau, n, eps));
    h_any = h_any || h_reports.back().overall;
    g_fail_all = g_fail_all && !g_reports.back().cond3.pass;
  }
  if (!h_any)
    throw CapacityError("b = " + std::to_string(b) + " is too small: the cycle on " +
                        std::to_string(length) + " vertices certifies for no tau in the grid");
  const double e = static_cast<double>(augmented.stats().edges);
  const double ratio = static_cast<double>(augmented.stats().two_paths) / (e * e);
  return {std::move(cycle), std::move(augmented), std::move(h_reports), std::move(g_reports),
          h_any, g_fail_all, ratio};
}

}  // namespace cbt
