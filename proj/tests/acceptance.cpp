// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Detail lines go to stdout before each verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cbt/congest.hpp"
#include "cbt/error.hpp"
#include "cbt/harness.hpp"
#include "cbt/models.hpp"

using namespace cbt;

namespace {

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (failures_ <= 20) std::printf("    FAILED: %s\n", what.c_str());
    }
  }
  bool ok() const { return failures_ == 0 && checks_ > 0; }
  std::uint64_t checks() const { return checks_; }
  std::uint64_t failures() const { return failures_; }

 private:
  std::uint64_t checks_ = 0;
  std::uint64_t failures_ = 0;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::shared_ptr<const ComparisonGraph> shared(ComparisonGraph g) {
  return std::make_shared<const ComparisonGraph>(std::move(g));
}

double yes_rate(const std::function<Decision(std::uint64_t)>& trial, std::uint64_t trials) {
  std::uint64_t yes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) yes += trial(t) == Decision::yes;
  return static_cast<double>(yes) / static_cast<double>(trials);
}

// --- 1 -------------------------------------------------------------------------
void moments(Check& c) {
  const std::vector<std::pair<std::string, ComparisonGraph>> graphs = {
      {"clique(8)", make_clique(8)},
      {"matching(20)", make_matching(20)},
      {"star(15)", make_star(15)},
      {"cycle(12)", make_cycle(12)},
      {"disjoint_cliques(5,4)", make_disjoint_cliques(5, 4)}};
  const std::vector<std::pair<std::string, Distribution>> dists = {
      {"uniform(10)", make_uniform(10)}, {"bump(10,0.5)", make_bump(10, 0.5)}, {"heavy(10,0.5)", make_heavy(10, 0.5)}};
  const std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::printf("  %-22s %-14s %10s %10s %7s %10s %10s %8s\n", "graph", "dist", "E[Z]", "mean", "z", "Var[Z]",
              "s^2", "relerr");
  for (const auto& [gname, g] : graphs)
    for (const auto& [dname, p] : dists) {
      const auto a = moment_audit(g, p, trials, seed++);
      std::printf("  %-22s %-14s %10.5f %10.5f %7.3f %10.5f %10.5f %8.4f\n", gname.c_str(), dname.c_str(),
                  a.expected_mean, a.sample_mean, a.mean_z, a.expected_variance, a.sample_variance,
                  a.variance_relative_error);
      const std::string id = gname + " x " + dname;
      c.expect(std::abs(a.sample_mean - a.expected_mean) <= 4 * std::sqrt(a.expected_variance / trials),
               id + ": mean outside 4 sigma");
      if (a.expected_variance >= 0.01)
        c.expect(a.variance_relative_error <= 0.10, id + ": variance relative error above 10%");
    }
}

// --- 2 -------------------------------------------------------------------------
// Weighted enumeration written independently of the library oracle.
double enumerate_yes(const ComparisonGraph& g, const Distribution& p, double t) {
  const std::uint32_t n = p.n();
  const std::uint32_t v = g.vertex_count();
  std::vector<std::uint32_t> lab(v, 0);
  double total = 0;
  while (true) {
    std::uint64_t z = 0;
    for (const auto& e : g.edges()) z += lab[e.u] == lab[e.v];
    if (static_cast<double>(z) < t) {
      double w = 1;
      for (auto x : lab) w *= p.probs()[x];
      total += w;
    }
    std::uint32_t i = 0;
    while (i < v && ++lab[i] == n) lab[i++] = 0;
    if (i == v) break;
  }
  return total;
}

void brute_force(Check& c) {
  struct Case {
    std::string name;
    ComparisonGraph g;
    Distribution p;
    double tau;
    double eps;
  };
  const std::vector<Case> cases = {
      {"K3, uniform(3)", make_clique(3), make_uniform(3), 0.5, 1.0},
      {"K3, uniform(3), tau .25", make_clique(3), make_uniform(3), 0.25, 0.5},
      {"matching(2), uniform(4)", make_matching(2), make_uniform(4), 0.5, 1.0},
      {"edge, uniform(2)", make_matching(1), make_uniform(2), 0.5, 1.0},
      {"K4, bump(4,.5)", make_clique(4), make_bump(4, 0.5), 0.5, 0.5},
      {"star(3), uniform(4)", make_star(3), make_uniform(4), 0.5, 1.0},
      {"K5, uniform(4)", make_clique(5), make_uniform(4), 0.3, 1.0},
      {"matching(3), heavy(4,.5)", make_matching(3), make_heavy(4, 0.5), 0.4, 0.5},
      {"cycle(5), uniform(6)", make_cycle(5), make_uniform(6), 0.5, 1.0},
      {"K6, bump(6,1)", make_clique(6), make_bump(6, 1.0), 0.5, 1.0},
      {"path(4), heavy(8,1)", make_path(4), make_heavy(8, 1.0), 0.3, 1.0},
  };
  // Exact fractions from tests/oracle/enumerate.py for the first seven cases.
  const std::vector<double> frozen = {8.0 / 9, 8.0 / 9, 9.0 / 16, 0.5, 261.0 / 512, 27.0 / 32, 105.0 / 128};
  const std::uint64_t trials = 10000;
  std::printf("  %-26s %12s %12s %10s %8s\n", "case", "exact P[YES]", "MC P[YES]", "error", "z");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& k = cases[i];
    const TesterSpec spec(shared(k.g), k.tau, k.p.n(), k.eps);
    const double exact = exact_yes_probability(spec, k.p);
    const double error = exact_error_probability(spec, k.p);
    const double mine = enumerate_yes(k.g, k.p, threshold(spec));
    const double mc = yes_rate([&](std::uint64_t t) { return run(spec, k.p, {2002, t, 0}).decision; }, trials);
    const double sd = std::sqrt(exact * (1 - exact) / trials);
    std::printf("  %-26s %12.8f %12.5f %10.6f %8.3f\n", k.name.c_str(), exact, mc, error,
                sd > 0 ? (mc - exact) / sd : 0.0);
    c.expect(std::abs(exact - mine) <= 1e-12, k.name + ": library enumeration differs from test enumeration");
    if (i < frozen.size()) c.expect(std::abs(exact - frozen[i]) <= 1e-12, k.name + ": differs from frozen fraction");
    const bool uniform = distance_to_uniform(k.p) < 1e-12;
    c.expect(std::abs(error - (uniform ? 1 - exact : exact)) <= 1e-12, k.name + ": error probability inconsistent");
    c.expect(std::abs(mc - exact) <= 3 * sd + 1e-12, k.name + ": Monte Carlo outside 3 sigma");
  }
}

// --- 3 -------------------------------------------------------------------------
void centralized_end_to_end(Check& c) {
  const std::uint64_t trials = 2000;
  std::printf("  %5s %5s %6s %9s %9s %9s %9s\n", "n", "eps", "q", "tau", "uniform", "bump", "heavy");
  std::uint64_t seed = 30;
  for (std::uint32_t n : {64u, 100u, 256u})
    for (double eps : {0.5, 1.0}) {
      const Plan plan = plan_centralized(n, eps);
      const TesterSpec spec(shared(instantiate(plan)), plan.tau, n, eps);
      const auto rate = [&](const Distribution& p) {
        ++seed;
        return yes_rate([&](std::uint64_t t) { return run(spec, p, {seed, t, 0}).decision; }, trials);
      };
      const double u = rate(make_uniform(n));
      const double b = rate(make_bump(n, eps));
      const double h = rate(make_heavy(n, eps));
      std::printf("  %5u %5.2f %6llu %9.5f %9.4f %9.4f %9.4f\n", n, eps,
                  static_cast<unsigned long long>(plan.clique_size), plan.tau, u, b, h);
      const std::string id = fmt("n=%g eps=%g", n, eps);
      c.expect(u >= 0.70, id + ": uniform YES-rate below 0.70");
      c.expect(b <= 0.30, id + ": bump YES-rate above 0.30");
      c.expect(h <= 0.30, id + ": heavy YES-rate above 0.30");
    }
}

// --- 4 -------------------------------------------------------------------------
void corollary_constant(Check& c) {
  struct Row {
    std::uint64_t q, ell;
    std::uint32_t n;
    double eps;
    bool lemma, direct, triple;
  };
  std::vector<Row> disagreements;
  std::uint64_t points = 0, agree = 0, plans = 0;
  const double tau = 1.0 / 9;
  for (std::uint64_t q : {3ull, 4ull, 5ull, 8ull, 12ull, 20ull, 35ull, 50ull, 100ull})
    for (std::uint32_t n : {1u, 16u, 100u, 256u})
      for (double eps : {0.5, 1.0}) {
        const double target = 35 * std::sqrt(static_cast<double>(n)) / (eps * eps);
        const auto ell_cor = static_cast<std::uint64_t>(std::ceil(std::pow(target / q, 2) - 1e-9));
        const std::uint64_t ell = std::max<std::uint64_t>(1, ell_cor);
        // Point on the corollary boundary: the closed forms against the direct check.
        const auto r = check_disjoint_cliques(q, ell, tau, n, eps);
        ++points;
        c.expect(r.corollary_bound_met, fmt("q=%g l=%g n=%g eps=%g: corollary bound not met", q, ell, n, eps));
        if (r.lemma.overall == r.direct.overall) {
          ++agree;
        } else {
          disagreements.push_back({q, ell, n, eps, r.lemma.overall, r.direct.overall, r.triple_convention.overall});
          // Inside the band: the lemma passes, the directed count fails only
          // condition 3, and one sixth of the count restores agreement.
          const bool in_band = r.lemma.overall && !r.direct.overall && r.direct.cond1.pass && r.direct.cond2.pass &&
                               !r.direct.cond3.pass && r.triple_convention.overall;
          c.expect(in_band, fmt("q=%g l=%g n=%g eps=%g: disagreement outside the factor-6 band", q, ell, n, eps));
        }
        // Plan with the re-derived third condition on top of the corollary bound.
        const double need = 144 * std::sqrt(static_cast<double>(n)) / ((1 - tau) * (1 - tau) * eps * eps);
        std::uint64_t ell_re = std::max<std::uint64_t>(ell, static_cast<std::uint64_t>(std::ceil(need / q)));
        while (!check_disjoint_cliques(q, ell_re, tau, n, eps).rederived.overall) ++ell_re;
        const auto p = check_disjoint_cliques(q, ell_re, tau, n, eps);
        ++plans;
        c.expect(p.corollary_bound_met && p.direct.overall,
                 fmt("q=%g l=%g n=%g eps=%g: re-derived plan fails the direct check", q, ell_re, n, eps));
        c.expect(check_theorem(make_disjoint_cliques(q, ell_re), tau, n, eps).overall == p.direct.overall ||
                     q * ell_re > 2'000'000,
                 "instantiated graph disagrees with closed-form statistics");
      }
  std::printf("  grid points %llu, closed form agrees with direct check on %llu, re-derived plans %llu\n",
              static_cast<unsigned long long>(points), static_cast<unsigned long long>(agree),
              static_cast<unsigned long long>(plans));
  std::printf("  disagreements (tau = 1/9):\n  %5s %9s %5s %5s %7s %7s %8s\n", "q", "l", "n", "eps", "lemma",
              "direct", "triples");
  for (const auto& d : disagreements)
    std::printf("  %5llu %9llu %5u %5.2f %7s %7s %8s\n", static_cast<unsigned long long>(d.q),
                static_cast<unsigned long long>(d.ell), d.n, d.eps, d.lemma ? "pass" : "fail",
                d.direct ? "pass" : "fail", d.triple ? "pass" : "fail");
  c.expect(points >= 50, "fewer than 50 grid points");
}

// --- 5 -------------------------------------------------------------------------
void simulators(Check& c) {
  struct Case {
    std::string name;
    Plan plan;
  };
  const std::vector<Case> cases = {
      {"simultaneous k=4", plan_simultaneous(64, 1.0, 4)},
      {"simultaneous k=16", plan_simultaneous(64, 1.0, 16)},
      {"asymmetric R=(1,1,1,1)", plan_asymmetric(64, 1.0, std::vector<double>{1, 1, 1, 1})},
      {"asymmetric R=(4,2,1)", plan_asymmetric(64, 1.0, std::vector<double>{4, 2, 1})},
      {"streaming m'=4", plan_streaming(256, 1.0, 64)},
      {"streaming m'=8", plan_streaming(256, 1.0, 128)},
      {"simultaneous streaming k=4 m'=4", plan_simultaneous_streaming(256, 1.0, 4, 64)},
  };
  std::printf("  %-34s %6s %6s %6s %6s %8s %8s\n", "model", "runs", "agree", "early", "yes", "msgbits", "peakmem");
  for (const auto& [name, plan] : cases) {
    const std::vector<Distribution> dists = {make_uniform(plan.n), make_bump(plan.n, plan.eps),
                                             make_heavy(plan.n, plan.eps)};
    const auto graph = shared(instantiate(plan));
    const TesterSpec spec(graph, plan.tau, plan.n, plan.eps);
    const auto width = static_cast<std::uint64_t>(std::ceil(std::log2(std::ceil(plan.threshold) + 2)));
    std::uint64_t agree = 0, early = 0, yes = 0, max_bits = 0, peak = 0;
    const std::uint64_t runs = 200;
    for (std::uint64_t t = 0; t < runs; ++t) {
      const auto& p = dists[t % 3];
      const StreamId trial{5000, t, 0};
      SimulationResult r;
      try {
        r = simulate(plan, p, trial);
      } catch (const Error& e) {
        c.expect(false, name + ": " + e.what());
        continue;
      }
      const auto mono = evaluate(spec, model_labeling(plan, p, trial));
      if (r.early_terminated) {
        ++early;
        c.expect(r.decision == Decision::no && mono.decision == Decision::no, name + ": early stop not NO in both");
      } else {
        c.expect(r.decision == mono.decision, name + ": decision differs from monolithic tester");
        c.expect(r.ledger.total_samples() == plan.predicted.total_samples, name + ": sample count differs from plan");
      }
      agree += r.decision == mono.decision;
      yes += r.decision == Decision::yes;
      c.expect(r.ledger.violations.empty(), name + ": ledger violation");
      if (plan.model != Model::streaming) {
        for (const auto& u : r.ledger.players) c.expect(u.message_bits == width, name + ": message width");
      }
      if (plan.model == Model::asymmetric) {
        c.expect(r.ledger.time == plan.time, name + ": time differs from plan");
        for (std::size_t i = 0; i < plan.rates.size(); ++i)
          c.expect(r.ledger.players[i].samples == static_cast<std::uint64_t>(std::floor(plan.rates[i] * plan.time)),
                   name + ": q_i differs from floor(R_i t)");
      }
      if (plan.memory_budget_bits > 0)
        c.expect(r.ledger.max_memory_bits() <= plan.memory_budget_bits, name + ": memory above budget");
      max_bits = std::max(max_bits, r.ledger.max_message_bits());
      peak = std::max(peak, r.ledger.max_memory_bits());
    }
    std::printf("  %-34s %6llu %6llu %6llu %6llu %8llu %8llu\n", name.c_str(), static_cast<unsigned long long>(runs),
                static_cast<unsigned long long>(agree), static_cast<unsigned long long>(early),
                static_cast<unsigned long long>(yes), static_cast<unsigned long long>(max_bits),
                static_cast<unsigned long long>(peak));
  }
}

// --- 6 -------------------------------------------------------------------------
std::uint64_t brute_two_paths(const ComparisonGraph& g) {
  std::uint64_t c = 0;
  for (const auto& a : g.edges())
    for (const auto& b : g.edges())
      if (!(a == b) && (a.u == b.u) + (a.u == b.v) + (a.v == b.u) + (a.v == b.v) == 1) ++c;
  return c;
}

void inequalities(Check& c) {
  std::vector<ComparisonGraph> corpus;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (std::uint64_t i = 0; i < 500; ++i) corpus.push_back(make_random_graph(1 + rng() % 50, prob(rng), i));
  for (Vertex q = 2; q <= 12; ++q) corpus.push_back(make_clique(q));
  for (Vertex q : {2u, 3u, 5u})
    for (std::uint32_t l : {1u, 2u, 4u}) corpus.push_back(make_disjoint_cliques(q, l));
  for (Vertex m = 1; m <= 6; ++m) corpus.push_back(make_matching(m));
  for (Vertex s = 1; s <= 11; ++s) corpus.push_back(make_star(s));
  for (Vertex a = 1; a <= 5; ++a)
    for (Vertex b = 1; b <= 6; ++b) corpus.push_back(make_bipartite(a, b));
  for (Vertex l = 3; l <= 12; ++l) corpus.push_back(make_cycle(l));
  for (Vertex l = 2; l <= 12; ++l) corpus.push_back(make_path(l));
  corpus.push_back(make_clique(50));
  corpus.push_back(make_star(49));
  std::uint64_t brute = 0, applicable = 0;
  for (const auto& g : corpus) {
    const auto r = check_graph_inequalities(g);
    c.expect(r.all_pass(), fmt("inequality fails on |V|=%g |E|=%g", g.vertex_count(), g.stats().edges));
    applicable += r.two_path_bound.applicable;
    if (g.vertex_count() <= 12) {
      ++brute;
      c.expect(brute_two_paths(g) == g.stats().two_paths, "degree formula differs from ordered-pair count");
    }
  }
  std::printf("  graphs %zu (500 random), brute-force c(G) checks %llu, |V| <= |E| cases %llu\n", corpus.size(),
              static_cast<unsigned long long>(brute), static_cast<unsigned long long>(applicable));
}

// --- 7 -------------------------------------------------------------------------
void congest(Check& c) {
  using RC = RoundConstants;
  const std::uint32_t n = 16;
  const double eps = 1.0;
  const auto k = static_cast<std::uint32_t>(plan_centralized(n, eps).clique_size);
  const auto grid = default_tau_grid();

  // Clique topology.
  const auto clique = make_clique_network(k);
  const auto bfs = build_bfs_tree(clique, n, true);
  const auto det = detect_topology(clique, bfs.tree, n, eps, grid, true);
  c.expect(det.certified, "clique topology not certified");
  std::printf("  clique K_%u: D=%u, detection certified=%d tau*=%.2f\n", k, clique.diameter(), det.certified,
              det.tau_star.value_or(0.0));
  if (det.certified) {
    const std::uint32_t bound = 1 + RC::c_sum * clique.diameter() + RC::c0;
    const auto sample = local_collision_protocol(clique, bfs.tree, n, eps, det.tau_star, make_uniform(n), {1, 0, 0},
                                                 true);
    const auto replayed = replay(clique, *sample.report.transcript, sample.report.channel_bits);
    c.expect(replayed.within_budget, "local protocol transcript exceeds the channel");
    c.expect(replayed.rounds <= sample.report.rounds, "replayed rounds exceed reported rounds");
    const std::uint64_t trials = 2000;
    std::uint32_t max_rounds = 0, max_bits = 0;
    const auto rate = [&](const Distribution& p, std::uint64_t seed) {
      return yes_rate(
          [&](std::uint64_t t) {
            const auto r = local_collision_protocol(clique, bfs.tree, n, eps, det.tau_star, p, {seed, t, 0});
            max_rounds = std::max(max_rounds, r.report.rounds);
            max_bits = std::max(max_bits, r.report.max_edge_bits);
            return r.decision;
          },
          trials);
    };
    const double u = rate(make_uniform(n), 71), b = rate(make_bump(n, eps), 72), h = rate(make_heavy(n, eps), 73);
    std::printf("  local protocol: rounds %u (bound %u), max edge bits %u (channel %u), YES-rate uniform %.4f "
                "bump %.4f heavy %.4f\n",
                max_rounds, bound, max_bits, sample.report.channel_bits, u, b, h);
    c.expect(max_rounds <= bound, "local protocol over its round bound");
    c.expect(max_bits <= sample.report.channel_bits, "local protocol exceeded the channel");
    c.expect(u >= 0.70, "local protocol uniform YES-rate below 0.70");
    c.expect(b <= 0.30, "local protocol bump YES-rate above 0.30");
    c.expect(h <= 0.30, "local protocol heavy YES-rate above 0.30");
  }

  // Path topology, at a domain size where it cannot certify.
  const std::uint32_t path_n = 100;
  const std::uint32_t path_k = 3000;
  const auto path = make_path_network(path_k);
  const auto path_bfs = build_bfs_tree(path, path_n);
  const auto path_det = detect_topology(path, path_bfs.tree, path_n, eps, grid);
  bool refused = false;
  try {
    local_collision_protocol(path, path_bfs.tree, path_n, eps, path_det.tau_star, make_uniform(path_n), {1, 0, 0});
  } catch (const ProtocolRefused&) {
    refused = true;
  }
  c.expect(!path_det.certified && refused, "local protocol did not refuse the path topology");
  std::uint32_t worst = 0, bound = 0, s = 0, matched = 0;
  const std::uint32_t path_trials = 20;
  for (std::uint64_t t = 0; t < path_trials; ++t) {
    const auto p = t % 2 ? make_bump(path_n, eps) : make_uniform(path_n);
    const auto r = combined_protocol(path, path_n, eps, p, {81, t, 0}, grid, t == 0);
    c.expect(r.path == CombinedPath::pipelined && r.pipeline.has_value(), "combined protocol did not pipeline");
    if (!r.pipeline) continue;
    s = r.pipeline->bundle_size;
    bound = RC::c_pipe * (path.diameter() + s) + RC::c0;
    worst = std::max(worst, r.rounds);
    c.expect(r.rounds <= bound, "pipelined path over c_pipe (D + s) + c0");
    c.expect(r.report.max_edge_bits <= r.report.channel_bits, "pipelined path exceeded the channel");
    if (t == 0) c.expect(replay(path, *r.report.transcript, r.report.channel_bits).within_budget, "replay over budget");
    SampleLabeling flat;
    for (const auto& b : r.pipeline->bundle_samples) flat.values.insert(flat.values.end(), b.begin(), b.end());
    const TesterSpec spec(shared(make_disjoint_cliques(s, r.pipeline->bundles)), r.pipeline->tau, path_n, eps);
    matched += evaluate(spec, flat).decision == r.decision;
  }
  c.expect(matched == path_trials, "pipelined decision differs from the disjoint-cliques tester on its bundles");
  std::printf("  path P_%u, n=%u: D=%u, refused=%d, combined rounds max %u (bound %u, s=%u), bundle tester agreement %u/%u\n",
              path_k, path_n, path.diameter(), refused, worst, bound, s, matched, path_trials);

  // Aggregation on random connected topologies.
  std::uint32_t exact = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto net = make_random_network(2 + seed % 80, 0.05 + 0.002 * seed, 7000 + seed);
    const auto tree = build_bfs_tree(net, n).tree;
    const auto d = detect_topology(net, tree, n, eps, grid);
    const bool ok = d.edges == net.topology().stats().edges && d.two_paths == net.topology().stats().two_paths;
    exact += ok;
    c.expect(ok, "aggregated statistics differ from direct count");
    c.expect(d.report.rounds <= RC::c_det * net.diameter(), "detection over c_det D");
  }
  std::printf("  random connected topologies: %u/100 aggregates exact\n", exact);
}

// --- 8 -------------------------------------------------------------------------
void counterexample(Check& c) {
  const auto grid = default_tau_grid();
  const auto r = appendix_counterexample(16, 1.0, 64, grid);
  const auto& s = r.augmented.stats();
  const double ratio = static_cast<double>(s.two_paths) / (static_cast<double>(s.edges) * s.edges);
  std::size_t certifying = 0, cond3_fail = 0;
  for (const auto& rep : r.cycle_reports) certifying += rep.overall;
  for (const auto& rep : r.augmented_reports) cond3_fail += !rep.cond3.pass;
  std::printf("  H: |V|=%llu |E|=%llu c=%llu, certifying taus %zu/%zu\n",
              static_cast<unsigned long long>(r.cycle.stats().vertices),
              static_cast<unsigned long long>(r.cycle.stats().edges),
              static_cast<unsigned long long>(r.cycle.stats().two_paths), certifying, grid.size());
  std::printf("  G: |E|=%llu c=%llu, c/|E|^2 = %.6f (1/12 = %.6f), condition 3 fails at %zu/%zu taus\n",
              static_cast<unsigned long long>(s.edges), static_cast<unsigned long long>(s.two_paths), ratio, 1.0 / 12,
              cond3_fail, grid.size());
  c.expect(certifying > 0 && r.cycle_certified_somewhere, "cycle does not certify anywhere");
  c.expect(r.cycle.stats().two_paths == 2 * r.cycle.stats().edges, "c(H) != 2|E_H|");
  c.expect(cond3_fail == grid.size() && r.augmented_fails_cond3_everywhere, "augmented graph passes condition 3 somewhere");
  c.expect(ratio >= 1.0 / 12, "c(G)/|E_G|^2 below 1/12");
}

// --- 9 -------------------------------------------------------------------------
void floors(Check& c) {
  std::uint64_t compared = 0;
  for (std::uint32_t n : {4u, 16u, 64u, 100u, 256u})
    for (double eps : {0.5, 1.0}) {
      const double e = conjectured_min_edges(n, eps);
      std::vector<Plan> plans = {plan_centralized(n, eps)};
      for (std::uint32_t k : {1u, 2u, 4u, 16u, 64u}) plans.push_back(plan_simultaneous(n, eps, k));
      for (const auto& rates : std::vector<std::vector<double>>{{1}, {1, 0, 0}, {1, 1, 1, 1}, {4, 2, 1}, {2, 1}})
        plans.push_back(plan_asymmetric(n, eps, rates));
      for (std::uint64_t m : {64ull, 128ull, 256ull, 1024ull, 1ull << 20}) {
        try {
          plans.push_back(plan_streaming(n, eps, m));
        } catch (const CapacityError&) {
        }
        for (std::uint32_t k : {2u, 4u}) {
          try {
            plans.push_back(plan_simultaneous_streaming(n, eps, k, m));
          } catch (const CapacityError&) {
          }
        }
      }
      for (const auto& p : plans) {
        const double f = conjectured_floor(p, e);
        const double r = headline_resource(p);
        ++compared;
        c.expect(f <= r, fmt("n=%g eps=%g: floor %g above planner output %g", n, eps, f, r));
        if (p.model == Model::streaming && p.storable_samples > 0) {
          c.expect(floor_streaming(e, p.storable_samples) == e / static_cast<double>(p.storable_samples),
                   "streaming floor is not E_min / m'");
          const auto& st = p.stats;
          if (p.family == GraphFamily::batched_cliques)
            c.expect(st.edges <= p.storable_samples * st.vertices, "|E| > m' |V| on a streaming plan");
        }
      }
    }
  std::printf("  planner outputs compared against floors: %llu\n", static_cast<unsigned long long>(compared));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"moment exactness", moments},
      {"brute-force oracle equivalence", brute_force},
      {"centralized end-to-end error", centralized_end_to_end},
      {"corollary constant grid", corollary_constant},
      {"model simulators", simulators},
      {"graph inequalities", inequalities},
      {"CONGEST protocols", congest},
      {"counterexample", counterexample},
      {"lower-bound consistency", floors},
  };
  int failed = 0;
  std::vector<std::string> verdicts;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("criterion %zu: %s\n", i + 1, criteria[i].first.c_str());
    std::fflush(stdout);
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[256];
    std::snprintf(line, sizeof line, "criterion %zu: %s (%s; %llu checks, %llu failed, %.1f s)", i + 1,
                  c.ok() ? "PASS" : "FAIL", criteria[i].first.c_str(), static_cast<unsigned long long>(c.checks()),
                  static_cast<unsigned long long>(c.failures()), secs);
    std::printf("%s\n", line);
    std::fflush(stdout);
    verdicts.push_back(line);
    failed += !c.ok();
  }
  std::printf("\nsummary\n");
  for (const auto& v : verdicts) std::printf("%s\n", v.c_str());
  return failed == 0 ? 0 : 1;
}
