#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "cbt/error.hpp"
#include "cbt/tester.hpp"

namespace cbt {
namespace {

std::shared_ptr<const ComparisonGraph> shared(ComparisonGraph g) {
  return std::make_shared<const ComparisonGraph>(std::move(g));
}

SampleLabeling labels(std::vector<Symbol> v) { return {std::move(v), {}}; }

TEST(Count, Examples) {
  const auto k4 = make_clique(4);
  EXPECT_EQ(count_collisions(k4, labels({2, 2, 2, 2})), 6u);
  EXPECT_EQ(count_collisions(k4, labels({1, 2, 3, 4})), 0u);
  EXPECT_EQ(count_collisions(make_clique(3), labels({1, 1, 2})), 1u);
  EXPECT_THROW(count_collisions(k4, labels({1, 2})), InvalidArgument);
}

TEST(Count, BlockRouteMatchesEdgeRoute) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto g = make_disjoint_cliques(2 + rng() % 8, 1 + rng() % 6);
    const auto lab = sample_labeling(make_uniform(1 + rng() % 6), g.vertex_count(), {1, 2, 3});
    EXPECT_EQ(count_collisions(g, lab), count_collisions_by_edges(g, lab));
  }
}

TEST(Count, CliqueCollisions) {
  const std::vector<Symbol> s = {1, 1, 1, 2, 2, 3};
  EXPECT_EQ(clique_collisions(s), 3u + 1u);
}

TEST(Threshold, Examples) {
  EXPECT_DOUBLE_EQ(threshold(100, 0.5, 10, 1.0), 15.0);
  EXPECT_DOUBLE_EQ(threshold(100, 0.0, 10, 1.0), 10.0);
  EXPECT_NEAR(threshold(6, 1.0 / 9, 4, 0.5), 6 * (1 + 0.25 / 9) / 4, 1e-15);
  EXPECT_NEAR(threshold(6, 1.0 / 9, 4, 0.5), 1.5416666666666667, 1e-12);
}

TEST(Threshold, StrictlyIncreasingInTau) {
  for (double tau = 0.0; tau < 0.99; tau += 0.01)
    EXPECT_LT(threshold(1000, tau, 37, 0.3), threshold(1000, tau + 0.01, 37, 0.3));
}

TEST(Spec, RejectsOutOfRange) {
  const auto g = shared(make_clique(3));
  EXPECT_THROW(TesterSpec(g, -0.1, 3, 1.0), InvalidArgument);
  EXPECT_THROW(TesterSpec(g, 1.1, 3, 1.0), InvalidArgument);
  EXPECT_THROW(TesterSpec(g, 0.5, 0, 1.0), InvalidDomain);
  EXPECT_THROW(TesterSpec(g, 0.5, 3, 0.0), InvalidArgument);
  EXPECT_THROW(TesterSpec(shared(ComparisonGraph(3, {})), 0.5, 3, 1.0), InvalidArgument);
  EXPECT_NO_THROW(TesterSpec(g, 0.0, 3, 1.0));
  EXPECT_NO_THROW(TesterSpec(g, 1.0, 3, 1.0));
}

TEST(Decision, StrictComparison) {
  EXPECT_EQ(decide(2, 2.0), Decision::no);
  EXPECT_EQ(decide(1, 2.0), Decision::yes);
  EXPECT_EQ(decide(0, 1e-9), Decision::yes);
  const TesterSpec spec(shared(make_clique(4)), 0.5, 4, 1.0);  // T = 2.25
  EXPECT_EQ(evaluate(spec, labels({1, 1, 1, 2})).decision, Decision::no);  // Z = 3 = ceil(T)
  EXPECT_EQ(evaluate(spec, labels({1, 2, 3, 4})).decision, Decision::yes);
  EXPECT_EQ(evaluate(spec, labels({1, 1, 2, 2})).decision, Decision::yes);  // Z = 2
}

TEST(Run, PointMassAndDegenerateDomain) {
  const TesterSpec far(shared(make_clique(10)), 0.5, 5, 1.0);
  EXPECT_EQ(run(far, make_point_mass(5, 2), {1, 0, 0}).decision, Decision::no);
  const TesterSpec one(shared(make_clique(10)), 0.5, 1, 1.0);
  const auto out = run(one, make_uniform(1), {1, 0, 0});
  EXPECT_EQ(out.z, 45u);
  EXPECT_EQ(out.decision, Decision::yes);
}

TEST(Run, DomainMismatch) {
  const TesterSpec spec(shared(make_clique(3)), 0.5, 5, 1.0);
  EXPECT_THROW(run(spec, make_uniform(4), {}), InvalidArgument);
}

TEST(Run, DeterministicPerStream) {
  const TesterSpec spec(shared(make_clique(50)), 0.5, 30, 1.0);
  const auto a = run(spec, make_uniform(30), {7, 3, 0});
  const auto b = run(spec, make_uniform(30), {7, 3, 0});
  EXPECT_EQ(a.z, b.z);
  const auto lab = sample_labeling(make_uniform(30), 50, {7, 3, 0});
  EXPECT_EQ(evaluate(spec, lab).z, a.z);
}

TEST(Run, CentralizedGuaranteeAtProofConstant) {
  // q = ceil(100 sqrt(n) / eps^2) at n=100, eps=0.5, tau=1/2.
  const TesterSpec spec(shared(make_clique(4000)), 0.5, 100, 0.5);
  const auto u = make_uniform(100);
  int yes = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) yes += run(spec, u, {2024, t, 0}).decision == Decision::yes;
  EXPECT_GE(yes / 2000.0, 0.75);
}

TEST(Moments, ClosedForms) {
  const auto k3 = make_clique(3);
  const auto b = make_bump(4, 0.5);
  EXPECT_NEAR(expected_collisions(k3, b), 0.9375, 1e-15);
  // Fraction oracle: 3 (mu - mu^2) + 6 (gamma - mu^2) with mu = 5/16, gamma = 7/64.
  EXPECT_NEAR(variance_collisions(k3, b), 0.71484375, 1e-15);
  EXPECT_NEAR(expected_collisions(make_clique(5), make_uniform(10)), 1.0, 1e-15);
  EXPECT_NEAR(expected_collisions(make_star(6), make_point_mass(3, 1)), 6.0, 1e-15);
  const auto m = make_matching(8);
  const double mu = collision_probability(b);
  EXPECT_NEAR(variance_collisions(m, b), 8 * (mu - mu * mu), 1e-15);
  for (std::uint32_t n : {2u, 7u, 50u}) {
    const auto g = make_random_graph(20, 0.3, n);
    EXPECT_NEAR(variance_collisions(g, make_uniform(n)),
                g.stats().edges * (n - 1.0) / (double(n) * n), 1e-12);
  }
}

// Fractions from tests/oracle/enumerate.py.
TEST(Exact, FrozenOracleValues) {
  const auto u3 = make_uniform(3);
  EXPECT_NEAR(exact_yes_probability(TesterSpec(shared(make_clique(3)), 0.5, 3, 1.0), u3), 8.0 / 9, 1e-12);
  EXPECT_NEAR(exact_error_probability(TesterSpec(shared(make_clique(3)), 0.5, 3, 1.0), u3), 1.0 / 9, 1e-12);
  EXPECT_NEAR(exact_yes_probability(TesterSpec(shared(make_clique(3)), 0.25, 3, 0.5), u3), 8.0 / 9, 1e-12);
  EXPECT_NEAR(exact_yes_probability(TesterSpec(shared(make_matching(2)), 0.5, 4, 1.0), make_uniform(4)),
              9.0 / 16, 1e-12);
  EXPECT_NEAR(exact_error_probability(TesterSpec(shared(make_matching(1)), 0.5, 2, 1.0), make_uniform(2)),
              0.5, 1e-12);
  const TesterSpec k4(shared(make_clique(4)), 0.5, 4, 0.5);
  EXPECT_NEAR(exact_yes_probability(k4, make_bump(4, 0.5)), 261.0 / 512, 1e-12);
  EXPECT_NEAR(exact_error_probability(k4, make_bump(4, 0.5)), 261.0 / 512, 1e-12);
  EXPECT_NEAR(exact_yes_probability(TesterSpec(shared(make_star(3)), 0.5, 4, 1.0), make_uniform(4)),
              27.0 / 32, 1e-12);
  EXPECT_NEAR(exact_yes_probability(TesterSpec(shared(make_clique(5)), 0.3, 4, 1.0), make_uniform(4)),
              105.0 / 128, 1e-12);
}

TEST(Exact, DegenerateAndLimits) {
  EXPECT_EQ(exact_error_probability(TesterSpec(shared(make_clique(4)), 0.5, 1, 1.0), make_uniform(1)), 0.0);
  EXPECT_THROW(exact_yes_probability(TesterSpec(shared(make_clique(30)), 0.5, 10, 1.0), make_uniform(10)),
               CapacityError);
  // Neither uniform nor eps-far.
  EXPECT_THROW(exact_error_probability(TesterSpec(shared(make_clique(3)), 0.5, 4, 1.0), make_bump(4, 0.5)),
               InvalidArgument);
}

TEST(Exact, AgreesWithMonteCarlo) {
  struct Case {
    ComparisonGraph g;
    Distribution p;
    double tau;
    double eps;
  };
  const std::vector<Case> cases = {
      {make_clique(3), make_uniform(3), 0.5, 1.0},
      {make_matching(2), make_uniform(4), 0.5, 1.0},
      {make_clique(4), make_bump(4, 0.5), 0.5, 0.5},
      {make_star(4), make_heavy(4, 0.5), 0.3, 0.5},
  };
  for (const auto& c : cases) {
    const TesterSpec spec(shared(c.g), c.tau, c.p.n(), c.eps);
    const double p = exact_yes_probability(spec, c.p);
    const int trials = 10000;
    int yes = 0;
    for (int t = 0; t < trials; ++t) yes += run(spec, c.p, {99, std::uint64_t(t), 0}).decision == Decision::yes;
    EXPECT_LE(std::abs(yes / double(trials) - p), 3 * std::sqrt(p * (1 - p) / trials) + 1e-12);
  }
}

TEST(Properties, MeanOfZTracksExpectation) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 8; ++i) {
    const auto g = make_random_graph(8 + rng() % 20, 0.4, rng());
    if (g.stats().edges == 0) continue;
    const auto p = i % 2 ? make_bump(6, 0.7) : make_heavy(6, 0.5);
    const std::uint64_t trials = 20000;
    double sum = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
      sum += double(count_collisions(g, sample_labeling(p, g.vertex_count(), {1, t, 0})));
    const double sd = std::sqrt(variance_collisions(g, p) / trials);
    EXPECT_LE(std::abs(sum / trials - expected_collisions(g, p)), 4 * sd);
  }
}

}  // namespace
}  // namespace cbt
