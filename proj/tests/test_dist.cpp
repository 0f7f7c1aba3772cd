#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cbt/dist.hpp"
#include "cbt/error.hpp"

namespace cbt {
namespace {

// Random probability vectors: exponential weights, some zeroed, normalized.
std::vector<double> random_probs(std::mt19937_64& rng, std::uint32_t n) {
  std::exponential_distribution<double> w(1.0);
  std::bernoulli_distribution zero(0.2);
  std::vector<double> v(n);
  for (auto& x : v) x = zero(rng) ? 0.0 : w(rng);
  if (std::accumulate(v.begin(), v.end(), 0.0) == 0.0) v[0] = 1.0;
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

TEST(Uniform, EntriesAreOneOverN) {
  const auto u = make_uniform(4);
  ASSERT_EQ(u.n(), 4u);
  for (double x : u.probs()) EXPECT_DOUBLE_EQ(x, 0.25);
  EXPECT_DOUBLE_EQ(make_uniform(1)[1], 1.0);
  EXPECT_NEAR(collision_probability(make_uniform(100)), 0.01, 1e-15);
}

TEST(Uniform, ZeroDomainRejected) { EXPECT_THROW(make_uniform(0), InvalidDomain); }

TEST(Bump, FormulaValues) {
  const auto b = make_bump(4, 0.5);
  EXPECT_DOUBLE_EQ(b[1], 0.375);
  EXPECT_DOUBLE_EQ(b[2], 0.375);
  EXPECT_DOUBLE_EQ(b[3], 0.125);
  EXPECT_DOUBLE_EQ(b[4], 0.125);
  EXPECT_NEAR(distance_to_uniform(b), 0.5, 1e-15);
  EXPECT_NEAR(collision_probability(b), 0.3125, 1e-15);
  EXPECT_NEAR(three_way_collision_probability(b), 0.109375, 1e-15);
}

TEST(Bump, RejectsBadArguments) {
  EXPECT_THROW(make_bump(4, 0.0), InvalidArgument);
  EXPECT_THROW(make_bump(5, 0.5), InvalidArgument);
  EXPECT_THROW(make_bump(4, 1.5), InvalidArgument);
}

TEST(Bump, CollisionProbabilityMeetsFarBoundWithEquality) {
  for (std::uint32_t n : {2u, 4u, 10u, 64u, 1000u})
    for (double eps : {0.1, 0.25, 0.5, 0.9, 1.0})
      EXPECT_NEAR(collision_probability(make_bump(n, eps)), (1 + eps * eps) / n, 1e-12);
}

TEST(Heavy, DistanceAndMoment) {
  const auto h = make_heavy(10, 0.5);
  EXPECT_NEAR(distance_to_uniform(h), 0.5, 1e-12);
  // Fraction oracle in tests/oracle/enumerate.py.
  EXPECT_NEAR(collision_probability(h), 0.16944444444444445, 1e-12);
}

TEST(PointMass, Moments) {
  const auto p = make_point_mass(4, 3);
  EXPECT_DOUBLE_EQ(collision_probability(p), 1.0);
  EXPECT_DOUBLE_EQ(three_way_collision_probability(p), 1.0);
  EXPECT_NEAR(l1_distance(p, make_uniform(4)), 1.5, 1e-15);
}

TEST(Distance, BasicCases) {
  EXPECT_EQ(l1_distance(make_uniform(7), make_uniform(7)), 0.0);
  EXPECT_NEAR(l1_distance(make_bump(8, 0.3), make_uniform(8)), 0.3, 1e-15);
  EXPECT_THROW(l1_distance(make_uniform(3), make_uniform(4)), InvalidArgument);
}

TEST(Construction, ValidatesEntries) {
  EXPECT_THROW(Distribution({}), InvalidDomain);
  EXPECT_THROW(Distribution({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(Distribution({1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(Distribution({NAN, 1.0}), InvalidArgument);
  EXPECT_NO_THROW(Distribution({0.25, 0.75}));
  EXPECT_NO_THROW(Distribution({0.1, 0.2, 0.3, 0.4}));
}

TEST(Sampling, PointMassAndEmpty) {
  const auto labels = sample_labeling(make_point_mass(5, 3), 100, {1, 2, 3});
  ASSERT_EQ(labels.values.size(), 100u);
  for (auto v : labels.values) EXPECT_EQ(v, 3u);
  EXPECT_TRUE(sample_labeling(make_uniform(5), 0, {1, 2, 3}).values.empty());
}

TEST(Sampling, BinomialConcentration) {
  const std::uint64_t count = 100000;
  const auto labels = sample_labeling(make_uniform(2), count, {42, 0, 0});
  const double ones = static_cast<double>(std::count(labels.values.begin(), labels.values.end(), 1u));
  EXPECT_LE(std::abs(ones / count - 0.5), 3 * std::sqrt(0.25 / count));
}

TEST(Sampling, ReproducibleAndPrefixStable) {
  const auto p = make_bump(10, 0.5);
  const auto a = sample_labeling(p, 500, {9, 4, 2});
  const auto b = sample_labeling(p, 500, {9, 4, 2});
  EXPECT_EQ(a.values, b.values);
  const auto prefix = sample_labeling(p, 123, {9, 4, 2});
  EXPECT_TRUE(std::equal(prefix.values.begin(), prefix.values.end(), a.values.begin()));
  EXPECT_NE(sample_labeling(p, 500, {9, 4, 3}).values, a.values);
  for (auto v : a.values) {
    EXPECT_GE(v, 1u);
    EXPECT_LE(v, 10u);
  }
}

TEST(Sampling, ZeroProbabilityNeverDrawn) {
  const Distribution p({0.5, 0.0, 0.5, 0.0});
  for (auto v : sample_labeling(p, 20000, {3, 3, 3}).values) EXPECT_TRUE(v == 1 || v == 3);
}

TEST(Sampling, EmpiricalFrequenciesMatchRandomDistributions) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 10; ++round) {
    const std::uint32_t n = 2 + rng() % 20;
    const Distribution p(random_probs(rng, n));
    const std::uint64_t count = 50000;
    const auto labels = sample_labeling(p, count, {5, static_cast<std::uint64_t>(round), 0});
    std::vector<double> freq(n + 1, 0.0);
    for (auto v : labels.values) freq[v] += 1.0;
    for (Symbol s = 1; s <= n; ++s) {
      const double sd = std::sqrt(p[s] * (1 - p[s]) / count);
      EXPECT_LE(std::abs(freq[s] / count - p[s]), 5 * sd + 1e-12) << "n=" << n << " s=" << s;
    }
  }
}

TEST(Properties, MomentBoundsOnRandomCorpus) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t n = 1 + rng() % 60;
    const Distribution p(random_probs(rng, n));
    const double mu = collision_probability(p);
    const double gamma = three_way_collision_probability(p);
    EXPECT_GE(mu, 1.0 / n - 1e-15);
    EXPECT_LE(mu, 1.0 + 1e-15);
    EXPECT_GE(gamma, mu * mu - 1e-15);
    EXPECT_LE(gamma, mu + 1e-15);
    const double d = distance_to_uniform(p);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
  }
}

TEST(Properties, FarDistributionsHaveLargeCollisionProbability) {
  std::mt19937_64 rng(19);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const std::uint32_t n = 2 + rng() % 40;
    const Distribution p(random_probs(rng, n));
    const double d = distance_to_uniform(p);
    const double eps = std::min(d, 1.0);
    if (eps <= 0) continue;
    EXPECT_GE(collision_probability(p), (1 + eps * eps) / n - 1e-12);
    ++checked;
  }
  for (std::uint32_t n : {2u, 10u, 50u})
    for (double eps : {0.2, 0.5, 1.0}) {
      EXPECT_GE(collision_probability(make_heavy(n, eps)), (1 + eps * eps) / n - 1e-12);
    }
  EXPECT_GT(checked, 400);
}

TEST(Filter, AppliedToEverySample) {
  auto labels = sample_labeling(make_uniform(6), 50, {1, 1, 1});
  apply_filter(labels, [](Symbol s) { return (s + 1) / 2; });
  for (auto v : labels.values) EXPECT_LE(v, 3u);
}

}  // namespace
}  // namespace cbt
