#include <gtest/gtest.h>

#include <cmath>

#include "twochoice/errors.hpp"
#include "twochoice/oracles.hpp"
#include "twochoice/rng.hpp"
#include "twochoice/walks.hpp"

using namespace twochoice;

TEST(CrossProb, ClosedForms) {
  EXPECT_NEAR(biased_rw_cross_prob(2, 1, 1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(biased_rw_cross_prob(2, 3, 5), 7.0 / 255, 1e-15);
  EXPECT_NEAR(biased_rw_cross_prob(3, 2, 2), 0.1, 1e-15);
  // r < 1 favours the right boundary: mirror of r > 1 with a and b swapped
  EXPECT_NEAR(biased_rw_cross_prob(0.5, 1, 1), 2.0 / 3, 1e-15);
}

TEST(CrossProb, MatchesGamblersRuinSolve) {
  for (double r : {0.25, 0.9, 1.1, 1.5, 2.0, 4.0})
    for (int a : {1, 2, 5, 9})
      for (int b : {1, 2, 5, 9}) {
        const double f = biased_rw_cross_prob(r, a, b);
        EXPECT_NEAR(f, oracles::gamblers_ruin_solve(r, a, b), 1e-10 * std::max(f, 1e-300))
            << r << " " << a << " " << b;
      }
}

TEST(CrossProb, MonotoneInB) {
  for (double r : {1.5, 2.0, 4.0}) {
    double prev = 1.0;
    for (int b = 1; b <= 30; ++b) {
      const double p = biased_rw_cross_prob(r, 50, b);
      EXPECT_LT(p, prev);
      EXPECT_GE(p, std::pow(r, -b) * (1 - 1e-9) * (1 - std::pow(r, -50)));
      prev = p;
    }
  }
}

TEST(CrossProb, Errors) {
  EXPECT_THROW(biased_rw_cross_prob(1.0, 1, 1), RIsOne);
  EXPECT_THROW(biased_rw_cross_prob(0.0, 1, 1), ConfigError);
  EXPECT_THROW(biased_rw_cross_prob(2.0, 0, 1), ConfigError);
  EXPECT_THROW(biased_rw_cross_prob(2.0, 1, -1), ConfigError);
}

TEST(CrossSimulation, WithinThreeStandardErrors) {
  Rng rng(42);
  const std::uint64_t trials = 100000;
  for (auto [r, a, b] : {std::tuple{2.0, 1, 1}, std::tuple{3.0, 2, 2}, std::tuple{2.0, 3, 5}}) {
    const double p = biased_rw_cross_prob(r, a, b);
    const double got = simulate_biased_walk_crossing(r, a, b, trials, rng);
    EXPECT_LE(std::abs(got - p), 3 * std::sqrt(p * (1 - p) / trials)) << r << a << b;
  }
  EXPECT_THROW(simulate_biased_walk_crossing(2.0, 1, 1, 9999, rng), ConfigError);
}

TEST(HitTime, ExpectedValues) {
  EXPECT_DOUBLE_EQ(expected_hit_time(1, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(expected_hit_time(10, 0.5), 220.0);
  EXPECT_THROW(expected_hit_time(0, 0.3), ConfigError);
  for (std::uint64_t D : {1u, 3u, 10u, 25u})
    for (double a : {0.0, 0.3, 0.9})
      EXPECT_NEAR(expected_hit_time(D, a), oracles::hitting_time_solve(D, a),
                  1e-9 * expected_hit_time(D, a));
}

TEST(HitTime, SampleMeanWithinTwoPercent) {
  Rng rng(5);
  for (auto [D, a] : {std::pair<std::uint64_t, double>{1, 0.0}, {10, 0.5}}) {
    double sum = 0.0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) sum += static_cast<double>(reflecting_lazy_walk_hit_time(D, a, rng));
    EXPECT_LE(std::abs(sum / trials / expected_hit_time(D, a) - 1.0), 0.02);
  }
}

TEST(HitTime, Errors) {
  Rng rng(0);
  EXPECT_THROW(reflecting_lazy_walk_hit_time(0, 0.5, rng), ConfigError);
  EXPECT_THROW(reflecting_lazy_walk_hit_time(3, 1.0, rng), ConfigError);
}

TEST(HitTime, TailCutoff) {
  const double e = expected_hit_time(5, 0.0);
  EXPECT_DOUBLE_EQ(hit_time_tail_cutoff(5, 0.0, 16, 1.0), 2 * e * std::log(16.0));
}
