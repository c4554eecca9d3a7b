#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twochoice/bin_state.hpp"
#include "twochoice/errors.hpp"
#include "twochoice/oracles.hpp"
#include "twochoice/potentials.hpp"
#include "twochoice/rng.hpp"

using namespace twochoice;

namespace {

BinState make(std::vector<Load> loads) { return BinState::from_loads(loads); }

std::vector<Load> random_loads(Rng& rng, std::size_t n, Load hi) {
  std::vector<Load> v(n);
  for (auto& x : v) x = static_cast<Load>(rng.uniform(static_cast<std::uint64_t>(hi) + 1));
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Potentials, BalancedState) {
  const auto s = BinState::balanced(16, 48);
  EXPECT_DOUBLE_EQ(phi(s, 0.3), 16.0);
  EXPECT_DOUBLE_EQ(psi(s, 0.3), 16.0);
  EXPECT_DOUBLE_EQ(gamma_potential(s, 0.3), 32.0);
}

TEST(Potentials, ClosedForms) {
  const auto s = make({3, 2, 2, 1});
  const double a = 0.4;
  EXPECT_NEAR(phi(s, a), std::exp(a) + 2 + std::exp(-a), 1e-12);
  EXPECT_NEAR(psi(s, a), std::exp(-a) + 2 + std::exp(a), 1e-12);
  EXPECT_NEAR(gamma_potential(s, a), 2 * (std::exp(a) + std::exp(-a)) + 4, 1e-12);
}

TEST(Potentials, MatchNaiveSums) {
  Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const auto loads = random_loads(rng, 64, 40);
    const auto s = make(loads);
    const double a = 0.01 + 0.1 * rng.uniform01();
    ASSERT_LT(rel(phi_signed(s, a), oracles::phi_naive(loads, a)), 1e-12);
    ASSERT_LT(rel(psi(s, a), oracles::psi_naive(loads, a)), 1e-12);
    ASSERT_LT(rel(gamma_potential(s, a), oracles::gamma_naive(loads, a)), 1e-12);
    ASSERT_LT(rel(phi_clipped(s, a), oracles::clipped_phi_naive(loads, a)), 1e-12);
    ASSERT_GE(gamma_potential(s, a), 2.0 * 64 - 1e-9);
  }
}

TEST(Potentials, PermutationInvariant) {
  Rng rng(19);
  auto loads = random_loads(rng, 20, 30);
  const double g = gamma_potential(make(loads), 0.07);
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(loads.begin(), loads.end(), rng);
    EXPECT_NEAR(gamma_potential(make(loads), 0.07), g, 1e-12 * g);
  }
}

TEST(Potentials, MovingBallUpwardIncreasesPhiAndPsi) {
  Rng rng(4);
  for (int rep = 0; rep < 500; ++rep) {
    auto loads = random_loads(rng, 10, 20);
    const auto before = make(loads);
    const double avg = static_cast<double>(before.total_load()) / 10;
    auto lo = std::min_element(loads.begin(), loads.end());
    auto hi = std::max_element(loads.begin(), loads.end());
    if (!(*lo > 0 && *lo < avg && *hi > avg)) continue;
    --*lo;
    ++*hi;
    const auto after = make(loads);
    ASSERT_GT(phi(after, 0.1), phi(before, 0.1));
    ASSERT_GT(psi(after, 0.1), psi(before, 0.1));
  }
}

TEST(Potentials, OverflowIsAnError) {
  const auto s = make({2000, 0});
  EXPECT_THROW(phi(s, 1.0), OverflowError);
  EXPECT_THROW(psi(s, 1.0), OverflowError);
  EXPECT_THROW(ball_potential_sum(s, 1.0), OverflowError);
  EXPECT_NO_THROW(phi(s, 0.1));
  EXPECT_THROW(phi(s, 0.0), ConfigError);
}

TEST(BallPotential, NoExcessGivesZero) {
  const auto s = make({2, 2, 1, 2});
  EXPECT_DOUBLE_EQ(ball_potential_sum(s, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(phi_clipped(s, 0.2), 4.0);
}

TEST(BallPotential, SingleBinTelescopes) {
  for (Load k : {1, 2, 5, 13}) {
    // bin 7 gives up what bin 3 gains, so ceil(m/n) stays at 20
    std::vector<Load> loads(16, 20);
    loads[3] += k;
    loads[7] -= k;
    const auto s = make(loads);
    EXPECT_NEAR(ball_potential_sum(s, 0.3), std::exp(0.3 * k), 1e-12 * std::exp(0.3 * k));
  }
}

TEST(BallPotential, IdentityOnRandomStates) {
  Rng rng(1234);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto loads = random_loads(rng, 64, 50);
    const auto s = make(loads);
    const double lhs =
        ball_potential_sum(s, 0.03) + static_cast<double>(oracles::zero_excess_bins(loads));
    ASSERT_LT(rel(lhs, oracles::clipped_phi_naive(loads, 0.03)), 1e-9);
  }
}

TEST(PotentialParams, Validity) {
  EXPECT_TRUE((PotentialParams{0.6 / 16, 3.0 / 16, 0.6}).valid_for_discrepancy_bound());
  EXPECT_FALSE((PotentialParams{0.1, 3.0 / 16, 0.6}).valid_for_discrepancy_bound());
  EXPECT_TRUE((PotentialParams{0.01, 3.0 / 16, 0.6}).valid_for_drift_bound());
  EXPECT_FALSE((PotentialParams{0.05, 3.0 / 16, 0.6}).valid_for_drift_bound());
}

TEST(Drift, BalancedMatchesEnumeration) {
  // with n | m all outcomes give the same change, so the error is rounding only
  for (auto model : {DeletionModel::kBin, DeletionModel::kBall}) {
    const auto s = BinState::balanced(8, 16);
    const std::vector<Load> loads(s.loads().begin(), s.loads().end());
    Rng rng(30);
    const auto est = drift_estimate(s, 0.5, 0.1, 10000, rng, model);
    EXPECT_NEAR(est.mean, oracles::exact_gamma_drift(loads, 0.5, 0.1, model == DeletionModel::kBall),
                1e-12);
  }
  for (auto model : {DeletionModel::kBin, DeletionModel::kBall}) {
    const auto s = BinState::balanced(8, 20);
    const std::vector<Load> loads(s.loads().begin(), s.loads().end());
    Rng rng(31);
    const auto est = drift_estimate(s, 0.5, 0.1, 100000, rng, model);
    const double exact = oracles::exact_gamma_drift(loads, 0.5, 0.1, model == DeletionModel::kBall);
    EXPECT_EQ(est.trials, 100000u);
    EXPECT_GT(est.std_err, 0.0);
    EXPECT_LE(std::abs(est.mean - exact), 3 * est.std_err);
  }
}

TEST(Drift, StandardErrorShrinks) {
  const auto s = make({6, 1, 3, 2, 0, 4});
  Rng a(1), b(1);
  const auto small = drift_estimate(s, 0.6, 0.2, 2000, a);
  const auto big = drift_estimate(s, 0.6, 0.2, 200000, b);
  EXPECT_LT(big.std_err, small.std_err / 5);
}

TEST(Drift, PureInsertionOnSkewedStateIsNegative) {
  const std::vector<Load> loads{12, 0, 0, 0};
  const double exact = oracles::exact_gamma_drift(loads, 1.0, 0.5, false);
  EXPECT_LT(exact, 0.0);
  Rng rng(6);
  const auto est = drift_estimate(make(loads), 1.0, 0.5, 100000, rng);
  EXPECT_LT(est.mean + 3 * est.std_err, 0.0);
  EXPECT_LE(std::abs(est.mean - exact), 3 * est.std_err);
}

TEST(Drift, NegativeAboveLargeGammaThreshold) {
  std::vector<Load> loads(8, 100);
  loads[0] = 1000;
  const auto s = make(loads);
  const double alpha = 0.05, beta = 0.6, eps = 3.0 / 16;
  const double threshold = 2 * 1040000.0 / (std::pow(eps, 8) * std::pow(beta, 4) * alpha) * 8;
  ASSERT_GT(gamma_potential(s, alpha), threshold);
  EXPECT_LT(oracles::exact_gamma_drift(loads, beta, alpha, false), 0.0);
  Rng rng(17);
  const auto est = drift_estimate(s, beta, alpha, 100000, rng);
  EXPECT_LT(est.mean + 3 * est.std_err, 0.0);
}

TEST(Drift, Errors) {
  Rng rng(0);
  const auto s = BinState::balanced(4, 8);
  EXPECT_THROW(drift_estimate(s, 0.5, 0.1, 999, rng), ConfigError);
  EXPECT_THROW(drift_estimate(s, 0.5, 0.0, 1000, rng), ConfigError);
}
