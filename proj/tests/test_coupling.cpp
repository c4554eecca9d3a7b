#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "twochoice/bin_state.hpp"
#include "twochoice/coupling.hpp"
#include "twochoice/errors.hpp"
#include "twochoice/metrics.hpp"
#include "twochoice/rng.hpp"
#include "twochoice/schedule.hpp"

using namespace twochoice;

namespace {

BinState make(std::vector<Load> loads) { return BinState::from_loads(loads); }

// Random load vector of length n holding exactly m balls.
std::vector<Load> random_with_total(Rng& rng, std::size_t n, Load m) {
  std::vector<Load> v(n, 0);
  for (Load k = 0; k < m; ++k) ++v[rng.uniform(n)];
  return v;
}

BinId event_bin(const StepEvent& ev) {
  return std::visit(
      [](const auto& e) -> BinId {
        if constexpr (requires { e.bin; }) return e.bin;
        else return ~BinId{0};
      },
      ev);
}

}  // namespace

TEST(TransformationDistance, Examples) {
  const std::vector<Load> a{2, 0}, b{1, 1};
  EXPECT_EQ(transformation_distance(a, a), 0);
  EXPECT_EQ(transformation_distance(a, b), 1);
  // order of bins within a vector does not matter
  const std::vector<Load> c{0, 2};
  EXPECT_EQ(transformation_distance(a, c), 0);
  const std::vector<Load> d{1, 2};
  EXPECT_THROW(transformation_distance(a, d), TotalLoadMismatch);
}

TEST(TransformationDistance, IsAMetric) {
  Rng rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.uniform(12);
    const Load m = static_cast<Load>(rng.uniform(40));
    const auto x = random_with_total(rng, n, m);
    const auto y = random_with_total(rng, n, m);
    const auto z = random_with_total(rng, n, m);
    ASSERT_EQ(transformation_distance(x, x), 0);
    ASSERT_EQ(transformation_distance(x, y), transformation_distance(y, x));
    ASSERT_LE(transformation_distance(x, z),
              transformation_distance(x, y) + transformation_distance(y, z));
    if (transformation_distance(x, y) == 0) {
      auto sx = x, sy = y;
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      ASSERT_EQ(sx, sy);
    }
  }
}

TEST(TransformationDistance, BoundedByAbsoluteDiscrepancy) {
  Rng rng(9);
  for (int rep = 0; rep < 300; ++rep) {
    const auto x = random_with_total(rng, 32, 200);
    const auto y = random_with_total(rng, 32, 200);
    const double bound =
        2.0 * 32 * std::max(measure(make(x)).adisc, measure(make(y)).adisc);
    ASSERT_LE(static_cast<double>(transformation_distance(x, y)), bound);
  }
}

TEST(Majorizes, Examples) {
  const std::vector<Load> x{3, 1, 0}, y{2, 1, 1}, u{2, 2, 0}, v{3, 1, 0};
  EXPECT_TRUE(majorizes(x, x));
  EXPECT_TRUE(majorizes(x, y));
  EXPECT_FALSE(majorizes(y, x));
  EXPECT_FALSE(majorizes(u, v));
  const std::vector<Load> shuffled{0, 1, 3};
  EXPECT_TRUE(majorizes(shuffled, y));
}

TEST(LocateDeletion, IntervalArithmetic) {
  const std::vector<Load> s{3, 1};
  const auto bin = locate_bin_deletion(s, 0.4);
  EXPECT_EQ(bin.rank, 1u);
  EXPECT_EQ(bin.slot, 3);
  const auto ball = locate_ball_deletion(s, 0.4);
  EXPECT_EQ(ball.ball, 2);
  EXPECT_EQ(ball.rank, 1u);
  EXPECT_EQ(ball.slot, 2);

  EXPECT_EQ(locate_bin_deletion(s, 0.5).rank, 2u);
  EXPECT_EQ(locate_ball_deletion(s, 0.75).rank, 2u);
  EXPECT_EQ(locate_ball_deletion(s, 0.0).ball, 1);

  // empty bins are skipped by the bin model
  const std::vector<Load> t{2, 0};
  EXPECT_EQ(locate_bin_deletion(t, 0.99).rank, 1u);
  const std::vector<Load> empty{0, 0};
  EXPECT_THROW(locate_bin_deletion(empty, 0.5), ConfigError);
  EXPECT_THROW(locate_ball_deletion(empty, 0.5), ConfigError);
}

TEST(SortedView, TracksUpdates) {
  Rng rng(14);
  auto s = make({4, 1, 4, 0, 2});
  SortedView view(s);
  EXPECT_EQ(view.sorted_loads(), s.sorted_loads());
  EXPECT_EQ(view.plateau(4), (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_EQ(view.at_or_above(2), 3);
  for (int i = 0; i < 20000; ++i) {
    const auto bin = static_cast<BinId>(rng.uniform(s.n()));
    if (rng.uniform01() < 0.5 || s.load(bin) == 0) {
      s.add_ball(bin);
      view.on_increment(bin);
    } else {
      s.remove_ball(bin);
      view.on_decrement(bin);
    }
    const auto picked = view.pick_in_plateau(s.load(bin), rng);
    ASSERT_EQ(s.load(picked), s.load(bin));
  }
  EXPECT_EQ(view.coherence_error(s), "");
  for (std::size_t r = 0; r < view.n(); ++r) EXPECT_EQ(view.rank_of(view.bin_at(r)), r);
}

TEST(CoupledPair, EqualStatesStayEqual) {
  for (auto model : {DeletionModel::kBin, DeletionModel::kBall}) {
    CoupledPair pair{make({1, 1}), make({1, 1}), 5, model, model};
    pair.delete_with(0.3);
    EXPECT_EQ(pair.distance(), 0);
    EXPECT_EQ(pair.x().sorted_loads(), pair.y().sorted_loads());
    EXPECT_EQ(pair.x().total_load(), 1);
  }
}

TEST(CoupledPair, DeletionSitesFromSharedZ) {
  CoupledPair pair{make({3, 1}), make({3, 1}), 1, DeletionModel::kBin, DeletionModel::kBall};
  const auto [ex, ey] = pair.delete_with(0.4);
  EXPECT_EQ(event_bin(ex), 0u);
  EXPECT_EQ(event_bin(ey), 0u);
  EXPECT_TRUE(std::holds_alternative<DeleteBin>(ex));
  EXPECT_TRUE(std::holds_alternative<DeleteBall>(ey));
}

TEST(CoupledPair, EmptyDeletionIsPairedNoop) {
  CoupledPair pair{BinState(3), BinState(3), 2};
  const auto [ex, ey] = pair.delete_with(0.5);
  EXPECT_TRUE(std::holds_alternative<Noop>(ex));
  EXPECT_TRUE(std::holds_alternative<Noop>(ey));
}

TEST(CoupledPair, DeletionMarginalsMatchUncoupledLaws) {
  const int trials = 200000;
  Rng z(77);
  std::vector<double> fx(2, 0.0), fy(2, 0.0);
  for (int i = 0; i < trials; ++i) {
    CoupledPair pair{make({3, 1}), make({3, 1}), static_cast<std::uint64_t>(i),
                     DeletionModel::kBin, DeletionModel::kBall};
    const auto [ex, ey] = pair.delete_with(z.uniform01());
    fx[event_bin(ex)] += 1.0 / trials;
    fy[event_bin(ey)] += 1.0 / trials;
  }
  const double se_x = std::sqrt(0.25 / trials), se_y = std::sqrt(0.1875 / trials);
  EXPECT_NEAR(fx[0], 0.5, 4 * se_x);
  EXPECT_NEAR(fy[0], 0.75, 4 * se_y);
}

TEST(CoupledPair, InsertionRespectsChoices) {
  CoupledPair pair{BinState(6), BinState(6), 8};
  for (int i = 0; i < 5000; ++i) {
    const auto [ex, ey] = pair.step(0.6);
    for (const auto* ev : {&ex, &ey}) {
      if (const auto* ins = std::get_if<Insert>(ev)) {
        ASSERT_TRUE(ins->bin == ins->choice_a || ins->bin == ins->choice_b);
      }
    }
  }
  EXPECT_EQ(pair.step_count(), 5000u);
}

TEST(CoupledPair, MajorizationFromEmpty) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CoupledPair pair{BinState(8), BinState(8), seed};
    for (int t = 0; t < 20000; ++t) {
      pair.step(0.6);
      ASSERT_TRUE(pair.x_majorizes_y()) << "seed " << seed << " step " << t;
    }
    EXPECT_EQ(pair.sorted_x().coherence_error(pair.x()), "");
    EXPECT_EQ(pair.sorted_y().coherence_error(pair.y()), "");
  }
}

TEST(CoupledPair, DistanceMatchesRecomputation) {
  Rng rng(2);
  CoupledPair pair{BinState::from_loads(random_with_total(rng, 10, 40)),
                   BinState::from_loads(random_with_total(rng, 10, 40)), 3,
                   DeletionModel::kBall, DeletionModel::kBall};
  for (int t = 0; t < 20000; ++t) {
    pair.step(0.5);
    if (t % 97 == 0) {
      ASSERT_EQ(pair.distance(), transformation_distance(pair.x().loads(), pair.y().loads()));
    }
  }
}

TEST(CouplingTime, IdenticalStartsCoupleImmediately) {
  const auto s = BinState::balanced(16, 64);
  const auto out = coupling_time_experiment(s, s, Schedule::constant(0.5), DeletionModel::kBin, 1);
  EXPECT_EQ(out.verdict, CouplingVerdict{CoupledAt{0}});
  EXPECT_EQ(out.initial_delta, 0);
}

TEST(CouplingTime, TimeoutIsReported) {
  const auto x = make({40, 0, 0, 0});
  const auto y = BinState::balanced(4, 40);
  const auto out =
      coupling_time_experiment(x, y, Schedule::constant(0.5), DeletionModel::kBin, 1, 3);
  EXPECT_EQ(out.verdict, CouplingVerdict{TimedOut{3}});
  EXPECT_THROW(coupling_time_experiment(x, BinState::balanced(4, 41), Schedule::constant(0.5),
                                        DeletionModel::kBin, 1),
               TotalLoadMismatch);
}

TEST(CouplingTime, DefaultBudget) {
  const double n = 64;
  EXPECT_EQ(default_coupling_max_steps(64),
            static_cast<std::uint64_t>(std::ceil(4 * n * n * n * std::pow(std::log(n), 3))));
}

TEST(CouplingTime, DistanceDoesNotGrowOnAverage) {
  const std::size_t n = 8;
  const int runs = 3000, horizon = 60;
  auto x0 = BinState::balanced(n, 4 * n);
  auto y0 = x0;
  y0.remove_ball(0);
  y0.add_ball(1);
  std::vector<double> sum(horizon, 0.0), sum_sq(horizon, 0.0);
  for (int r = 0; r < runs; ++r) {
    const auto out = coupling_time_experiment(x0, y0, Schedule::constant(0.5), DeletionModel::kBin,
                                              static_cast<std::uint64_t>(r), horizon, 1);
    std::vector<Load> delta(horizon + 1, 0);  // zero after coupling
    for (const auto& p : out.trace) delta[p.t] = p.delta;
    for (int t = 0; t < horizon; ++t) {
      const double d = static_cast<double>(delta[t + 1] - delta[t]);
      sum[t] += d;
      sum_sq[t] += d * d;
    }
  }
  for (int t = 0; t < horizon; ++t) {
    const double mean = sum[t] / runs;
    const double var = sum_sq[t] / runs - mean * mean;
    ASSERT_LE(mean, 3 * std::sqrt(var / runs) + 1e-12) << "t=" << t;
  }
}
