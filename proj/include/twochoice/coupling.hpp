#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twochoice/bin_state.hpp"
#include "twochoice/process.hpp"
#include "twochoice/rng.hpp"
#include "twochoice/schedule.hpp"

namespace twochoice {

// Minimum number of single-ball moves turning y into x, after sorting both
// non-increasingly: sum_i max(0, x_i - y_i) = |x - y|_1 / 2.
// Throws TotalLoadMismatch unless n and total load agree.
Load transformation_distance(std::span<const Load> x, std::span<const Load> y);

// S_k(sorted x) >= S_k(sorted y) for every k. Throws TotalLoadMismatch.
bool majorizes(std::span<const Load> x, std::span<const Load> y);

// Where a shared z in [0, 1) lands under random-bin deletion, over a view
// sorted non-increasingly with n_hat non-empty bins: rank l (1-based) and
// slot k (1-based) with
//   (l-1)/n_hat + (k-1)/(n_hat x_l) <= z < (l-1)/n_hat + k/(n_hat x_l).
struct BinDeletionSite {
  std::size_t rank;
  Load slot;
};
BinDeletionSite locate_bin_deletion(std::span<const Load> sorted, double z);

// Random-ball deletion: ball i = floor(z m) + 1 in left-to-right numbering of
// the sorted view. Returns its rank (1-based) and its slot within that bin.
struct BallDeletionSite {
  Load ball;
  std::size_t rank;
  Load slot;
};
BallDeletionSite locate_ball_deletion(std::span<const Load> sorted, double z);

// Rank-sorted view of a BinState kept in sync under +/-1 updates. Ranks are
// 0-based here. Bins with equal load form a plateau of consecutive ranks; an
// incremented bin is moved to the front of its old plateau and a decremented
// one to the back, so exactly one rank changes value per update.
class SortedView {
 public:
  explicit SortedView(const BinState& state);

  std::size_t n() const noexcept { return order_.size(); }
  Load load_at(std::size_t rank) const noexcept { return loads_[order_[rank]]; }
  BinId bin_at(std::size_t rank) const noexcept { return order_[rank]; }
  std::size_t rank_of(BinId bin) const noexcept { return rank_[bin]; }

  // Ranks [first, last) holding load v.
  std::pair<std::size_t, std::size_t> plateau(Load v) const noexcept;

  // Uniform bin among those with load v (plateau must be non-empty); one draw.
  BinId pick_in_plateau(Load v, Rng& rng) const noexcept;

  // Record that `bin` gained / lost one ball. Return the rank whose value
  // changed.
  std::size_t on_increment(BinId bin);
  std::size_t on_decrement(BinId bin);

  std::vector<Load> sorted_loads() const;

  // Empty when consistent with `state`, otherwise the first mismatch.
  std::string coherence_error(const BinState& state) const;

  // Number of bins with load >= v.
  Load at_or_above(Load v) const noexcept {
    return v < static_cast<Load>(ge_.size()) ? ge_[v] : 0;
  }

 private:
  std::vector<Load> loads_;       // by bin
  std::vector<BinId> order_;      // bins by rank
  std::vector<std::size_t> rank_;  // rank by bin
  std::vector<Load> ge_;          // ge_[v] = #bins with load >= v
};

// Two processes driven by one random stream. Each step shares:
//   - the insert/delete coin,
//   - on insertion two sorted ranks i, j: X draws two uniform bins, Y uses the
//     bins at the same ranks of its own view, and both place Greedy-style, so
//     both balls land on the load value at rank max(i, j),
//   - on deletion a single z in [0, 1), interpreted per copy under its own
//     deletion model (locate_bin_deletion / locate_ball_deletion); the
//     concrete bin is then drawn uniformly in the chosen rank's plateau, X
//     first, then Y.
// Both marginals are those of the uncoupled process.
//
// X uses model_x (random bin by default) and Y model_y (random ball), which
// is the majorization setting; the meeting-time experiment uses the same
// model for both.
class CoupledPair {
 public:
  CoupledPair(BinState x, BinState y, std::uint64_t seed,
              DeletionModel model_x = DeletionModel::kBin,
              DeletionModel model_y = DeletionModel::kBall);

  const BinState& x() const noexcept { return x_; }
  const BinState& y() const noexcept { return y_; }
  const SortedView& sorted_x() const noexcept { return sx_; }
  const SortedView& sorted_y() const noexcept { return sy_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  DeletionModel model_x() const noexcept { return model_x_; }
  DeletionModel model_y() const noexcept { return model_y_; }
  const Rng& rng() const noexcept { return rng_; }

  // Transformation distance between the two sorted views, maintained in O(1)
  // per step.
  Load distance() const noexcept { return l1_ / 2; }

  // majorizes(x, y) evaluated on the maintained sorted views, O(n).
  bool x_majorizes_y() const noexcept;

  // One coupled step; a deletion on an empty system gives a Noop pair.
  std::pair<StepEvent, StepEvent> step(double beta_t);

  // One coupled deletion with an externally supplied z (no coin). Noop pair
  // on an empty system.
  std::pair<StepEvent, StepEvent> delete_with(double z);

 private:
  StepEvent delete_one(BinState& state, SortedView& view, DeletionModel model, double z,
                       int which);
  // Updates l1_ after copy `which` (0 = X, 1 = Y) changed by `change` at rank.
  void track(std::size_t rank, Load change, int which);

  BinState x_;
  BinState y_;
  SortedView sx_;
  SortedView sy_;
  Rng rng_;
  DeletionModel model_x_;
  DeletionModel model_y_;
  std::uint64_t steps_ = 0;
  Load l1_ = 0;
};

struct CoupledAt {
  std::uint64_t t;
  friend bool operator==(const CoupledAt&, const CoupledAt&) = default;
};
struct TimedOut {
  std::uint64_t max_steps;
  friend bool operator==(const TimedOut&, const TimedOut&) = default;
};
using CouplingVerdict = std::variant<CoupledAt, TimedOut>;

struct DeltaPoint {
  std::uint64_t t;
  Load delta;
};

struct CouplingOutcome {
  CouplingVerdict verdict;
  Load initial_delta = 0;
  std::vector<DeltaPoint> trace;  // every trace_every steps, t = 0 first
};

// 4 n^3 ln^3 n, rounded up.
std::uint64_t default_coupling_max_steps(std::size_t n);

// Runs two copies of the same process (deletion model `model`) from x0 and
// y0 under CoupledPair until their sorted views coincide. beta(t) comes from
// `schedule`. max_steps defaults to default_coupling_max_steps(n).
// Throws TotalLoadMismatch unless x0 and y0 have equal n and total load.
CouplingOutcome coupling_time_experiment(const BinState& x0, const BinState& y0,
                                         const Schedule& schedule, DeletionModel model,
                                         std::uint64_t seed,
                                         std::optional<std::uint64_t> max_steps = std::nullopt,
                                         std::uint64_t trace_every = 0);

}  // namespace twochoice
