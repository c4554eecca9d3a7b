#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "twochoice/bin_state.hpp"

namespace twochoice {

enum class LevelStatus { kSafe, kCritical, kInvalid };

const char* to_string(LevelStatus status) noexcept;

// Snapshot of the balance statistics at step t.
//   disc     = x_max - m/n
//   adisc    = max(disc, m/n - x_min)
//   overload = x_max - m_max/n        (may be negative; never exceeds disc)
struct MetricsSample {
  std::uint64_t t = 0;
  Load m = 0;
  Load m_max = 0;
  Load x_max = 0;
  Load x_min = 0;
  double disc = 0.0;
  double adisc = 0.0;
  double overload = 0.0;
  std::optional<double> gamma_potential;
  std::optional<std::vector<LevelStatus>> level_statuses;

  friend bool operator==(const MetricsSample&, const MetricsSample&) = default;
};

// O(1): uses the maintained min/max trackers.
MetricsSample measure(const BinState& state, std::uint64_t t = 0);

// m_h = number of balls at height >= h (heights are 1-based within a bin),
// i.e. sum_i max(0, x_i - h + 1). For h = 0 this is the total load.
Load balls_at_or_above(const BinState& state, Load h);

// Number of bins with load >= v.
Load bins_at_or_above(const BinState& state, Load v);

// ceil(m_max / n) + gamma.
Load base_height(const BinState& state, Load gamma);

struct LevelStepProbs {
  double p_up = 0.0;       // Pr[m_h increases]
  double p_down_lb = 0.0;  // lower bound on Pr[m_h decreases]
  // Exact integer ingredients: p_up = beta * up_bins^2 / n^2 and
  // p_down_lb = (1 - beta) * down_bins / n.
  std::int64_t up_bins = 0;    // bins with load >= h - 1
  std::int64_t down_bins = 0;  // bins with load >= h
};

// Requires h >= 1.
LevelStepProbs level_step_probs(const BinState& state, Load h, double beta_t);

}  // namespace twochoice
