#pragma once

#include <cstddef>
#include <vector>

#include "twochoice/bin_state.hpp"
#include "twochoice/metrics.hpp"

namespace twochoice {

// Level structure used to describe well-balanced configurations. Level l
// counts the balls at height >= base height + l; it is safe below
// alphas[l] / 2, critical in [alphas[l] / 2, alphas[l]) and invalid above.
//
//   alphas[0]            = (1 - b) / (128 b) * n
//   alphas[l]            = (32 b / (1 - b)) * alphas[l-1]^2 / n  while
//                          alphas[l-1] > sqrt(3 (1 - b) / (2 b) * n ln n)
//   alphas[ell_star]     = 12 ln n
//   alphas[ell_star + 1] = 24
//
// with b = beta_hat. All logarithms are natural.
struct Thresholds {
  std::size_t n = 0;
  double beta_hat = 0.0;
  Load gamma = 0;
  std::vector<double> alphas;  // size ell_star + 2
  std::size_t ell_star = 0;
  // Levels l in [1, ell_star + 1] where the neighbour sandwich
  //   (8 b / (1 - b)) alphas[l-1]^2 / n <= alphas[l] <= alphas[l-1] / 4
  // does not hold. Expected to be empty only for large n.
  std::vector<std::size_t> sandwich_failures;

  std::size_t levels() const noexcept { return alphas.size(); }
  // sqrt(3 (1 - b) / (2 b) * n ln n), the recursion's stopping threshold.
  double stop_threshold() const noexcept;
};

// Throws ConfigError unless 0 < beta_hat < 1, and DegenerateN when
// alphas[0] <= 12 ln n (the recursion cannot start).
Thresholds build_thresholds(std::size_t n, double beta_hat, Load gamma);

// Status of each level l = 0 .. ell_star + 1 relative to base_height.
std::vector<LevelStatus> classify_levels(const BinState& state, Load base_height,
                                         const Thresholds& th);

}  // namespace twochoice
