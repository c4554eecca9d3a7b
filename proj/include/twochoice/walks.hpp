#pragma once

#include <cstdint>

#include "twochoice/rng.hpp"

namespace twochoice {

struct WalkParams {
  std::uint64_t D = 1;      // reflecting-walk domain {0..D}
  double lazy_alpha = 0.0;  // laziness in [0, 1)
  double r = 2.0;           // left bias ratio, > 0 and != 1
  std::int64_t a = 1;       // left boundary -a
  std::int64_t b = 1;       // right boundary +b

  // Throws ConfigError naming the first field out of range.
  void validate_crossing() const;
  void validate_hitting() const;
};

// Probability that a walk from 0, stepping -1 with probability r / (1 + r)
// and +1 otherwise, reaches +b before -a: (r^a - 1) / (r^(a+b) - 1).
// Throws RIsOne for r == 1 (the symmetric answer a / (a + b) is left to the
// caller) and ConfigError for r <= 0 or non-positive a, b.
double biased_rw_cross_prob(double r, std::int64_t a, std::int64_t b);

// Fraction of `trials` simulated walks that reach +b before -a. Laziness does
// not change the crossing order, so the simulated walk never stays put.
// Requires trials >= 10^4.
double simulate_biased_walk_crossing(double r, std::int64_t a, std::int64_t b,
                                     std::uint64_t trials, Rng& rng);

// Hitting time of 0 for the lazy reflecting walk on {0..D} started at D. Each
// step stays put with probability lazy_alpha, otherwise moves +-1 with equal
// probability; a move above D is replaced by staying at D. One draw per step.
// Requires D >= 1 and lazy_alpha in [0, 1).
std::uint64_t reflecting_lazy_walk_hit_time(std::uint64_t D, double lazy_alpha, Rng& rng);

// D (D + 1) / (1 - lazy_alpha).
double expected_hit_time(std::uint64_t D, double lazy_alpha);

// Tail reference for the hitting time: runs longer than
// 2 E[T] * a * ln(n) should occur with probability at most n^-a.
double hit_time_tail_cutoff(std::uint64_t D, double lazy_alpha, double n, double a);

}  // namespace twochoice
