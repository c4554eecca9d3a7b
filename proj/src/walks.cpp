#include "twochoice/walks.hpp"

#include <cmath>

#include "twochoice/errors.hpp"

namespace twochoice {

void WalkParams::validate_crossing() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("r must be a positive real");
  if (r == 1.0) throw RIsOne("r == 1: crossing formula degenerates");
  if (a < 1) throw ConfigError("a must be a positive integer");
  if (b < 1) throw ConfigError("b must be a positive integer");
}

void WalkParams::validate_hitting() const {
  if (D < 1) throw ConfigError("D must be at least 1");
  if (!(lazy_alpha >= 0.0 && lazy_alpha < 1.0)) throw ConfigError("lazy_alpha must lie in [0, 1)");
}

double biased_rw_cross_prob(double r, std::int64_t a, std::int64_t b) {
  WalkParams{.r = r, .a = a, .b = b}.validate_crossing();
  // expm1 keeps precision when r is close to 1.
  const double lr = std::log(r);
  return std::expm1(static_cast<double>(a) * lr) / std::expm1(static_cast<double>(a + b) * lr);
}

double simulate_biased_walk_crossing(double r, std::int64_t a, std::int64_t b,
                                     std::uint64_t trials, Rng& rng) {
  WalkParams{.r = r, .a = a, .b = b}.validate_crossing();
  if (trials < 10000) throw ConfigError("walk crossing needs at least 10^4 trials");
  const double p_left = r / (1.0 + r);
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    std::int64_t pos = 0;
    while (pos > -a && pos < b) pos += rng.uniform01() < p_left ? -1 : 1;
    if (pos == b) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

std::uint64_t reflecting_lazy_walk_hit_time(std::uint64_t D, double lazy_alpha, Rng& rng) {
  WalkParams{.D = D, .lazy_alpha = lazy_alpha}.validate_hitting();
  const double down = lazy_alpha + (1.0 - lazy_alpha) / 2.0;
  std::uint64_t pos = D;
  std::uint64_t t = 0;
  while (pos > 0) {
    ++t;
    const double u = rng.uniform01();
    if (u < lazy_alpha) continue;
    if (u < down) {
      --pos;
    } else if (pos < D) {
      ++pos;
    }
  }
  return t;
}

double expected_hit_time(std::uint64_t D, double lazy_alpha) {
  WalkParams{.D = D, .lazy_alpha = lazy_alpha}.validate_hitting();
  const double d = static_cast<double>(D);
  return d * (d + 1.0) / (1.0 - lazy_alpha);
}

double hit_time_tail_cutoff(std::uint64_t D, double lazy_alpha, double n, double a) {
  return 2.0 * expected_hit_time(D, lazy_alpha) * a * std::log(n);
}

}  // namespace twochoice
