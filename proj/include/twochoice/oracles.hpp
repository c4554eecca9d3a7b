#pragma once

// Reference computations used by the tests. Everything here works on plain
// load vectors and shares no code with the engine, so agreement between the
// two is evidence rather than tautology. Most routines are exponential or
// quadratic; keep inputs small.

#include <cstdint>
#include <vector>

namespace twochoice::oracles {

using Loads = std::vector<std::int64_t>;

double phi_naive(const Loads& loads, double alpha);
double psi_naive(const Loads& loads, double alpha);
double gamma_naive(const Loads& loads, double alpha);

// sum_i exp(alpha * max(0, x_i - ceil(m/n))).
double clipped_phi_naive(const Loads& loads, double alpha);

// Number of bins with x_i <= ceil(m/n).
std::int64_t zero_excess_bins(const Loads& loads);

// Exact E[Gamma(x') - Gamma(x)] for one step: all n^2 ordered choice pairs
// for the insertion (ball to the first of the pair unless the second is
// strictly lighter), and every deletion target under the given model.
double exact_gamma_drift(const Loads& loads, double beta, double alpha, bool ball_model);

// Enumeration of one step's effect on m_h = #balls at height >= h.
struct LevelMoveCounts {
  std::uint64_t up_pairs = 0;     // choice pairs whose ball lands at height >= h
  std::uint64_t total_pairs = 0;  // n^2
  std::uint64_t down_bins = 0;    // bins whose top ball sits at height >= h
};
LevelMoveCounts enumerate_level_moves(const Loads& loads, std::int64_t h);

// Probability of reaching +b before -a from 0, stepping -1 with probability
// r / (1 + r): solves the a + b - 1 interior equations directly.
double gamblers_ruin_solve(double r, std::int64_t a, std::int64_t b);

// Expected time to hit 0 from D for the lazy reflecting walk, from the D
// hitting-time equations.
double hitting_time_solve(std::uint64_t D, double lazy_alpha);

// Minimum mean over all windows of length >= min_length, by trying every
// window.
double min_window_mean_bruteforce(const std::vector<double>& values, std::size_t min_length);

// count[i - 1] = number of ordered rank pairs (i1, i2) in [1, n]^2 with
// max(i1, i2) == i.
std::vector<std::uint64_t> rank_law_counts(std::size_t n);

}  // namespace twochoice::oracles
