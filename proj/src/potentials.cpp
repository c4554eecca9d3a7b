#include "twochoice/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "twochoice/errors.hpp"

namespace twochoice {

bool PotentialParams::valid_for_discrepancy_bound() const noexcept {
  return alpha > 0.0 && alpha <= beta_lb / 16.0;
}

bool PotentialParams::valid_for_drift_bound() const noexcept {
  return alpha > 0.0 && epsilon <= 3.0 / 16.0 && alpha <= epsilon * beta_lb / 3.0;
}

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
}

void guard_exponent(double exponent) {
  if (exponent > kMaxExponent) {
    throw OverflowError("potential exponent " + std::to_string(exponent) + " exceeds " +
                        std::to_string(kMaxExponent));
  }
}

double average(const BinState& state) {
  return static_cast<double>(state.total_load()) / static_cast<double>(state.n());
}

Load ceil_average(const BinState& state) {
  const auto n = static_cast<Load>(state.n());
  return (state.total_load() + n - 1) / n;
}

// sum over occupied load values v of hist[v] * exp(sign * alpha * (v - avg))
double signed_sum(const BinState& state, double alpha, double sign) {
  require_alpha(alpha);
  const double avg = average(state);
  const double spread = std::max(static_cast<double>(state.max_load()) - avg,
                                 avg - static_cast<double>(state.min_load()));
  guard_exponent(alpha * spread);
  const auto hist = state.histogram();
  double sum = 0.0;
  for (Load v = state.min_load(); v <= state.max_load(); ++v) {
    const auto count = hist[static_cast<std::size_t>(v)];
    if (count == 0) continue;
    sum += static_cast<double>(count) * std::exp(sign * alpha * (static_cast<double>(v) - avg));
  }
  return sum;
}

}  // namespace

double phi_signed(const BinState& state, double alpha) { return signed_sum(state, alpha, 1.0); }

double psi(const BinState& state, double alpha) { return signed_sum(state, alpha, -1.0); }

double gamma_potential(const BinState& state, double alpha) {
  return phi_signed(state, alpha) + psi(state, alpha);
}

double phi_clipped(const BinState& state, double alpha) {
  require_alpha(alpha);
  const Load base = ceil_average(state);
  guard_exponent(alpha * static_cast<double>(std::max<Load>(0, state.max_load() - base)));
  const auto hist = state.histogram();
  double sum = 0.0;
  for (Load v = state.min_load(); v <= state.max_load(); ++v) {
    const auto count = hist[static_cast<std::size_t>(v)];
    if (count == 0) continue;
    const Load excess = std::max<Load>(0, v - base);
    sum += static_cast<double>(count) * std::exp(alpha * static_cast<double>(excess));
  }
  return sum;
}

double ball_potential_sum(const BinState& state, double alpha) {
  require_alpha(alpha);
  const Load base = ceil_average(state);
  const Load top = std::max<Load>(0, state.max_load() - base);
  guard_exponent(alpha * static_cast<double>(top));

  // per_bin[k]: potential carried by the k lowest above-base balls of a bin,
  // accumulated one ball at a time.
  std::vector<double> per_bin(static_cast<std::size_t>(top) + 1, 0.0);
  for (Load j = 1; j <= top; ++j) {
    const double ball = j == 1 ? std::exp(alpha)
                               : std::exp(alpha * static_cast<double>(j)) -
                                     std::exp(alpha * static_cast<double>(j - 1));
    per_bin[static_cast<std::size_t>(j)] = per_bin[static_cast<std::size_t>(j - 1)] + ball;
  }

  const auto hist = state.histogram();
  double sum = 0.0;
  for (Load v = std::max(base + 1, state.min_load()); v <= state.max_load(); ++v) {
    const auto count = hist[static_cast<std::size_t>(v)];
    if (count == 0) continue;
    sum += static_cast<double>(count) * per_bin[static_cast<std::size_t>(v - base)];
  }
  return sum;
}

DriftEstimate drift_estimate(const BinState& state, double beta_t, double alpha,
                             std::uint64_t trials, Rng& rng, DeletionModel model) {
  if (trials < 1000) throw ConfigError("drift_estimate needs at least 1000 trials");
  const double before = gamma_potential(state, alpha);
  const std::uint64_t master = rng.next();
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    Rng trial_rng(mix_seed(master, k));
    BinState next = state;
    step(next, beta_t, trial_rng, model);
    const double delta = gamma_potential(next, alpha) - before;
    const double d1 = delta - mean;
    mean += d1 / static_cast<double>(k + 1);
    m2 += d1 * (delta - mean);
  }
  const double variance = m2 / static_cast<double>(trials - 1);
  return DriftEstimate{mean, std::sqrt(variance / static_cast<double>(trials)), trials};
}

}  // namespace twochoice
