#pragma once

#include <cstdint>

#include "twochoice/bin_state.hpp"
#include "twochoice/process.hpp"
#include "twochoice/rng.hpp"

namespace twochoice {

// Largest exponent (natural-log units) any potential may evaluate; beyond it
// the potentials throw OverflowError instead of returning infinities.
inline constexpr double kMaxExponent = 700.0;

// Parameters of the exponential potentials. `epsilon` is the rank-mass
// margin of the drift argument (at most 3/16) and `beta_lb` the constant
// lower bound on the insertion probability.
struct PotentialParams {
  double alpha = 0.0;
  double epsilon = 3.0 / 16.0;
  double beta_lb = 0.0;

  // alpha <= beta_lb / 16: the regime of the logarithmic discrepancy bound.
  bool valid_for_discrepancy_bound() const noexcept;
  // alpha <= epsilon * beta_lb / 3: the regime of the one-step drift bound.
  bool valid_for_drift_bound() const noexcept;
};

// Phi = sum_i exp(alpha * (x_i - m/n)).
double phi_signed(const BinState& state, double alpha);
inline double phi(const BinState& state, double alpha) { return phi_signed(state, alpha); }

// Psi = sum_i exp(-alpha * (x_i - m/n)).
double psi(const BinState& state, double alpha);

// Gamma = Phi + Psi >= 2n.
double gamma_potential(const BinState& state, double alpha);

// Phi+ = sum_i exp(alpha * X_i+), X_i+ = max(0, x_i - ceil(m/n)). Bins with
// no excess contribute exp(0) = 1.
double phi_clipped(const BinState& state, double alpha);

// Pi = sum over balls of the per-ball potential: a ball at height
// ceil(m/n) + j (j >= 1) carries exp(alpha) for j = 1 and
// exp(alpha j) - exp(alpha (j - 1)) above; balls at or below ceil(m/n)
// carry 0. Summed ball by ball (not via the closed form), so
// Pi + #{i : X_i+ = 0} = Phi+ is a real identity check.
double ball_potential_sum(const BinState& state, double alpha);

struct DriftEstimate {
  double mean = 0.0;     // sample mean of Gamma(x') - Gamma(x)
  double std_err = 0.0;  // standard error of that mean
  std::uint64_t trials = 0;
};

// Monte-Carlo estimate of E[Gamma(x') - Gamma(x) | x] for one step of the
// process from the frozen `state`. Trial k uses the substream
// mix_seed(master, k) where master is one draw from `rng`. Requires
// trials >= 1000.
DriftEstimate drift_estimate(const BinState& state, double beta_t, double alpha,
                             std::uint64_t trials, Rng& rng,
                             DeletionModel model = DeletionModel::kBin);

}  // namespace twochoice
