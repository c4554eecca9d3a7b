#include "twochoice/metrics.hpp"

#include <algorithm>

#include "twochoice/errors.hpp"

namespace twochoice {

const char* to_string(LevelStatus status) noexcept {
  switch (status) {
    case LevelStatus::kSafe:
      return "safe";
    case LevelStatus::kCritical:
      return "critical";
    case LevelStatus::kInvalid:
      return "invalid";
  }
  return "?";
}

MetricsSample measure(const BinState& state, std::uint64_t t) {
  MetricsSample s;
  s.t = t;
  s.m = state.total_load();
  s.m_max = state.max_total_load();
  s.x_max = state.max_load();
  s.x_min = state.min_load();
  const double n = static_cast<double>(state.n());
  const double avg = static_cast<double>(s.m) / n;
  s.disc = static_cast<double>(s.x_max) - avg;
  s.adisc = std::max(s.disc, avg - static_cast<double>(s.x_min));
  s.overload = static_cast<double>(s.x_max) - static_cast<double>(s.m_max) / n;
  return s;
}

Load balls_at_or_above(const BinState& state, Load h) {
  if (h <= 1) return state.total_load();
  const auto hist = state.histogram();
  Load count = 0;
  for (Load v = h; v <= state.max_load(); ++v) {
    count += hist[static_cast<std::size_t>(v)] * (v - h + 1);
  }
  return count;
}

Load base_height(const BinState& state, Load gamma) {
  const auto n = static_cast<Load>(state.n());
  const Load m_max = state.max_total_load();
  return (m_max + n - 1) / n + gamma;
}

Load bins_at_or_above(const BinState& state, Load v) {
  if (v <= 0) return static_cast<Load>(state.n());
  const auto hist = state.histogram();
  Load count = 0;
  for (Load u = v; u <= state.max_load(); ++u) count += hist[static_cast<std::size_t>(u)];
  return count;
}

LevelStepProbs level_step_probs(const BinState& state, Load h, double beta_t) {
  if (h < 1) throw ConfigError("level_step_probs needs h >= 1");
  LevelStepProbs p;
  // For h >= 2 these equal m_{h-1} - m_h and m_h - m_{h+1}. Counting bins
  // directly also covers h = 1, where every bin is eligible for the increase.
  p.up_bins = bins_at_or_above(state, h - 1);
  p.down_bins = bins_at_or_above(state, h);
  const double n = static_cast<double>(state.n());
  const double up = static_cast<double>(p.up_bins);
  p.p_up = beta_t * up * up / (n * n);
  p.p_down_lb = (1.0 - beta_t) * static_cast<double>(p.down_bins) / n;
  return p;
}

}  // namespace twochoice
