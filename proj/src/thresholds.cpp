#include "twochoice/thresholds.hpp"

#include <cmath>
#include <string>

#include "twochoice/errors.hpp"

namespace twochoice {

namespace {

// The recursion hits alphas[1] == alphas[0] / 4 exactly; compare with a
// relative slack so rounding does not register as a failure.
constexpr double kSandwichSlack = 1e-12;

}  // namespace

double Thresholds::stop_threshold() const noexcept {
  const double nn = static_cast<double>(n);
  return std::sqrt(3.0 * (1.0 - beta_hat) / (2.0 * beta_hat) * nn * std::log(nn));
}

Thresholds build_thresholds(std::size_t n, double beta_hat, Load gamma) {
  if (!(beta_hat > 0.0 && beta_hat < 1.0)) {
    throw ConfigError("beta_hat must lie in (0, 1)");
  }
  if (n < 2) throw ConfigError("thresholds need n >= 2");
  if (gamma < 0) throw ConfigError("gamma must be non-negative");

  Thresholds th;
  th.n = n;
  th.beta_hat = beta_hat;
  th.gamma = gamma;

  const double nn = static_cast<double>(n);
  const double log_n = std::log(nn);
  const double ratio = beta_hat / (1.0 - beta_hat);
  const double alpha0 = nn / (128.0 * ratio);
  const double last_recursive = 12.0 * log_n;
  if (alpha0 <= last_recursive) {
    throw DegenerateN("alpha_0 = " + std::to_string(alpha0) + " <= 12 ln n = " +
                      std::to_string(last_recursive) + " for n = " + std::to_string(n));
  }

  const double stop = th.stop_threshold();
  th.alphas.push_back(alpha0);
  while (th.alphas.back() > stop) {
    const double prev = th.alphas.back();
    th.alphas.push_back(32.0 * ratio * prev * prev / nn);
  }
  th.ell_star = th.alphas.size();
  th.alphas.push_back(last_recursive);
  th.alphas.push_back(24.0);

  for (std::size_t l = 1; l < th.alphas.size(); ++l) {
    const double prev = th.alphas[l - 1];
    const double lower = 8.0 * ratio * prev * prev / nn;
    const double upper = prev / 4.0;
    const double a = th.alphas[l];
    if (a < lower * (1.0 - kSandwichSlack) || a > upper * (1.0 + kSandwichSlack)) {
      th.sandwich_failures.push_back(l);
    }
  }
  return th;
}

std::vector<LevelStatus> classify_levels(const BinState& state, Load base_height,
                                         const Thresholds& th) {
  std::vector<LevelStatus> out(th.levels());
  for (std::size_t l = 0; l < th.levels(); ++l) {
    const auto count =
        static_cast<double>(balls_at_or_above(state, base_height + static_cast<Load>(l)));
    const double alpha = th.alphas[l];
    if (count < alpha / 2.0) {
      out[l] = LevelStatus::kSafe;
    } else if (count < alpha) {
      out[l] = LevelStatus::kCritical;
    } else {
      out[l] = LevelStatus::kInvalid;
    }
  }
  return out;
}

}  // namespace twochoice
