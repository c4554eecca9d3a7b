#include "twochoice/cgood.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "twochoice/errors.hpp"

namespace twochoice {

namespace {

std::vector<double> prefix_sums(std::span<const double> values) {
  std::vector<double> p(values.size() + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) p[i + 1] = p[i] + values[i];
  return p;
}

struct Window {
  std::size_t a;
  std::size_t b;
  double deficit;  // (b - a) * (lambda - mean), positive when mean < lambda
};

// Window (a, b] with b - a >= len maximizing lambda * (b - a) - (P[b] - P[a]).
std::optional<Window> worst_window(const std::vector<double>& p, std::size_t len,
                                   double lambda) {
  const std::size_t total = p.size() - 1;
  if (len > total) return std::nullopt;
  auto q = [&](std::size_t k) { return p[k] - lambda * static_cast<double>(k); };
  std::size_t best_a = 0;
  double best_q = q(0);
  std::optional<Window> worst;
  for (std::size_t b = len; b <= total; ++b) {
    const std::size_t a = b - len;
    if (const double qa = q(a); qa > best_q) {
      best_q = qa;
      best_a = a;
    }
    const double deficit = best_q - q(b);
    if (!worst || deficit > worst->deficit) worst = Window{best_a, b, deficit};
  }
  return worst;
}

double window_mean(const std::vector<double>& p, std::size_t a, std::size_t b) {
  return (p[b] - p[a]) / static_cast<double>(b - a);
}

}  // namespace

CGoodVerdict check_c_good(std::span<const double> values, std::uint64_t t1,
                          std::uint64_t min_length, double epsilon) {
  if (values.empty()) throw ConfigError("c-good check over an empty interval");
  if (min_length == 0) throw ConfigError("c-good window length must be positive");
  const auto p = prefix_sums(values);
  const double threshold = 0.5 * (1.0 + epsilon) - kCGoodTolerance;
  const auto worst = worst_window(p, static_cast<std::size_t>(min_length), threshold);
  if (!worst || !(worst->deficit > 0.0)) return CGood{};
  return CGoodViolation{t1 + worst->a, t1 + worst->b, window_mean(p, worst->a, worst->b)};
}

CGoodVerdict check_c_good(const Schedule& schedule, std::uint64_t t1, std::uint64_t t2,
                          std::uint64_t c, double epsilon, std::uint64_t n) {
  if (t2 <= t1) throw ConfigError("c-good interval (t1, t2] is empty");
  if (c == 0 || n == 0) throw ConfigError("c-good check needs c >= 1 and n >= 1");
  if (const auto len = schedule.length(); len && *len < t2) {
    throw ScheduleTooShort("schedule defines " + std::to_string(*len) +
                           " steps but the interval ends at " + std::to_string(t2));
  }
  std::vector<double> values;
  values.reserve(t2 - t1);
  for (std::uint64_t t = t1 + 1; t <= t2; ++t) values.push_back(schedule.beta(t));
  return check_c_good(values, t1, c * n, epsilon);
}

CGoodViolation min_window_mean(std::span<const double> values, std::uint64_t min_length) {
  if (min_length == 0 || values.size() < min_length) {
    throw ConfigError("min_window_mean needs 1 <= min_length <= number of values");
  }
  const auto p = prefix_sums(values);
  const auto len = static_cast<std::size_t>(min_length);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn;
  double hi = *mx;
  // Invariant: some window has mean <= hi; no window has mean < lo.
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const auto w = worst_window(p, len, mid);
    if (w && w->deficit >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const auto w = worst_window(p, len, hi);
  return CGoodViolation{w->a, w->b, window_mean(p, w->a, w->b)};
}

}  // namespace twochoice
