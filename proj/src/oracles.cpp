#include "twochoice/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace twochoice::oracles {

namespace {

double mean_of(const Loads& loads) {
  const double m = static_cast<double>(std::accumulate(loads.begin(), loads.end(), std::int64_t{0}));
  return m / static_cast<double>(loads.size());
}

std::int64_t ceil_mean(const Loads& loads) {
  const std::int64_t m = std::accumulate(loads.begin(), loads.end(), std::int64_t{0});
  const auto n = static_cast<std::int64_t>(loads.size());
  return (m + n - 1) / n;
}

// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
// upper[k-1] are ignored.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t k = diag.size();
  for (std::size_t i = 1; i < k; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(k);
  x[k - 1] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace

double phi_naive(const Loads& loads, double alpha) {
  const double avg = mean_of(loads);
  double s = 0.0;
  for (auto x : loads) s += std::exp(alpha * (static_cast<double>(x) - avg));
  return s;
}

double psi_naive(const Loads& loads, double alpha) {
  const double avg = mean_of(loads);
  double s = 0.0;
  for (auto x : loads) s += std::exp(alpha * (avg - static_cast<double>(x)));
  return s;
}

double gamma_naive(const Loads& loads, double alpha) {
  return phi_naive(loads, alpha) + psi_naive(loads, alpha);
}

double clipped_phi_naive(const Loads& loads, double alpha) {
  const auto c = ceil_mean(loads);
  double s = 0.0;
  for (auto x : loads) s += std::exp(alpha * static_cast<double>(x > c ? x - c : 0));
  return s;
}

std::int64_t zero_excess_bins(const Loads& loads) {
  const auto c = ceil_mean(loads);
  std::int64_t k = 0;
  for (auto x : loads) k += x <= c ? 1 : 0;
  return k;
}

double exact_gamma_drift(const Loads& loads, double beta, double alpha, bool ball_model) {
  const std::size_t n = loads.size();
  const double before = gamma_naive(loads, alpha);
  Loads next = loads;

  double insert = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t target = loads[j] < loads[i] ? j : i;
      ++next[target];
      insert += gamma_naive(next, alpha) - before;
      --next[target];
    }
  }
  insert /= static_cast<double>(n * n);

  const std::int64_t m = std::accumulate(loads.begin(), loads.end(), std::int64_t{0});
  std::int64_t nonempty = 0;
  for (auto x : loads) nonempty += x > 0 ? 1 : 0;
  double del = 0.0;
  if (m > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (loads[i] == 0) continue;
      const double w = ball_model ? static_cast<double>(loads[i]) / static_cast<double>(m)
                                  : 1.0 / static_cast<double>(nonempty);
      --next[i];
      del += w * (gamma_naive(next, alpha) - before);
      ++next[i];
    }
  }
  return beta * insert + (1.0 - beta) * del;
}

LevelMoveCounts enumerate_level_moves(const Loads& loads, std::int64_t h) {
  LevelMoveCounts c;
  const std::size_t n = loads.size();
  c.total_pairs = n * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t target = loads[j] < loads[i] ? j : i;
      // the new ball sits at height loads[target] + 1
      if (loads[target] + 1 >= h) ++c.up_pairs;
    }
  }
  for (auto x : loads) {
    if (x >= 1 && x >= h) ++c.down_bins;
  }
  return c;
}

double gamblers_ruin_solve(double r, std::int64_t a, std::int64_t b) {
  // unknowns P(k) for k = -a+1 .. b-1
  const double pl = r / (1.0 + r);
  const double pr = 1.0 / (1.0 + r);
  const auto k = static_cast<std::size_t>(a + b - 1);
  if (k == 0) return 0.0;
  std::vector<double> lower(k, -pl), diag(k, 1.0), upper(k, -pr), rhs(k, 0.0);
  rhs[k - 1] = pr;  // neighbour +b has P = 1
  const auto p = solve_tridiagonal(lower, diag, upper, rhs);
  return p[static_cast<std::size_t>(a - 1)];  // position 0
}

double hitting_time_solve(std::uint64_t D, double lazy_alpha) {
  // unknowns h(1) .. h(D):
  //   interior: (1 - a) h(k) - (1 - a)/2 (h(k-1) + h(k+1)) = 1
  //   top:      (1 - a)/2 h(D) - (1 - a)/2 h(D-1) = 1
  const double move = (1.0 - lazy_alpha) / 2.0;
  const auto k = static_cast<std::size_t>(D);
  std::vector<double> lower(k, -move), diag(k, 1.0 - lazy_alpha), upper(k, -move), rhs(k, 1.0);
  diag[k - 1] = move;
  const auto h = solve_tridiagonal(lower, diag, upper, rhs);
  return h[k - 1];
}

double min_window_mean_bruteforce(const std::vector<double>& values, std::size_t min_length) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < values.size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = a; b < values.size(); ++b) {
      sum += values[b];
      const std::size_t len = b - a + 1;
      if (len >= min_length) best = std::min(best, sum / static_cast<double>(len));
    }
  }
  return best;
}

std::vector<std::uint64_t> rank_law_counts(std::size_t n) {
  std::vector<std::uint64_t> count(n, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) ++count[std::max(i, j) - 1];
  }
  return count;
}

}  // namespace twochoice::oracles
