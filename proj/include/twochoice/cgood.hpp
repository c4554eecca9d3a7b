#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "twochoice/schedule.hpp"

namespace twochoice {

struct CGood {
  friend bool operator==(const CGood&, const CGood&) = default;
};

// A subinterval (t1, t2] whose mean beta falls below (1 + epsilon) / 2.
struct CGoodViolation {
  std::uint64_t t1 = 0;
  std::uint64_t t2 = 0;
  double mean = 0.0;
};

using CGoodVerdict = std::variant<CGood, CGoodViolation>;

// Comparison slack on window means.
inline constexpr double kCGoodTolerance = 1e-12;

// Checks that every subinterval (a, b] of [t1, t2] with b - a >= c * n has
// mean beta >= (1 + epsilon) / 2 (minus kCGoodTolerance), on the realized
// per-step values. O(T) after prefix sums.
// Throws ScheduleTooShort if the schedule does not cover (t1, t2], and
// ConfigError for an empty interval.
CGoodVerdict check_c_good(const Schedule& schedule, std::uint64_t t1, std::uint64_t t2,
                          std::uint64_t c, double epsilon, std::uint64_t n);

// Same check over beta(t1 + 1) .. beta(t1 + values.size()) given directly;
// reported windows are in the schedule's time coordinates.
CGoodVerdict check_c_good(std::span<const double> values, std::uint64_t t1,
                          std::uint64_t min_length, double epsilon);

// Minimum mean over windows of length >= min_length, located by binary
// search on the mean (each probe is an O(T) prefix-sum pass). Returns the
// window that attains it (within 1e-13). Requires values.size() >= min_length.
CGoodViolation min_window_mean(std::span<const double> values, std::uint64_t min_length);

}  // namespace twochoice
