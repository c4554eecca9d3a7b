#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"

namespace twochoice {

// Insertion-probability sequence beta(t), t = 1, 2, ...
//
// Every kind is a pure function of t: querying the same step twice yields the
// same value, and stochastic kinds (IidUniform) are counter-based rather than
// stateful.
class Schedule {
 public:
  struct Constant {
    double beta;
  };
  struct Segment {
    std::uint64_t start;  // first step this beta applies to
    double beta;
  };
  // Segments sorted by start, first start == 1; the last one never ends.
  struct PiecewiseConstant {
    std::vector<Segment> segments;
  };
  // mid + amplitude * sin(2 pi t / period)
  struct Sinusoid {
    double mid;
    double amplitude;
    double period;
  };
  // beta(t) = values[t - 1]; querying past the end is an error.
  struct Explicit {
    std::vector<double> values;
  };
  // beta_pre for t <= t_switch, then 1/2 - epsilon for burst_length steps;
  // querying past the burst is an error.
  struct DeletionBurst {
    double beta_pre;
    std::uint64_t t_switch;
    double epsilon;
    std::uint64_t burst_length;
  };
  // beta(t) drawn independently and uniformly from [lo, hi], derived from a
  // hash of (seed, t).
  struct IidUniform {
    double lo;
    double hi;
    std::uint64_t seed;
  };

  using Kind = std::variant<Constant, PiecewiseConstant, Sinusoid, Explicit,
                            DeletionBurst, IidUniform>;

  // Validates the parameters and derives (beta_lo, beta_hi).
  explicit Schedule(Kind kind);

  static Schedule constant(double beta) { return Schedule(Constant{beta}); }

  // Throws ScheduleTooShort for finite kinds queried past their length.
  double beta(std::uint64_t t) const;

  double beta_lo() const noexcept { return lo_; }
  double beta_hi() const noexcept { return hi_; }

  // Number of defined steps, or nullopt for infinite schedules.
  std::optional<std::uint64_t> length() const noexcept;

  const Kind& kind() const noexcept { return kind_; }

  nlohmann::ordered_json to_json() const;
  static Schedule from_json(const nlohmann::json& j);

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.to_json() == b.to_json();
  }

 private:
  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

}  // namespace twochoice
