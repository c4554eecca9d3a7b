#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twochoice/fenwick.hpp"
#include "twochoice/rng.hpp"

namespace twochoice {

using BinId = std::uint32_t;
using Load = std::int64_t;

// Live configuration of n bins. Loads are stored by bin id (unsorted); the
// derived structures are maintained incrementally on every +/-1 change:
//   - a load histogram plus min/max trackers, so statistics are O(1)
//   - a swap-remove array of non-empty bins, for O(1) uniform sampling
//   - a Fenwick tree over loads, for O(log n) proportional-to-load sampling
//
// Single writer. Copyable, so callers clone for what-if evaluation.
class BinState {
 public:
  explicit BinState(std::size_t n);

  // Starts from an explicit load vector. max_total_load defaults to the
  // vector's total and must not be below it.
  static BinState from_loads(std::span<const Load> loads,
                             std::optional<Load> max_total_load = std::nullopt);

  // Perfectly balanced configuration with the given total load.
  static BinState balanced(std::size_t n, Load total_load);

  std::size_t n() const noexcept { return loads_.size(); }
  Load load(BinId bin) const noexcept { return loads_[bin]; }
  std::span<const Load> loads() const noexcept { return loads_; }
  Load total_load() const noexcept { return total_; }
  Load max_total_load() const noexcept { return max_total_; }
  Load max_load() const noexcept { return max_load_; }
  Load min_load() const noexcept { return min_load_; }

  std::size_t nonempty_count() const noexcept { return nonempty_.size(); }
  std::span<const BinId> nonempty_bins() const noexcept { return nonempty_; }

  // histogram()[v] = number of bins with load exactly v, for v <= max_load().
  std::span<const std::int64_t> histogram() const noexcept {
    return {histogram_.data(), static_cast<std::size_t>(max_load_) + 1};
  }
  std::int64_t bins_with_load(Load v) const noexcept {
    return v >= 0 && v <= max_load_ ? histogram_[v] : 0;
  }

  const FenwickTree& load_tree() const noexcept { return tree_; }

  void add_ball(BinId bin);
  // Throws std::logic_error if the bin is empty.
  void remove_ball(BinId bin);

  // Uniform over non-empty bins. Requires total_load() > 0.
  BinId sample_nonempty(Rng& rng) const noexcept;
  // Bin i with probability load(i) / total_load(). Requires total_load() > 0.
  BinId sample_by_load(Rng& rng) const noexcept;

  // Loads sorted non-increasingly (the rank view).
  std::vector<Load> sorted_loads() const;

  // Recomputes every derived structure from the raw loads and compares with
  // the maintained ones. Returns an empty string when coherent, otherwise a
  // description of the first mismatch.
  std::string coherence_error() const;

 private:
  void grow_histogram(Load v);

  std::vector<Load> loads_;
  Load total_ = 0;
  Load max_total_ = 0;
  Load max_load_ = 0;
  Load min_load_ = 0;
  std::vector<BinId> nonempty_;
  std::vector<std::int64_t> nonempty_pos_;  // -1 when the bin is empty
  std::vector<std::int64_t> histogram_;
  FenwickTree tree_;
};

}  // namespace twochoice
