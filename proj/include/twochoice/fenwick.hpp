#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace twochoice {

// Fenwick (binary indexed) tree over non-negative integer weights, 0-based
// externally. Supports O(log n) point updates, prefix sums, and inverse
// lookup of a cumulative position, which is what proportional-to-weight
// sampling needs.
class FenwickTree {
 public:
  FenwickTree() = default;
  explicit FenwickTree(std::size_t n) : n_(n), tree_(n + 1, 0) {
    while ((top_bit_ << 1) <= n_) top_bit_ <<= 1;
  }

  std::size_t size() const noexcept { return n_; }

  void add(std::size_t index, std::int64_t delta) noexcept {
    for (std::size_t i = index + 1; i <= n_; i += i & (~i + 1)) tree_[i] += delta;
  }

  // Sum of weights [0, count).
  std::int64_t prefix(std::size_t count) const noexcept {
    std::int64_t sum = 0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  // Index i with prefix(i) <= position < prefix(i + 1).
  // Requires 0 <= position < prefix(size()).
  std::size_t find(std::int64_t position) const noexcept {
    std::size_t idx = 0;
    for (std::size_t step = top_bit_; step != 0; step >>= 1) {
      const std::size_t next = idx + step;
      if (next <= n_ && tree_[next] <= position) {
        idx = next;
        position -= tree_[next];
      }
    }
    return idx;
  }

  friend bool operator==(const FenwickTree&, const FenwickTree&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t top_bit_ = 1;
  std::vector<std::int64_t> tree_{0};
};

}  // namespace twochoice
