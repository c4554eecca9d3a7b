#include "twochoice/bin_state.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "twochoice/errors.hpp"

namespace twochoice {

BinState::BinState(std::size_t n)
    : loads_(n, 0), nonempty_pos_(n, -1), histogram_(1, 0), tree_(n) {
  if (n == 0) throw ConfigError("BinState needs at least one bin");
  histogram_[0] = static_cast<std::int64_t>(n);
}

BinState BinState::from_loads(std::span<const Load> loads,
                              std::optional<Load> max_total_load) {
  BinState state(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (loads[i] < 0) throw ConfigError("negative load in initial configuration");
    for (Load k = 0; k < loads[i]; ++k) state.add_ball(static_cast<BinId>(i));
  }
  if (max_total_load) {
    if (*max_total_load < state.total_) {
      throw ConfigError("max_total_load below the current total load");
    }
    state.max_total_ = *max_total_load;
  }
  return state;
}

BinState BinState::balanced(std::size_t n, Load total_load) {
  std::vector<Load> loads(n, total_load / static_cast<Load>(n));
  const auto extra = static_cast<std::size_t>(total_load % static_cast<Load>(n));
  for (std::size_t i = 0; i < extra; ++i) ++loads[i];
  return from_loads(loads);
}

void BinState::grow_histogram(Load v) {
  if (static_cast<std::size_t>(v) >= histogram_.size()) {
    histogram_.resize(std::max<std::size_t>(static_cast<std::size_t>(v) + 1,
                                            histogram_.size() * 2),
                      0);
  }
}

void BinState::add_ball(BinId bin) {
  const Load v = loads_[bin];
  grow_histogram(v + 1);
  --histogram_[v];
  ++histogram_[v + 1];
  loads_[bin] = v + 1;
  if (v + 1 > max_load_) max_load_ = v + 1;
  if (v == min_load_ && histogram_[v] == 0) min_load_ = v + 1;
  if (v == 0) {
    nonempty_pos_[bin] = static_cast<std::int64_t>(nonempty_.size());
    nonempty_.push_back(bin);
  }
  tree_.add(bin, 1);
  ++total_;
  if (total_ > max_total_) max_total_ = total_;
}

void BinState::remove_ball(BinId bin) {
  const Load v = loads_[bin];
  if (v == 0) throw std::logic_error("remove_ball on an empty bin");
  --histogram_[v];
  ++histogram_[v - 1];
  loads_[bin] = v - 1;
  if (v - 1 < min_load_) min_load_ = v - 1;
  if (v == max_load_ && histogram_[v] == 0) max_load_ = v - 1;
  if (v == 1) {
    const auto pos = static_cast<std::size_t>(nonempty_pos_[bin]);
    const BinId last = nonempty_.back();
    nonempty_[pos] = last;
    nonempty_pos_[last] = static_cast<std::int64_t>(pos);
    nonempty_.pop_back();
    nonempty_pos_[bin] = -1;
  }
  tree_.add(bin, -1);
  --total_;
}

BinId BinState::sample_nonempty(Rng& rng) const noexcept {
  return nonempty_[rng.uniform(nonempty_.size())];
}

BinId BinState::sample_by_load(Rng& rng) const noexcept {
  const auto position = static_cast<std::int64_t>(rng.uniform(static_cast<std::uint64_t>(total_)));
  return static_cast<BinId>(tree_.find(position));
}

std::vector<Load> BinState::sorted_loads() const {
  std::vector<Load> sorted = loads_;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted;
}

std::string BinState::coherence_error() const {
  std::ostringstream err;
  Load total = 0;
  Load mx = loads_.empty() ? 0 : loads_[0];
  Load mn = mx;
  std::size_t nonempty = 0;
  std::vector<std::int64_t> hist(static_cast<std::size_t>(max_load_) + 1, 0);
  for (std::size_t i = 0; i < loads_.size(); ++i) {
    const Load v = loads_[i];
    if (v < 0) {
      err << "negative load at bin " << i;
      return err.str();
    }
    total += v;
    mx = std::max(mx, v);
    mn = std::min(mn, v);
    if (v > 0) {
      ++nonempty;
      const auto pos = nonempty_pos_[i];
      if (pos < 0 || static_cast<std::size_t>(pos) >= nonempty_.size() ||
          nonempty_[static_cast<std::size_t>(pos)] != i) {
        err << "non-empty index does not locate bin " << i;
        return err.str();
      }
    } else if (nonempty_pos_[i] != -1) {
      err << "empty bin " << i << " still in non-empty index";
      return err.str();
    }
    if (static_cast<std::size_t>(v) >= hist.size()) {
      err << "load " << v << " above tracked maximum " << max_load_;
      return err.str();
    }
    ++hist[static_cast<std::size_t>(v)];
    const Load tree_value = tree_.prefix(i + 1) - tree_.prefix(i);
    if (tree_value != v) {
      err << "prefix tree holds " << tree_value << " for bin " << i << " with load " << v;
      return err.str();
    }
  }
  if (total != total_) err << "total_load " << total_ << " != recomputed " << total;
  else if (max_total_ < total_) err << "max_total_load below total_load";
  else if (mx != max_load_ || mn != min_load_) err << "min/max trackers out of date";
  else if (nonempty != nonempty_.size()) err << "non-empty index has wrong size";
  else if (tree_.prefix(tree_.size()) != total_) err << "prefix tree total mismatch";
  else {
    for (std::size_t v = 0; v < hist.size(); ++v) {
      if (hist[v] != histogram_[v]) {
        err << "histogram mismatch at load " << v;
        break;
      }
    }
    for (std::size_t v = hist.size(); v < histogram_.size() && err.str().empty(); ++v) {
      if (histogram_[v] != 0) err << "stale histogram entry at load " << v;
    }
  }
  return err.str();
}

}  // namespace twochoice
