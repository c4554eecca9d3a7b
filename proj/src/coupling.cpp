#include "twochoice/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "twochoice/errors.hpp"

namespace twochoice {

namespace {

std::vector<Load> sorted_desc(std::span<const Load> v) {
  std::vector<Load> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

void require_comparable(std::span<const Load> x, std::span<const Load> y) {
  if (x.size() != y.size()) {
    throw TotalLoadMismatch("load vectors have different n (" + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()) + ")");
  }
  const Load mx = std::accumulate(x.begin(), x.end(), Load{0});
  const Load my = std::accumulate(y.begin(), y.end(), Load{0});
  if (mx != my) {
    throw TotalLoadMismatch("total loads differ (" + std::to_string(mx) + " vs " +
                            std::to_string(my) + ")");
  }
}

std::size_t scaled_index(double z, std::uint64_t count) {
  const auto i = static_cast<std::uint64_t>(z * static_cast<double>(count));
  return static_cast<std::size_t>(std::min(i, count - 1));
}

}  // namespace

Load transformation_distance(std::span<const Load> x, std::span<const Load> y) {
  require_comparable(x, y);
  const auto sx = sorted_desc(x);
  const auto sy = sorted_desc(y);
  Load delta = 0;
  for (std::size_t i = 0; i < sx.size(); ++i) delta += std::max<Load>(0, sx[i] - sy[i]);
  return delta;
}

bool majorizes(std::span<const Load> x, std::span<const Load> y) {
  require_comparable(x, y);
  const auto sx = sorted_desc(x);
  const auto sy = sorted_desc(y);
  Load px = 0;
  Load py = 0;
  for (std::size_t i = 0; i < sx.size(); ++i) {
    px += sx[i];
    py += sy[i];
    if (py > px) return false;
  }
  return true;
}

BinDeletionSite locate_bin_deletion(std::span<const Load> sorted, double z) {
  const auto n_hat = static_cast<std::uint64_t>(
      std::count_if(sorted.begin(), sorted.end(), [](Load v) { return v > 0; }));
  if (n_hat == 0) throw ConfigError("deletion from an empty configuration");
  const std::size_t l = scaled_index(z, n_hat);
  const Load x_l = sorted[l];
  const double offset = z - static_cast<double>(l) / static_cast<double>(n_hat);
  auto k = static_cast<Load>(offset * static_cast<double>(n_hat) * static_cast<double>(x_l));
  k = std::clamp<Load>(k, 0, x_l - 1);
  return {l + 1, k + 1};
}

BallDeletionSite locate_ball_deletion(std::span<const Load> sorted, double z) {
  const Load m = std::accumulate(sorted.begin(), sorted.end(), Load{0});
  if (m == 0) throw ConfigError("deletion from an empty configuration");
  const auto i = static_cast<Load>(scaled_index(z, static_cast<std::uint64_t>(m)));
  Load before = 0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    if (i < before + sorted[r]) return {i + 1, r + 1, i - before + 1};
    before += sorted[r];
  }
  return {m, sorted.size(), sorted.back()};  // unreachable for consistent input
}

// SortedView ---------------------------------------------------------------

SortedView::SortedView(const BinState& state)
    : loads_(state.loads().begin(), state.loads().end()),
      order_(state.n()),
      rank_(state.n()),
      ge_(static_cast<std::size_t>(state.max_load()) + 2, 0) {
  std::iota(order_.begin(), order_.end(), BinId{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](BinId a, BinId b) { return loads_[a] > loads_[b]; });
  for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
  for (const Load v : loads_) ++ge_[static_cast<std::size_t>(v)];
  for (std::size_t v = ge_.size() - 1; v-- > 0;) ge_[v] += ge_[v + 1];
}

std::pair<std::size_t, std::size_t> SortedView::plateau(Load v) const noexcept {
  return {static_cast<std::size_t>(at_or_above(v + 1)),
          static_cast<std::size_t>(at_or_above(v))};
}

BinId SortedView::pick_in_plateau(Load v, Rng& rng) const noexcept {
  const auto [first, last] = plateau(v);
  return order_[first + rng.uniform(last - first)];
}

std::size_t SortedView::on_increment(BinId bin) {
  const Load v = loads_[bin];
  if (static_cast<std::size_t>(v) + 2 > ge_.size()) ge_.resize(static_cast<std::size_t>(v) + 2, 0);
  const auto front = static_cast<std::size_t>(ge_[v + 1]);
  const BinId other = order_[front];
  std::swap(order_[front], order_[rank_[bin]]);
  rank_[other] = rank_[bin];
  rank_[bin] = front;
  ++ge_[v + 1];
  ++loads_[bin];
  return front;
}

std::size_t SortedView::on_decrement(BinId bin) {
  const Load v = loads_[bin];
  const auto back = static_cast<std::size_t>(ge_[v]) - 1;
  const BinId other = order_[back];
  std::swap(order_[back], order_[rank_[bin]]);
  rank_[other] = rank_[bin];
  rank_[bin] = back;
  --ge_[v];
  --loads_[bin];
  return back;
}

std::vector<Load> SortedView::sorted_loads() const {
  std::vector<Load> out(order_.size());
  for (std::size_t r = 0; r < order_.size(); ++r) out[r] = loads_[order_[r]];
  return out;
}

std::string SortedView::coherence_error(const BinState& state) const {
  if (state.n() != n()) return "n differs";
  for (std::size_t b = 0; b < n(); ++b) {
    if (loads_[b] != state.load(static_cast<BinId>(b))) {
      return "load of bin " + std::to_string(b) + " differs";
    }
    if (order_[rank_[b]] != b) return "rank/order not inverse at bin " + std::to_string(b);
  }
  for (std::size_t r = 1; r < n(); ++r) {
    if (load_at(r - 1) < load_at(r)) return "order not sorted at rank " + std::to_string(r);
  }
  for (Load v = 0; v < static_cast<Load>(ge_.size()); ++v) {
    const auto count = static_cast<Load>(
        std::count_if(loads_.begin(), loads_.end(), [v](Load x) { return x >= v; }));
    if (count != ge_[v]) return "at-or-above count differs at load " + std::to_string(v);
  }
  if (state.max_load() >= static_cast<Load>(ge_.size())) {
    return "at-or-above table shorter than max load";
  }
  return {};
}

// CoupledPair --------------------------------------------------------------

CoupledPair::CoupledPair(BinState x, BinState y, std::uint64_t seed, DeletionModel model_x,
                         DeletionModel model_y)
    : x_(std::move(x)),
      y_(std::move(y)),
      sx_(x_),
      sy_(y_),
      rng_(seed),
      model_x_(model_x),
      model_y_(model_y) {
  require_comparable(x_.loads(), y_.loads());
  for (std::size_t r = 0; r < x_.n(); ++r) {
    l1_ += std::abs(sx_.load_at(r) - sy_.load_at(r));
  }
}

bool CoupledPair::x_majorizes_y() const noexcept {
  Load px = 0;
  Load py = 0;
  for (std::size_t r = 0; r < x_.n(); ++r) {
    px += sx_.load_at(r);
    py += sy_.load_at(r);
    if (py > px) return false;
  }
  return true;
}

void CoupledPair::track(std::size_t rank, Load change, int which) {
  const Load now = sx_.load_at(rank) - sy_.load_at(rank);
  const Load before = which == 0 ? now - change : now + change;
  l1_ += std::abs(now) - std::abs(before);
}

std::pair<StepEvent, StepEvent> CoupledPair::step(double beta_t) {
  ++steps_;
  if (rng_.uniform01() < beta_t) {
    // X draws two bins; Y takes the bins holding the same two ranks. Either
    // way the ball lands on the load value at rank max(i, j).
    const std::uint64_t n = x_.n();
    const BinId xs[2] = {static_cast<BinId>(rng_.uniform(n)), static_cast<BinId>(rng_.uniform(n))};
    const BinId ys[2] = {sy_.bin_at(sx_.rank_of(xs[0])), sy_.bin_at(sx_.rank_of(xs[1]))};
    const Insert ex = place_ball(x_, xs);
    track(sx_.on_increment(ex.bin), 1, 0);
    const Insert ey = place_ball(y_, ys);
    track(sy_.on_increment(ey.bin), 1, 1);
    return {ex, ey};
  }
  if (x_.total_load() == 0) return {Noop{}, Noop{}};
  return delete_with(rng_.uniform01());
}

std::pair<StepEvent, StepEvent> CoupledPair::delete_with(double z) {
  if (x_.total_load() == 0) return {Noop{}, Noop{}};
  StepEvent ex = delete_one(x_, sx_, model_x_, z, 0);
  StepEvent ey = delete_one(y_, sy_, model_y_, z, 1);
  return {ex, ey};
}

StepEvent CoupledPair::delete_one(BinState& state, SortedView& view, DeletionModel model,
                                  double z, int which) {
  Load v = 0;
  if (model == DeletionModel::kBin) {
    v = view.load_at(scaled_index(z, state.nonempty_count()));
  } else {
    // Walk plateaus from the top: plateau v holds (#bins at v) * v balls.
    const auto m = static_cast<std::uint64_t>(state.total_load());
    auto ball = static_cast<Load>(scaled_index(z, m));
    for (v = state.max_load(); v > 0; --v) {
      const Load balls = (view.at_or_above(v) - view.at_or_above(v + 1)) * v;
      if (ball < balls) break;
      ball -= balls;
    }
  }
  const BinId bin = view.pick_in_plateau(v, rng_);
  state.remove_ball(bin);
  track(view.on_decrement(bin), -1, which);
  if (model == DeletionModel::kBin) return DeleteBin{bin};
  return DeleteBall{bin};
}

// Meeting-time experiment --------------------------------------------------

std::uint64_t default_coupling_max_steps(std::size_t n) {
  const double nn = static_cast<double>(n);
  const double ln = std::log(nn);
  return static_cast<std::uint64_t>(std::ceil(4.0 * nn * nn * nn * ln * ln * ln));
}

CouplingOutcome coupling_time_experiment(const BinState& x0, const BinState& y0,
                                         const Schedule& schedule, DeletionModel model,
                                         std::uint64_t seed,
                                         std::optional<std::uint64_t> max_steps,
                                         std::uint64_t trace_every) {
  require_comparable(x0.loads(), y0.loads());
  const std::uint64_t limit = max_steps.value_or(default_coupling_max_steps(x0.n()));
  CoupledPair pair(x0, y0, seed, model, model);
  CouplingOutcome out{TimedOut{limit}, pair.distance(), {}};
  if (trace_every > 0) out.trace.push_back({0, pair.distance()});
  if (pair.distance() == 0) {
    out.verdict = CoupledAt{0};
    return out;
  }
  for (std::uint64_t t = 1; t <= limit; ++t) {
    pair.step(schedule.beta(t));
    if (trace_every > 0 && t % trace_every == 0) out.trace.push_back({t, pair.distance()});
    if (pair.distance() == 0) {
      out.verdict = CoupledAt{t};
      return out;
    }
  }
  return out;
}

}  // namespace twochoice
