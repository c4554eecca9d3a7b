#include "twochoice/process.hpp"

#include <array>
#include <string>

#include "twochoice/errors.hpp"

namespace twochoice {

std::string_view to_string(DeletionModel model) noexcept {
  return model == DeletionModel::kBin ? "bin" : "ball";
}

DeletionModel parse_deletion_model(std::string_view text) {
  if (text == "bin") return DeletionModel::kBin;
  if (text == "ball") return DeletionModel::kBall;
  throw ConfigError("deletion model must be 'bin' or 'ball', got '" + std::string(text) + "'");
}

int load_delta(const StepEvent& event) noexcept {
  if (std::holds_alternative<Insert>(event)) return 1;
  if (std::holds_alternative<Noop>(event)) return 0;
  return -1;
}

Insert place_ball(BinState& state, std::span<const BinId> choices) {
  BinId best = choices.front();
  for (BinId c : choices.subspan(1)) {
    if (state.load(c) < state.load(best)) best = c;
  }
  state.add_ball(best);
  const BinId second = choices.size() > 1 ? choices[1] : choices[0];
  return Insert{best, choices[0], second};
}

Insert greedy_insert(BinState& state, Rng& rng, unsigned d) {
  if (d == 0) throw ConfigError("Greedy{d} needs d >= 1");
  const std::uint64_t n = state.n();
  if (d <= 8) {
    std::array<BinId, 8> buf{};
    for (unsigned k = 0; k < d; ++k) buf[k] = static_cast<BinId>(rng.uniform(n));
    return place_ball(state, std::span<const BinId>(buf.data(), d));
  }
  std::vector<BinId> choices(d);
  for (auto& c : choices) c = static_cast<BinId>(rng.uniform(n));
  return place_ball(state, choices);
}

StepEvent delete_random_bin(BinState& state, Rng& rng) {
  if (state.total_load() == 0) return Noop{};
  const BinId bin = state.sample_nonempty(rng);
  state.remove_ball(bin);
  return DeleteBin{bin};
}

StepEvent delete_random_ball(BinState& state, Rng& rng) {
  if (state.total_load() == 0) return Noop{};
  const BinId bin = state.sample_by_load(rng);
  state.remove_ball(bin);
  return DeleteBall{bin};
}

StepEvent step(BinState& state, double beta_t, Rng& rng, DeletionModel model, unsigned d) {
  if (rng.uniform01() < beta_t) return greedy_insert(state, rng, d);
  return model == DeletionModel::kBin ? delete_random_bin(state, rng)
                                      : delete_random_ball(state, rng);
}

std::vector<double> rank_insertion_probs(std::size_t n) {
  std::vector<double> p(n);
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    // i^2 - (i-1)^2 = 2i - 1, exact in integers.
    p[i - 1] = static_cast<double>(2 * i - 1) / nn;
  }
  return p;
}

}  // namespace twochoice
