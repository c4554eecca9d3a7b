#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "twochoice/bin_state.hpp"
#include "twochoice/rng.hpp"

namespace twochoice {

enum class DeletionModel {
  kBin,   // uniform over non-empty bins
  kBall,  // uniform over balls, i.e. bin i with probability x_i / m
};

std::string_view to_string(DeletionModel model) noexcept;
// Accepts "bin" and "ball"; throws ConfigError otherwise.
DeletionModel parse_deletion_model(std::string_view text);

// For d = 1 both choices are the single sample; for d > 2 they are the first
// two samples.
struct Insert {
  BinId bin;
  BinId choice_a;
  BinId choice_b;
  friend bool operator==(const Insert&, const Insert&) = default;
};
struct DeleteBin {
  BinId bin;
  friend bool operator==(const DeleteBin&, const DeleteBin&) = default;
};
struct DeleteBall {
  BinId bin;
  friend bool operator==(const DeleteBall&, const DeleteBall&) = default;
};
enum class NoopReason { kEmptySystem };
struct Noop {
  NoopReason reason = NoopReason::kEmptySystem;
  friend bool operator==(const Noop&, const Noop&) = default;
};

using StepEvent = std::variant<Insert, DeleteBin, DeleteBall, Noop>;

// Signed change of total load caused by an event: +1, -1 or 0.
int load_delta(const StepEvent& event) noexcept;

// Places a ball into the first minimum-load bin among `choices` (non-empty).
// Deterministic core of greedy_insert.
Insert place_ball(BinState& state, std::span<const BinId> choices);

// Greedy{d}: d independent uniform bins (with replacement), ball into the
// least loaded, ties to the first-sampled minimum. Consumes d draws.
Insert greedy_insert(BinState& state, Rng& rng, unsigned d = 2);

// Deletes from a uniformly chosen non-empty bin; Noop on an empty system.
StepEvent delete_random_bin(BinState& state, Rng& rng);

// Deletes a uniformly chosen ball; Noop on an empty system.
StepEvent delete_random_ball(BinState& state, Rng& rng);

// One step of the process: with probability beta_t an insertion, otherwise a
// deletion under `model`. Consumes one coin draw, then the draws of the
// chosen sub-operation.
StepEvent step(BinState& state, double beta_t, Rng& rng,
               DeletionModel model = DeletionModel::kBin, unsigned d = 2);

// Probability that Greedy-2 places the ball into sorted rank i (1-based,
// ranks sorted by non-increasing load, ties to the larger rank):
// p_i = (i/n)^2 - ((i-1)/n)^2. Returned 0-based.
std::vector<double> rank_insertion_probs(std::size_t n);

}  // namespace twochoice
