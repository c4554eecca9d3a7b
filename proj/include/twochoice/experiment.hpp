#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twochoice/bin_state.hpp"
#include "twochoice/metrics.hpp"
#include "twochoice/process.hpp"
#include "twochoice/schedule.hpp"

namespace twochoice {

inline constexpr const char* kEngineVersion = "1.0.0";

struct ExperimentConfig {
  std::string name = "run";
  std::size_t n = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;         // run k uses seed + k
  std::uint64_t seeds_count = 1;
  Schedule schedule = Schedule::constant(0.5);
  DeletionModel deletion_model = DeletionModel::kBin;
  unsigned d = 2;
  std::optional<double> alpha;    // enables Gamma in samples
  Load gamma = 1;                 // base-height offset for levels
  std::uint64_t sample_every = 1;
  bool thresholds_enabled = false;
  std::optional<double> beta_hat;  // defaults to schedule.beta_lo()
  // Start state: explicit loads, or balanced with this many balls; empty
  // when neither is given.
  std::optional<std::vector<Load>> initial_loads;
  std::optional<Load> initial_balanced_load;
  bool record_events = false;
  bool write_csv = false;
  std::optional<std::string> output_path;  // directory
  unsigned jobs = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  // Missing fields keep their defaults; unknown fields are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.to_json() == b.to_json();
  }
};

// Initial state described by the config.
BinState initial_state(const ExperimentConfig& config);

struct SeedSummary {
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  Load final_m = 0;
  Load final_max_load = 0;
  // maxima over every step, not just sampled ones
  double max_disc = 0.0;
  double max_adisc = 0.0;
  double max_overload = 0.0;
  std::optional<double> final_gamma;
  // per level: number of samples in which the level was invalid
  std::optional<std::vector<std::uint64_t>> level_invalid_counts;
  std::optional<std::uint64_t> coupling_time;

  friend bool operator==(const SeedSummary&, const SeedSummary&) = default;
};

struct Aggregate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

// Linear-interpolated quantiles over the values; throws ConfigError if empty.
Aggregate aggregate(std::vector<double> values);

struct RunReport {
  std::string name;
  std::string engine_version = kEngineVersion;
  nlohmann::ordered_json config;
  std::vector<SeedSummary> seeds;
  std::map<std::string, Aggregate> aggregates;
  double wall_clock_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
  // Takes ordered_json so the config echo keeps its key order.
  static RunReport from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Recomputes the aggregate table from per-seed rows.
std::map<std::string, Aggregate> compute_aggregates(const std::vector<SeedSummary>& seeds);

struct SeedRun {
  SeedSummary summary;
  std::vector<MetricsSample> samples;  // t = 0, sample_every, 2 sample_every, ...
  std::vector<StepEvent> events;       // only when record_events
  std::vector<Load> final_loads;
};

struct SimulationResult {
  RunReport report;
  std::vector<SeedRun> runs;  // in seed order
};

// Runs config.seeds_count independent replicas, up to config.jobs at a time,
// and merges them in seed order. When output_path is set, writes
// samples.jsonl, report.json and (with write_csv) samples.csv there.
SimulationResult run_simulation(const ExperimentConfig& config);

// One JSON object per line, keys in fixed order, "seed" first.
void write_samples_jsonl(std::ostream& out, const std::vector<SeedRun>& runs);
void write_samples_csv(std::ostream& out, const std::vector<SeedRun>& runs);
nlohmann::ordered_json sample_to_json(std::uint64_t seed, const MetricsSample& sample);

// Calls fn(k) for k in [0, count) on up to `jobs` threads. Exceptions are
// rethrown on the caller's thread (the lowest k wins).
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

// beta_pre for t <= t_switch, then 1/2 - epsilon for ceil(n ln n / (2 + 4 epsilon))
// steps. Requires 0 < epsilon < 1/2.
Schedule make_deletion_burst_schedule(std::size_t n, double beta_pre, std::uint64_t t_switch,
                                      double epsilon);

std::uint64_t deletion_burst_length(std::size_t n, double epsilon);

struct LowerBoundResult {
  std::vector<std::int64_t> per_seed_counts;     // bins at >= floor(m/n) + ln(n)/2 at the end
  std::vector<double> per_seed_fraction;         // share of bins at >= floor(m/n) at burst start
  std::vector<double> per_seed_gamma_over_n;     // Gamma / n after the prefill
  std::vector<Load> per_seed_max_load;
  std::vector<Load> per_seed_threshold;
  double mean_count = 0.0;
  double mean_fraction = 0.0;
};

// Per seed: prefill with beta = 1 for prefill_m steps from empty, record
// Gamma / n, run the deletion burst at beta = 1/2 - epsilon, then count bins
// with load >= floor(m(T)/n) + ln(n)/2. Seed k uses Rng(seed + k).
LowerBoundResult lower_bound_experiment(std::size_t n, double epsilon, Load prefill_m,
                                        std::uint64_t seeds, std::uint64_t seed,
                                        double gamma_alpha = 1.0 / 16.0,
                                        DeletionModel model = DeletionModel::kBin,
                                        unsigned jobs = 1);

}  // namespace twochoice
