#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "twochoice/errors.hpp"
#include "twochoice/experiment.hpp"
#include "twochoice/suites.hpp"

using namespace twochoice;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "unit";
  c.n = 16;
  c.steps = 3000;
  c.seed = 100;
  c.seeds_count = 4;
  c.schedule = Schedule::constant(0.55);
  c.sample_every = 50;
  c.alpha = 0.05;
  return c;
}

std::string jsonl(const SimulationResult& r) {
  std::ostringstream out;
  write_samples_jsonl(out, r.runs);
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RunSimulation, PureInsertion) {
  ExperimentConfig c;
  c.n = 4;
  c.steps = 4;
  c.seed = 7;
  c.schedule = Schedule::constant(1.0);
  c.record_events = true;
  const auto r = run_simulation(c);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].summary.final_m, 4);
  ASSERT_EQ(r.runs[0].events.size(), 4u);
  for (const auto& e : r.runs[0].events) EXPECT_TRUE(std::holds_alternative<Insert>(e));
}

TEST(RunSimulation, PureDeletionFromEmpty) {
  ExperimentConfig c;
  c.n = 4;
  c.steps = 25;
  c.schedule = Schedule::constant(0.0);
  c.record_events = true;
  const auto r = run_simulation(c);
  for (const auto& e : r.runs[0].events) EXPECT_TRUE(std::holds_alternative<Noop>(e));
  for (const auto& s : r.runs[0].samples) {
    EXPECT_EQ(s.m, 0);
    EXPECT_EQ(s.x_max, 0);
    EXPECT_DOUBLE_EQ(s.adisc, 0.0);
  }
  EXPECT_EQ(r.runs[0].samples.size(), 26u);  // t = 0 .. 25
}

TEST(RunSimulation, SamplesStartAtZeroAndFollowCadence) {
  const auto r = run_simulation(small_config());
  const auto& samples = r.runs[0].samples;
  ASSERT_EQ(samples.size(), 3000u / 50 + 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(samples[i].t, i * 50);
    EXPECT_TRUE(samples[i].gamma_potential.has_value());
  }
  for (std::size_t k = 0; k < r.runs.size(); ++k) EXPECT_EQ(r.report.seeds[k].seed, 100 + k);
}

TEST(RunSimulation, SummaryMaximaCoverSampledValues) {
  const auto r = run_simulation(small_config());
  for (const auto& run : r.runs) {
    for (const auto& s : run.samples) {
      EXPECT_LE(s.disc, run.summary.max_disc);
      EXPECT_LE(s.adisc, run.summary.max_adisc);
      EXPECT_LE(s.overload, run.summary.max_overload);
    }
    EXPECT_EQ(run.summary.final_m, run.samples.back().m);
  }
}

TEST(RunSimulation, Deterministic) {
  const auto a = run_simulation(small_config());
  const auto b = run_simulation(small_config());
  EXPECT_EQ(jsonl(a), jsonl(b));
  auto c = small_config();
  c.seed = 101;
  EXPECT_NE(jsonl(run_simulation(c)), jsonl(a));
}

TEST(RunSimulation, ReplicasIndependentOfParallelism) {
  auto c = small_config();
  const auto serial = run_simulation(c);
  c.jobs = 3;
  const auto parallel = run_simulation(c);
  EXPECT_EQ(jsonl(serial), jsonl(parallel));
  EXPECT_EQ(serial.report.seeds, parallel.report.seeds);
  EXPECT_EQ(serial.report.aggregates, parallel.report.aggregates);

  // a single replica matches the same seed run inside a batch
  auto one = small_config();
  one.seed = 102;
  one.seeds_count = 1;
  EXPECT_EQ(run_simulation(one).report.seeds[0], serial.report.seeds[2]);
}

TEST(RunSimulation, ThresholdLevelsAreRecorded) {
  auto c = small_config();
  c.n = 1 << 20;
  c.steps = 200;
  c.seeds_count = 1;
  c.sample_every = 100;
  c.thresholds_enabled = true;
  c.alpha.reset();
  const auto r = run_simulation(c);
  ASSERT_TRUE(r.runs[0].samples[0].level_statuses.has_value());
  ASSERT_TRUE(r.report.seeds[0].level_invalid_counts.has_value());
}

TEST(RunReport, JsonRoundTrip) {
  const auto r = run_simulation(small_config()).report;
  const auto text = r.to_json().dump();
  const auto back = RunReport::from_json(nlohmann::ordered_json::parse(text));
  EXPECT_EQ(back, r);
  EXPECT_EQ(back.to_json().dump(), text);
  EXPECT_EQ(r.engine_version, kEngineVersion);
}

TEST(RunReport, AggregatesAreRecomputable) {
  const auto r = run_simulation(small_config()).report;
  EXPECT_EQ(compute_aggregates(r.seeds), r.aggregates);
  EXPECT_TRUE(r.aggregates.contains("final_gamma"));
}

TEST(Aggregate, Quantiles) {
  const auto a = aggregate({5, 1, 3, 2, 4});
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_DOUBLE_EQ(a.min, 1.0);
  EXPECT_DOUBLE_EQ(a.max, 5.0);
  EXPECT_DOUBLE_EQ(a.p50, 3.0);
  EXPECT_DOUBLE_EQ(a.p90, 4.6);
  EXPECT_DOUBLE_EQ(a.p95, 4.8);
  EXPECT_THROW(aggregate({}), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  auto c = small_config();
  c.initial_loads = std::vector<Load>(16, 3);
  c.deletion_model = DeletionModel::kBall;
  c.beta_hat = 0.6;
  const auto back = ExperimentConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.seeds_count, 4u);
  EXPECT_EQ(back.deletion_model, DeletionModel::kBall);
}

TEST(Config, MissingFieldsKeepDefaults) {
  const auto c = ExperimentConfig::from_json(nlohmann::json{{"n", 8}, {"steps", 10}});
  EXPECT_EQ(c.d, 2u);
  EXPECT_EQ(c.gamma, 1);
  EXPECT_EQ(c.sample_every, 1u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ValidationErrors) {
  auto bad = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](ExperimentConfig& c) { c.n = 1; });
  bad([](ExperimentConfig& c) { c.steps = 0; });
  bad([](ExperimentConfig& c) { c.sample_every = 0; });
  bad([](ExperimentConfig& c) { c.seeds_count = 0; });
  bad([](ExperimentConfig& c) { c.jobs = 0; });
  bad([](ExperimentConfig& c) { c.alpha = -0.1; });
  bad([](ExperimentConfig& c) { c.initial_loads = std::vector<Load>(3, 1); });
  bad([](ExperimentConfig& c) { c.schedule = Schedule(Schedule::Explicit{{0.5, 0.5}}); });
  bad([](ExperimentConfig& c) {
    c.initial_loads = std::vector<Load>(16, 1);
    c.initial_balanced_load = 20;
  });
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json{{"nn", 8}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json{{"n", "eight"}}), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::array()), ConfigError);
}

TEST(InitialState, FromConfig) {
  auto c = small_config();
  c.initial_balanced_load = 35;
  EXPECT_EQ(initial_state(c).total_load(), 35);
  c.initial_balanced_load.reset();
  EXPECT_EQ(initial_state(c).total_load(), 0);
}

TEST(Output, FilesWritten) {
  const fs::path dir = fs::temp_directory_path() / "twochoice_unit_output";
  fs::remove_all(dir);
  auto c = small_config();
  c.output_path = dir.string();
  c.write_csv = true;
  const auto r = run_simulation(c);
  ASSERT_TRUE(fs::exists(dir / "samples.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "samples.csv"));
  EXPECT_EQ(slurp(dir / "samples.jsonl"), jsonl(r));
  const auto report =
      RunReport::from_json(nlohmann::ordered_json::parse(slurp(dir / "report.json")));
  EXPECT_EQ(report.seeds, r.report.seeds);

  std::istringstream lines(slurp(dir / "samples.jsonl"));
  std::string first;
  std::getline(lines, first);
  EXPECT_EQ(first.rfind("{\"seed\":100,\"t\":0,", 0), 0u) << first;
  fs::remove_all(dir);
}

TEST(DeletionBurst, LengthAndBeta) {
  EXPECT_EQ(deletion_burst_length(100, 0.1), 192u);
  EXPECT_EQ(deletion_burst_length(100, 0.1),
            static_cast<std::uint64_t>(std::ceil(100 * std::log(100.0) / 2.4)));
  EXPECT_EQ(deletion_burst_length(1000, 0.4999999),
            static_cast<std::uint64_t>(std::ceil(1000 * std::log(1000.0) / 4.0)));
  const auto s = make_deletion_burst_schedule(100, 1.0, 50, 0.1);
  EXPECT_DOUBLE_EQ(s.beta(50), 1.0);
  EXPECT_DOUBLE_EQ(s.beta(51), 0.4);
  EXPECT_DOUBLE_EQ(s.beta(50 + 192), 0.4);
  EXPECT_EQ(s.length(), 50u + 192u);
  EXPECT_THROW(s.beta(50 + 193), ScheduleTooShort);
  EXPECT_NEAR(make_deletion_burst_schedule(100, 1.0, 0, 0.49).beta(1), 0.01, 1e-12);
  EXPECT_THROW(make_deletion_burst_schedule(100, 1.0, 10, 0.5), ConfigError);
  EXPECT_THROW(make_deletion_burst_schedule(100, 1.0, 10, 0.0), ConfigError);
}

TEST(LowerBound, CountsAreBounded) {
  const std::size_t n = 64;
  const auto prefill = static_cast<Load>(n * std::ceil(std::log(64.0)));
  const auto r = lower_bound_experiment(n, 0.1, prefill, 3, 9);
  ASSERT_EQ(r.per_seed_counts.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_GE(r.per_seed_counts[k], 0);
    EXPECT_LE(r.per_seed_counts[k], static_cast<std::int64_t>(n));
    EXPECT_GE(r.per_seed_fraction[k], 0.0);
    EXPECT_LE(r.per_seed_fraction[k], 1.0);
    EXPECT_GE(r.per_seed_gamma_over_n[k], 2.0);
  }
  EXPECT_EQ(lower_bound_experiment(n, 0.1, prefill, 3, 9, 1.0 / 16, DeletionModel::kBin, 2)
                .per_seed_counts,
            r.per_seed_counts);
  EXPECT_THROW(lower_bound_experiment(n, 0.6, prefill, 1, 0), ConfigError);
}

TEST(ParallelFor, RunsEveryIndexAndRethrows) {
  std::vector<int> hit(50, 0);
  parallel_for(hit.size(), 4, [&](std::size_t k) { hit[k] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t k) {
                              if (k == 6) throw ConfigError("boom");
                            }),
               ConfigError);
}

TEST(Suites, RegistryAndUnknownName) {
  const auto& reg = suite_registry();
  ASSERT_EQ(reg.size(), 13u);
  EXPECT_EQ(reg.front().name, "ball-potential-identity");
  EXPECT_EQ(reg.back().name, "determinism");
  for (const auto& s : reg) EXPECT_FALSE(s.claim.empty());
  EXPECT_THROW(run_suite("no-such-suite"), UnknownSuite);
}

TEST(Suites, QuickSuiteReportSerializes) {
  const auto r = run_suite("ball-potential-identity");
  EXPECT_TRUE(r.passed);
  const auto j = r.to_json();
  EXPECT_EQ(j.at("name"), "ball-potential-identity");
  EXPECT_TRUE(j.at("passed").get<bool>());
}
