#include "twochoice/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "twochoice/errors.hpp"
#include "twochoice/potentials.hpp"
#include "twochoice/rng.hpp"
#include "twochoice/thresholds.hpp"

namespace twochoice {

using nlohmann::json;
using nlohmann::ordered_json;

// Config ---------------------------------------------------------------------

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (name.empty()) fail("name must not be empty");
  if (n < 2) fail("n must be at least 2");
  if (steps < 1) fail("steps must be at least 1");
  if (seeds_count < 1) fail("seeds must be at least 1");
  if (sample_every < 1) fail("sample_every must be at least 1");
  if (d < 1) fail("d must be at least 1");
  if (jobs < 1) fail("jobs must be at least 1");
  if (gamma < 0) fail("gamma must be non-negative");
  if (alpha && !(*alpha > 0.0)) fail("alpha must be positive");
  if (beta_hat && !(*beta_hat > 0.0 && *beta_hat < 1.0)) fail("beta_hat must lie in (0, 1)");
  if (thresholds_enabled && !beta_hat && !(schedule.beta_lo() > 0.0 && schedule.beta_lo() < 1.0)) {
    fail("thresholds need beta_hat in (0, 1); set beta_hat explicitly");
  }
  if (const auto len = schedule.length(); len && *len < steps) {
    fail("schedule defines " + std::to_string(*len) + " steps but steps = " +
         std::to_string(steps));
  }
  if (initial_loads && initial_balanced_load) {
    fail("initial_loads and initial_balanced_load are mutually exclusive");
  }
  if (initial_loads) {
    if (initial_loads->size() != n) fail("initial_loads must have n entries");
    for (const Load v : *initial_loads) {
      if (v < 0) fail("initial_loads must be non-negative");
    }
  }
  if (initial_balanced_load && *initial_balanced_load < 0) {
    fail("initial_balanced_load must be non-negative");
  }
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["n"] = n;
  j["steps"] = steps;
  j["seed"] = seed;
  j["seeds"] = seeds_count;
  j["schedule"] = schedule.to_json();
  j["deletion_model"] = std::string(to_string(deletion_model));
  j["d"] = d;
  j["alpha"] = alpha ? ordered_json(*alpha) : ordered_json(nullptr);
  j["gamma"] = gamma;
  j["sample_every"] = sample_every;
  j["thresholds"] = thresholds_enabled;
  j["beta_hat"] = beta_hat ? ordered_json(*beta_hat) : ordered_json(nullptr);
  j["initial_loads"] = initial_loads ? ordered_json(*initial_loads) : ordered_json(nullptr);
  j["initial_balanced_load"] =
      initial_balanced_load ? ordered_json(*initial_balanced_load) : ordered_json(nullptr);
  j["record_events"] = record_events;
  j["csv"] = write_csv;
  j["output_path"] = output_path ? ordered_json(*output_path) : ordered_json(nullptr);
  j["jobs"] = jobs;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "name",          "n",        "steps",         "seed",
      "seeds",         "schedule", "deletion_model", "d",
      "alpha",         "gamma",    "sample_every",  "thresholds",
      "beta_hat",      "initial_loads", "initial_balanced_load", "record_events",
      "csv",           "output_path",   "jobs"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) {
        field = j.at(key).get<typename std::remove_reference_t<decltype(field)>::value_type>();
      }
    };
    get("name", c.name);
    get("n", c.n);
    get("steps", c.steps);
    get("seed", c.seed);
    get("seeds", c.seeds_count);
    if (j.contains("schedule")) c.schedule = Schedule::from_json(j.at("schedule"));
    if (j.contains("deletion_model")) {
      c.deletion_model = parse_deletion_model(j.at("deletion_model").get<std::string>());
    }
    get("d", c.d);
    get_opt("alpha", c.alpha);
    get("gamma", c.gamma);
    get("sample_every", c.sample_every);
    get("thresholds", c.thresholds_enabled);
    get_opt("beta_hat", c.beta_hat);
    get_opt("initial_loads", c.initial_loads);
    get_opt("initial_balanced_load", c.initial_balanced_load);
    get("record_events", c.record_events);
    get("csv", c.write_csv);
    get_opt("output_path", c.output_path);
    get("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

BinState initial_state(const ExperimentConfig& config) {
  if (config.initial_loads) return BinState::from_loads(*config.initial_loads);
  if (config.initial_balanced_load) return BinState::balanced(config.n, *config.initial_balanced_load);
  return BinState(config.n);
}

// Aggregates -----------------------------------------------------------------

Aggregate aggregate(std::vector<double> values) {
  if (values.empty()) throw ConfigError("aggregate over no values");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  Aggregate a;
  double sum = 0.0;
  for (const double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  a.min = values.front();
  a.max = values.back();
  a.p50 = quantile(0.5);
  a.p90 = quantile(0.9);
  a.p95 = quantile(0.95);
  return a;
}

std::map<std::string, Aggregate> compute_aggregates(const std::vector<SeedSummary>& seeds) {
  std::map<std::string, Aggregate> out;
  if (seeds.empty()) return out;
  auto column = [&](auto pick) {
    std::vector<double> v;
    for (const auto& s : seeds) v.push_back(static_cast<double>(pick(s)));
    return v;
  };
  out["max_disc"] = aggregate(column([](const SeedSummary& s) { return s.max_disc; }));
  out["max_adisc"] = aggregate(column([](const SeedSummary& s) { return s.max_adisc; }));
  out["max_overload"] = aggregate(column([](const SeedSummary& s) { return s.max_overload; }));
  out["final_max_load"] = aggregate(column([](const SeedSummary& s) { return s.final_max_load; }));
  const bool all_gamma =
      std::all_of(seeds.begin(), seeds.end(), [](const SeedSummary& s) { return s.final_gamma.has_value(); });
  if (all_gamma) {
    out["final_gamma"] = aggregate(column([](const SeedSummary& s) { return *s.final_gamma; }));
  }
  const bool all_coupled =
      std::all_of(seeds.begin(), seeds.end(), [](const SeedSummary& s) { return s.coupling_time.has_value(); });
  if (all_coupled) {
    out["coupling_time"] = aggregate(column([](const SeedSummary& s) { return *s.coupling_time; }));
  }
  return out;
}

// Report JSON ----------------------------------------------------------------

namespace {

template <typename T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
std::optional<T> read_opt(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json summary_to_json(const SeedSummary& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["steps"] = s.steps;
  j["final_m"] = s.final_m;
  j["final_max_load"] = s.final_max_load;
  j["max_disc"] = s.max_disc;
  j["max_adisc"] = s.max_adisc;
  j["max_overload"] = s.max_overload;
  j["final_gamma"] = opt(s.final_gamma);
  j["level_invalid_counts"] = opt(s.level_invalid_counts);
  j["coupling_time"] = opt(s.coupling_time);
  return j;
}

SeedSummary summary_from_json(const ordered_json& j) {
  SeedSummary s;
  j.at("seed").get_to(s.seed);
  j.at("steps").get_to(s.steps);
  j.at("final_m").get_to(s.final_m);
  j.at("final_max_load").get_to(s.final_max_load);
  j.at("max_disc").get_to(s.max_disc);
  j.at("max_adisc").get_to(s.max_adisc);
  j.at("max_overload").get_to(s.max_overload);
  s.final_gamma = read_opt<double>(j, "final_gamma");
  s.level_invalid_counts = read_opt<std::vector<std::uint64_t>>(j, "level_invalid_counts");
  s.coupling_time = read_opt<std::uint64_t>(j, "coupling_time");
  return s;
}

}  // namespace

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["engine_version"] = engine_version;
  j["config"] = config;
  j["seeds"] = ordered_json::array();
  for (const auto& s : seeds) j["seeds"].push_back(summary_to_json(s));
  j["aggregates"] = ordered_json::object();
  for (const auto& [key, a] : aggregates) {
    j["aggregates"][key] = {{"mean", a.mean}, {"min", a.min}, {"max", a.max},
                            {"p50", a.p50},   {"p90", a.p90}, {"p95", a.p95}};
  }
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

RunReport RunReport::from_json(const ordered_json& j) {
  RunReport r;
  try {
    j.at("name").get_to(r.name);
    j.at("engine_version").get_to(r.engine_version);
    r.config = j.at("config");
    for (const auto& s : j.at("seeds")) r.seeds.push_back(summary_from_json(s));
    for (const auto& [key, a] : j.at("aggregates").items()) {
      r.aggregates[key] = Aggregate{a.at("mean").get<double>(), a.at("min").get<double>(),
                                    a.at("max").get<double>(), a.at("p50").get<double>(),
                                    a.at("p90").get<double>(), a.at("p95").get<double>()};
    }
    j.at("wall_clock_seconds").get_to(r.wall_clock_seconds);
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("bad report: ") + e.what());
  }
  return r;
}

// Samples --------------------------------------------------------------------

ordered_json sample_to_json(std::uint64_t seed, const MetricsSample& s) {
  ordered_json j;
  j["seed"] = seed;
  j["t"] = s.t;
  j["m"] = s.m;
  j["m_max"] = s.m_max;
  j["x_max"] = s.x_max;
  j["x_min"] = s.x_min;
  j["disc"] = s.disc;
  j["adisc"] = s.adisc;
  j["overload"] = s.overload;
  if (s.gamma_potential) j["gamma"] = *s.gamma_potential;
  if (s.level_statuses) {
    auto& levels = j["levels"] = ordered_json::array();
    for (const auto st : *s.level_statuses) levels.push_back(to_string(st));
  }
  return j;
}

void write_samples_jsonl(std::ostream& out, const std::vector<SeedRun>& runs) {
  for (const auto& run : runs) {
    for (const auto& s : run.samples) out << sample_to_json(run.summary.seed, s).dump() << '\n';
  }
}

void write_samples_csv(std::ostream& out, const std::vector<SeedRun>& runs) {
  out << "seed,t,m,m_max,x_max,x_min,disc,adisc,overload,gamma,levels\n";
  auto num = [](double v) { return ordered_json(v).dump(); };
  for (const auto& run : runs) {
    for (const auto& s : run.samples) {
      out << run.summary.seed << ',' << s.t << ',' << s.m << ',' << s.m_max << ',' << s.x_max
          << ',' << s.x_min << ',' << num(s.disc) << ',' << num(s.adisc) << ','
          << num(s.overload) << ',';
      if (s.gamma_potential) out << num(*s.gamma_potential);
      out << ',';
      if (s.level_statuses) {
        for (std::size_t l = 0; l < s.level_statuses->size(); ++l) {
          out << (l ? ";" : "") << to_string((*s.level_statuses)[l]);
        }
      }
      out << '\n';
    }
  }
}

// Orchestration --------------------------------------------------------------

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto threads = std::min<std::size_t>(jobs, count);
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

SeedRun run_one(const ExperimentConfig& config, std::uint64_t index,
                const std::optional<Thresholds>& th) {
  SeedRun run;
  SeedSummary& sum = run.summary;
  sum.seed = config.seed + index;
  sum.steps = config.steps;
  Rng rng(sum.seed);
  BinState state = initial_state(config);
  if (th) sum.level_invalid_counts = std::vector<std::uint64_t>(th->levels(), 0);

  auto record = [&](std::uint64_t t) {
    MetricsSample s = measure(state, t);
    if (config.alpha) s.gamma_potential = gamma_potential(state, *config.alpha);
    if (th) {
      s.level_statuses = classify_levels(state, base_height(state, config.gamma), *th);
      for (std::size_t l = 0; l < s.level_statuses->size(); ++l) {
        if ((*s.level_statuses)[l] == LevelStatus::kInvalid) ++(*sum.level_invalid_counts)[l];
      }
    }
    run.samples.push_back(std::move(s));
  };

  const MetricsSample first = measure(state, 0);
  sum.max_disc = first.disc;
  sum.max_adisc = first.adisc;
  sum.max_overload = first.overload;
  record(0);
  for (std::uint64_t t = 1; t <= config.steps; ++t) {
    StepEvent ev = step(state, config.schedule.beta(t), rng, config.deletion_model, config.d);
    if (config.record_events) run.events.push_back(ev);
    const MetricsSample now = measure(state, t);
    sum.max_disc = std::max(sum.max_disc, now.disc);
    sum.max_adisc = std::max(sum.max_adisc, now.adisc);
    sum.max_overload = std::max(sum.max_overload, now.overload);
    if (t % config.sample_every == 0) record(t);
  }
  sum.final_m = state.total_load();
  sum.final_max_load = state.max_load();
  if (config.alpha) sum.final_gamma = gamma_potential(state, *config.alpha);
  run.final_loads.assign(state.loads().begin(), state.loads().end());
  return run;
}

void write_outputs(const ExperimentConfig& config, const SimulationResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(*config.output_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* file) {
    std::ofstream f(dir / file, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / file).string());
    return f;
  };
  {
    auto f = open("samples.jsonl");
    write_samples_jsonl(f, result.runs);
  }
  {
    auto f = open("report.json");
    f << result.report.to_json().dump(2) << '\n';
  }
  if (config.write_csv) {
    auto f = open("samples.csv");
    write_samples_csv(f, result.runs);
  }
}

}  // namespace

SimulationResult run_simulation(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  std::optional<Thresholds> th;
  if (config.thresholds_enabled) {
    th = build_thresholds(config.n, config.beta_hat.value_or(config.schedule.beta_lo()),
                          config.gamma);
  }

  SimulationResult result;
  result.runs.resize(config.seeds_count);
  parallel_for(config.seeds_count, config.jobs,
               [&](std::size_t k) { result.runs[k] = run_one(config, k, th); });

  RunReport& report = result.report;
  report.name = config.name;
  report.config = config.to_json();
  for (const auto& run : result.runs) report.seeds.push_back(run.summary);
  report.aggregates = compute_aggregates(report.seeds);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (config.output_path) write_outputs(config, result);
  return result;
}

// Deletion burst -------------------------------------------------------------

std::uint64_t deletion_burst_length(std::size_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 1/2)");
  const double nn = static_cast<double>(n);
  return static_cast<std::uint64_t>(std::ceil(nn * std::log(nn) / (2.0 + 4.0 * epsilon)));
}

Schedule make_deletion_burst_schedule(std::size_t n, double beta_pre, std::uint64_t t_switch,
                                      double epsilon) {
  return Schedule(
      Schedule::DeletionBurst{beta_pre, t_switch, epsilon, deletion_burst_length(n, epsilon)});
}

LowerBoundResult lower_bound_experiment(std::size_t n, double epsilon, Load prefill_m,
                                        std::uint64_t seeds, std::uint64_t seed,
                                        double gamma_alpha, DeletionModel model, unsigned jobs) {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (prefill_m < static_cast<Load>(n)) throw ConfigError("prefill_m must be at least n");
  if (seeds < 1) throw ConfigError("seeds must be at least 1");
  const auto t_switch = static_cast<std::uint64_t>(prefill_m);
  const Schedule schedule = make_deletion_burst_schedule(n, 1.0, t_switch, epsilon);
  const std::uint64_t total = *schedule.length();
  const double half_log = std::log(static_cast<double>(n)) / 2.0;

  LowerBoundResult out;
  out.per_seed_counts.resize(seeds);
  out.per_seed_fraction.resize(seeds);
  out.per_seed_gamma_over_n.resize(seeds);
  out.per_seed_max_load.resize(seeds);
  out.per_seed_threshold.resize(seeds);
  parallel_for(seeds, jobs, [&](std::size_t k) {
    Rng rng(seed + k);
    BinState state(n);
    const auto nn = static_cast<Load>(n);
    for (std::uint64_t t = 1; t <= total; ++t) {
      step(state, schedule.beta(t), rng, model);
      if (t == t_switch) {
        out.per_seed_gamma_over_n[k] = gamma_potential(state, gamma_alpha) / static_cast<double>(n);
        const Load floor_avg = state.total_load() / nn;
        out.per_seed_fraction[k] =
            static_cast<double>(bins_at_or_above(state, floor_avg)) / static_cast<double>(n);
      }
    }
    const Load floor_avg = state.total_load() / nn;
    const auto threshold =
        static_cast<Load>(std::ceil(static_cast<double>(floor_avg) + half_log));
    out.per_seed_threshold[k] = threshold;
    out.per_seed_counts[k] = bins_at_or_above(state, threshold);
    out.per_seed_max_load[k] = state.max_load();
  });
  double cs = 0.0;
  double fs = 0.0;
  for (std::size_t k = 0; k < seeds; ++k) {
    cs += static_cast<double>(out.per_seed_counts[k]);
    fs += out.per_seed_fraction[k];
  }
  out.mean_count = cs / static_cast<double>(seeds);
  out.mean_fraction = fs / static_cast<double>(seeds);
  return out;
}

}  // namespace twochoice
