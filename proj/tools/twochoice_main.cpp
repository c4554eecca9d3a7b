// twochoice: command-line driver for the simulator and its check suites.
//
// Exit codes: 0 ok / pass, 1 a check or suite failed, 2 bad config or usage.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "twochoice/cgood.hpp"
#include "twochoice/coupling.hpp"
#include "twochoice/errors.hpp"
#include "twochoice/experiment.hpp"
#include "twochoice/schedule.hpp"
#include "twochoice/suites.hpp"
#include "twochoice/thresholds.hpp"
#include "twochoice/walks.hpp"

namespace tc = twochoice;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tc::ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw tc::ConfigError(path + ": " + e.what());
  }
}

// --beta v or --schedule file; neither gives `fallback`.
tc::Schedule pick_schedule(const std::optional<double>& beta, const std::string& file,
                           const tc::Schedule& fallback) {
  if (beta) return tc::Schedule::constant(*beta);
  if (!file.empty()) return tc::Schedule::from_json(read_json_file(file));
  return fallback;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

struct SimulateArgs {
  std::string config;
  std::optional<std::string> name;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> steps, seed, seeds, sample_every;
  std::optional<double> beta, alpha, beta_hat;
  std::string schedule;
  std::optional<std::string> delete_model;
  std::optional<unsigned> d, jobs;
  std::optional<tc::Load> gamma;
  std::optional<std::string> out;
  bool thresholds = false;
  bool csv = false;
};

int run_simulate(const SimulateArgs& a) {
  tc::ExperimentConfig c;
  if (!a.config.empty()) c = tc::ExperimentConfig::from_json(read_json_file(a.config));
  if (a.name) c.name = *a.name;
  if (a.n) c.n = *a.n;
  if (a.steps) c.steps = *a.steps;
  if (a.seed) {
    c.seed = *a.seed;
    c.seeds_count = 1;
  }
  if (a.seeds) c.seeds_count = *a.seeds;
  c.schedule = pick_schedule(a.beta, a.schedule, c.schedule);
  if (a.delete_model) c.deletion_model = tc::parse_deletion_model(*a.delete_model);
  if (a.d) c.d = *a.d;
  if (a.alpha) c.alpha = *a.alpha;
  if (a.gamma) c.gamma = *a.gamma;
  if (a.sample_every) c.sample_every = *a.sample_every;
  if (a.jobs) c.jobs = *a.jobs;
  if (a.out) c.output_path = *a.out;
  if (a.beta_hat) c.beta_hat = *a.beta_hat;
  if (a.thresholds) c.thresholds_enabled = true;
  if (a.csv) c.write_csv = true;

  const auto result = tc::run_simulation(c);
  if (c.output_path) {
    std::cerr << "wrote samples.jsonl and report.json to " << *c.output_path << '\n';
  } else {
    tc::write_samples_jsonl(std::cout, result.runs);
  }
  std::cerr << result.report.to_json()["aggregates"].dump(2) << '\n';
  return kOk;
}

struct CoupleArgs {
  std::size_t n = 8;
  std::uint64_t steps = 100000;
  std::uint64_t seed = 0;
  std::optional<double> beta;
  std::string schedule;
  std::string mode = "majorization";
  std::string delete_model = "bin";
  std::optional<tc::Load> m;
  std::uint64_t trace_every = 0;
  std::optional<std::string> out;
};

int run_couple(const CoupleArgs& a) {
  if (a.n < 2) throw tc::ConfigError("n must be at least 2");
  const tc::Schedule schedule = pick_schedule(a.beta, a.schedule, tc::Schedule::constant(0.5));
  ordered_json j;
  j["mode"] = a.mode;
  j["n"] = a.n;
  j["seed"] = a.seed;
  j["schedule"] = schedule.to_json();
  bool ok = true;
  if (a.mode == "majorization") {
    tc::CoupledPair pair{tc::BinState(a.n), tc::BinState(a.n), a.seed};
    std::uint64_t violations = 0;
    std::optional<std::uint64_t> first;
    for (std::uint64_t t = 1; t <= a.steps; ++t) {
      pair.step(schedule.beta(t));
      if (!pair.x_majorizes_y()) {
        ++violations;
        if (!first) first = t;
      }
    }
    j["steps"] = a.steps;
    j["violations"] = violations;
    j["first_violation"] = first ? ordered_json(*first) : ordered_json(nullptr);
    j["final_x"] = pair.sorted_x().sorted_loads();
    j["final_y"] = pair.sorted_y().sorted_loads();
    ok = violations == 0;
  } else if (a.mode == "meeting") {
    const tc::Load m = a.m.value_or(static_cast<tc::Load>(4 * a.n));
    if (m < 1) throw tc::ConfigError("--m must be at least 1");
    const tc::BinState x0 = tc::BinState::balanced(a.n, m);
    std::vector<tc::Load> y(x0.loads().begin(), x0.loads().end());
    --y[0];
    ++y[1];
    const auto outcome = tc::coupling_time_experiment(
        x0, tc::BinState::from_loads(y), schedule, tc::parse_deletion_model(a.delete_model), a.seed,
        a.steps, a.trace_every);
    j["initial_delta"] = outcome.initial_delta;
    if (const auto* at = std::get_if<tc::CoupledAt>(&outcome.verdict)) {
      j["coupled_at"] = at->t;
    } else {
      j["timed_out"] = std::get<tc::TimedOut>(outcome.verdict).max_steps;
      ok = false;
    }
    auto& trace = j["trace"] = ordered_json::array();
    for (const auto& p : outcome.trace) trace.push_back({p.t, p.delta});
  } else {
    throw tc::ConfigError("--mode must be majorization or meeting");
  }
  if (a.out) {
    std::ofstream f(*a.out);
    if (!f) throw tc::ConfigError("cannot write " + *a.out);
    f << j.dump(2) << '\n';
  } else {
    emit(j);
  }
  return ok ? kOk : kFailed;
}

int run_thresholds(std::size_t n, double beta_hat, tc::Load gamma) {
  const auto th = tc::build_thresholds(n, beta_hat, gamma);
  std::cout << "n = " << n << ", beta_hat = " << beta_hat << ", gamma = " << gamma
            << ", ell* = " << th.ell_star << ", stop threshold = " << th.stop_threshold() << '\n';
  std::cout << std::setw(6) << "level" << std::setw(18) << "alpha" << "  sandwich\n";
  for (std::size_t l = 0; l < th.levels(); ++l) {
    const bool bad = std::find(th.sandwich_failures.begin(), th.sandwich_failures.end(), l) !=
                     th.sandwich_failures.end();
    std::cout << std::setw(6) << l << std::setw(18) << std::setprecision(10) << th.alphas[l]
              << "  " << (l == 0 ? "-" : bad ? "FAIL" : "ok") << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy-2 balls-into-bins with deletions: simulation and checks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run replicas and write samples + report");
  simulate->add_option("--config", sim.config, "experiment config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--name", sim.name);
  simulate->add_option("--n", sim.n, "number of bins");
  simulate->add_option("--steps", sim.steps);
  auto* seed_opt = simulate->add_option("--seed", sim.seed, "single replica with this seed");
  simulate->add_option("--seeds", sim.seeds, "number of replicas (seeds seed, seed+1, ...)")
      ->excludes(seed_opt);
  auto* beta_opt = simulate->add_option("--beta", sim.beta, "constant insertion probability");
  simulate->add_option("--schedule", sim.schedule, "schedule JSON file")
      ->check(CLI::ExistingFile)
      ->excludes(beta_opt);
  simulate->add_option("--delete-model", sim.delete_model)->check(CLI::IsMember({"bin", "ball"}));
  simulate->add_option("--d", sim.d, "choices per insertion");
  simulate->add_option("--alpha", sim.alpha, "record Gamma with this alpha");
  simulate->add_option("--gamma", sim.gamma, "base-height offset");
  simulate->add_option("--sample-every", sim.sample_every);
  simulate->add_option("--jobs", sim.jobs);
  simulate->add_option("--out", sim.out, "output directory");
  simulate->add_option("--beta-hat", sim.beta_hat, "beta for the level thresholds");
  simulate->add_flag("--thresholds", sim.thresholds, "classify levels in every sample");
  simulate->add_flag("--csv", sim.csv, "also write samples.csv");

  CoupleArgs cp;
  auto* couple = app.add_subcommand("couple", "coupled pair: majorization or meeting time");
  couple->add_option("--n", cp.n);
  couple->add_option("--steps", cp.steps, "steps (majorization) or step limit (meeting)");
  couple->add_option("--seed", cp.seed);
  auto* cbeta = couple->add_option("--beta", cp.beta);
  couple->add_option("--schedule", cp.schedule)->check(CLI::ExistingFile)->excludes(cbeta);
  couple->add_option("--mode", cp.mode)->check(CLI::IsMember({"majorization", "meeting"}));
  couple->add_option("--delete-model", cp.delete_model, "deletion model in meeting mode")
      ->check(CLI::IsMember({"bin", "ball"}));
  couple->add_option("--m", cp.m, "total load in meeting mode (default 4n)");
  couple->add_option("--trace-every", cp.trace_every, "record distance every k steps");
  couple->add_option("--out", cp.out, "write the JSON result here");

  std::size_t th_n = 0;
  double th_beta = 0.5;
  tc::Load th_gamma = 1;
  auto* thresholds = app.add_subcommand("thresholds", "print the level threshold table");
  thresholds->add_option("--n", th_n)->required();
  thresholds->add_option("--beta-hat", th_beta)->required();
  thresholds->add_option("--gamma", th_gamma);

  auto* walk = app.add_subcommand("walk", "random-walk experiments");
  walk->require_subcommand(1);
  double wr = 2.0;
  std::int64_t wa = 1, wb = 1;
  std::uint64_t wtrials = 100000, wseed = 0;
  auto* cross = walk->add_subcommand("cross", "biased walk crossing probability");
  cross->add_option("--r", wr)->required();
  cross->add_option("--a", wa)->required();
  cross->add_option("--b", wb)->required();
  cross->add_option("--trials", wtrials);
  cross->add_option("--seed", wseed);
  std::uint64_t wd = 1;
  double wlazy = 0.0;
  auto* hit = walk->add_subcommand("hit", "lazy reflecting walk hitting time");
  hit->add_option("--D", wd)->required();
  hit->add_option("--lazy-alpha", wlazy);
  hit->add_option("--trials", wtrials);
  hit->add_option("--seed", wseed);

  std::string cg_schedule;
  std::uint64_t cg_c = 1, cg_n = 1, cg_t1 = 0;
  std::optional<std::uint64_t> cg_t2;
  double cg_eps = 0.0;
  auto* cgood = app.add_subcommand("check-cgood", "check a schedule interval for c-goodness");
  cgood->add_option("--schedule", cg_schedule)->required()->check(CLI::ExistingFile);
  cgood->add_option("--c", cg_c)->required();
  cgood->add_option("--epsilon", cg_eps)->required();
  cgood->add_option("--n", cg_n)->required();
  cgood->add_option("--t1", cg_t1, "interval start (exclusive)");
  cgood->add_option("--t2", cg_t2, "interval end (default: schedule length)");

  std::string suite_name;
  tc::SuiteOptions so;
  std::optional<std::uint64_t> suite_seed;
  auto* suite = app.add_subcommand("suite", "run a named check suite ('list' to enumerate)");
  suite->add_option("name", suite_name)->required();
  suite->add_option("--jobs", so.jobs);
  suite->add_option("--out", so.out, "directory for suite-<name>.json");
  suite->add_option("--seeds", so.seeds, "override the replica count");
  suite->add_option("--seed", suite_seed, "override the base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*couple) return run_couple(cp);
    if (*thresholds) return run_thresholds(th_n, th_beta, th_gamma);
    if (*cross) {
      tc::Rng rng(wseed);
      ordered_json j{{"r", wr}, {"a", wa}, {"b", wb}, {"trials", wtrials}};
      j["empirical"] = tc::simulate_biased_walk_crossing(wr, wa, wb, wtrials, rng);
      j["formula"] = tc::biased_rw_cross_prob(wr, wa, wb);
      emit(j);
      return kOk;
    }
    if (*hit) {
      tc::Rng rng(wseed);
      if (wtrials < 1) throw tc::ConfigError("--trials must be at least 1");
      double sum = 0.0;
      for (std::uint64_t k = 0; k < wtrials; ++k) {
        sum += static_cast<double>(tc::reflecting_lazy_walk_hit_time(wd, wlazy, rng));
      }
      emit({{"D", wd}, {"lazy_alpha", wlazy}, {"trials", wtrials},
            {"mean", sum / static_cast<double>(wtrials)},
            {"expected", tc::expected_hit_time(wd, wlazy)}});
      return kOk;
    }
    if (*cgood) {
      const auto schedule = tc::Schedule::from_json(read_json_file(cg_schedule));
      const auto len = schedule.length();
      if (!cg_t2 && !len) throw tc::ConfigError("--t2 is required for an infinite schedule");
      const std::uint64_t t2 = cg_t2.value_or(len.value_or(0));
      const auto verdict = tc::check_c_good(schedule, cg_t1, t2, cg_c, cg_eps, cg_n);
      if (std::holds_alternative<tc::CGood>(verdict)) {
        emit({{"c_good", true}, {"t1", cg_t1}, {"t2", t2}});
        return kOk;
      }
      const auto& v = std::get<tc::CGoodViolation>(verdict);
      emit({{"c_good", false}, {"window", {v.t1, v.t2}}, {"mean", v.mean}});
      return kFailed;
    }
    if (*suite) {
      if (suite_name == "list") {
        for (const auto& info : tc::suite_registry()) {
          std::cout << std::left << std::setw(28) << info.name << info.claim << '\n';
        }
        return kOk;
      }
      if (suite_seed) so.seed = *suite_seed;
      const auto report = tc::run_suite(suite_name, so);
      std::cout << (report.passed ? "PASS " : "FAIL ") << report.name << ": " << report.claim
                << '\n';
      for (const auto& line : report.details) std::cout << "  " << line << '\n';
      return report.passed ? kOk : kFailed;
    }
  } catch (const tc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
