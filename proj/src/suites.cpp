#include "twochoice/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "twochoice/calibration.hpp"
#include "twochoice/coupling.hpp"
#include "twochoice/errors.hpp"
#include "twochoice/experiment.hpp"
#include "twochoice/metrics.hpp"
#include "twochoice/oracles.hpp"
#include "twochoice/potentials.hpp"
#include "twochoice/process.hpp"
#include "twochoice/walks.hpp"

namespace twochoice {

using nlohmann::ordered_json;
namespace cal = calibration;

ordered_json SuiteReport::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["claim"] = claim;
  j["passed"] = passed;
  j["details"] = details;
  j["data"] = data;
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

namespace {

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os << std::setprecision(6);
  (os << ... << args);
  return os.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t replicas(const SuiteOptions& o, std::uint64_t fallback) {
  return o.seeds.value_or(fallback);
}

// Appends a runtime line; returns whether the budget held.
bool within_budget(SuiteReport& r, Clock::time_point start, double budget) {
  const double took = seconds_since(start);
  const bool ok = took < budget;
  r.details.push_back(cat("runtime ", took, " s (budget ", budget, " s)", ok ? "" : "  EXCEEDED"));
  return ok;
}

// ball-potential-identity ----------------------------------------------------

SuiteReport ball_potential_identity(const SuiteOptions& o) {
  SuiteReport r;
  const auto start = Clock::now();
  const std::size_t n = 64;
  const double alpha = 0.05;
  const std::uint64_t states = replicas(o, 1000);
  Rng rng(o.seed);
  double worst = 0.0;
  double worst_clipped = 0.0;
  for (std::uint64_t k = 0; k < states; ++k) {
    oracles::Loads loads(n);
    for (auto& v : loads) v = static_cast<Load>(rng.uniform(51));
    const BinState state = BinState::from_loads(loads);
    const double ref = oracles::clipped_phi_naive(loads, alpha);
    const double pi = ball_potential_sum(state, alpha);
    const auto zero = static_cast<double>(oracles::zero_excess_bins(loads));
    worst = std::max(worst, std::abs(pi + zero - ref) / ref);
    worst_clipped = std::max(worst_clipped, std::abs(phi_clipped(state, alpha) - ref) / ref);
  }
  const double tol = 1e-9;
  r.details.push_back(cat(states, " states, n=64, loads in [0,50], alpha=0.05: max rel err of ",
                          "Pi + #zero-excess vs sum exp(alpha X+) = ", worst, " (tol ", tol, ")"));
  r.details.push_back(cat("engine Phi+ vs naive: max rel err ", worst_clipped));
  const bool budget = within_budget(r, start, 1.0);
  r.passed = worst <= tol && worst_clipped <= tol && budget;
  r.data = {{"max_rel_err", worst}, {"max_rel_err_clipped", worst_clipped}};
  return r;
}

// rank-law -------------------------------------------------------------------

SuiteReport rank_law(const SuiteOptions& o) {
  SuiteReport r;
  const auto start = Clock::now();
  const std::size_t n = 16;
  const std::uint64_t inserts = 1'000'000;
  Rng rng(o.seed);

  std::vector<Load> loads(n);
  std::iota(loads.begin(), loads.end(), Load{0});
  std::shuffle(loads.begin(), loads.end(), rng);
  BinState state = BinState::from_loads(loads);
  // rank of each bin: number of strictly heavier bins (loads are distinct)
  std::vector<std::size_t> rank(n);
  for (std::size_t b = 0; b < n; ++b) {
    rank[b] = static_cast<std::size_t>(
        std::count_if(loads.begin(), loads.end(), [&](Load v) { return v > loads[b]; }));
  }

  std::vector<std::uint64_t> hits(n, 0);
  for (std::uint64_t k = 0; k < inserts; ++k) {
    const Insert ins = greedy_insert(state, rng);
    ++hits[rank[ins.bin]];
    state.remove_ball(ins.bin);
  }

  const auto probs = rank_insertion_probs(n);
  const auto counts = oracles::rank_law_counts(n);
  bool law_exact = true;
  for (std::size_t i = 0; i < n; ++i) {
    law_exact = law_exact && probs[i] == static_cast<double>(counts[i]) / static_cast<double>(n * n);
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = probs[i] * static_cast<double>(inserts);
    const double diff = static_cast<double>(hits[i]) - expected;
    chi2 += diff * diff / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  const double significance = 1e-3;
  r.details.push_back(cat("rank_insertion_probs equals pair-count oracle exactly: ",
                          law_exact ? "yes" : "NO"));
  r.details.push_back(cat(inserts, " reverted inserts, n=16: chi2 = ", chi2, " (df 15), p = ",
                          p_value, " (need > ", significance, ")"));
  const bool budget = within_budget(r, start, 5.0);
  r.passed = law_exact && p_value > significance && budget;
  r.data = {{"chi2", chi2}, {"p_value", p_value}, {"hits", hits}};
  return r;
}

// majorization ---------------------------------------------------------------

SuiteReport majorization(const SuiteOptions& o) {
  SuiteReport r;
  const auto start = Clock::now();
  const std::size_t n = 8;
  const std::uint64_t steps = 100'000;
  const std::uint64_t seeds = replicas(o, 20);
  const double beta = 0.6;
  std::vector<std::uint64_t> violations(seeds, 0);
  std::vector<std::uint64_t> mismatched_totals(seeds, 0);
  parallel_for(seeds, o.jobs, [&](std::size_t k) {
    CoupledPair pair{BinState(n), BinState(n), mix_seed(o.seed, k)};
    for (std::uint64_t t = 0; t < steps; ++t) {
      pair.step(beta);
      if (!pair.x_majorizes_y()) ++violations[k];
      if (pair.x().total_load() != pair.y().total_load()) ++mismatched_totals[k];
    }
  });
  const auto total = std::accumulate(violations.begin(), violations.end(), std::uint64_t{0});
  const auto bad_m =
      std::accumulate(mismatched_totals.begin(), mismatched_totals.end(), std::uint64_t{0});
  r.details.push_back(cat(seeds, " seeds x ", steps, " coupled steps, n=8, beta=0.6: ", total,
                          " prefix-sum violations, ", bad_m, " total-load mismatches"));
  const bool budget = within_budget(r, start, 10.0);
  r.passed = total == 0 && bad_m == 0 && budget;
  r.data = {{"violations", violations}};
  return r;
}

// walk-crossing --------------------------------------------------------------

SuiteReport walk_crossing(const SuiteOptions& o) {
  SuiteReport r;
  const auto start = Clock::now();
  const std::uint64_t trials = 100'000;
  const Rng root(o.seed);
  bool ok = true;
  std::uint64_t cell = 0;
  double worst_z = 0.0;
  ordered_json rows = ordered_json::array();
  for (const double rr : {1.5, 2.0, 4.0}) {
    for (const std::int64_t a : {1, 2, 5}) {
      for (const std::int64_t b : {1, 2, 5}) {
        Rng rng = root.substream(cell++);
        const double p = biased_rw_cross_prob(rr, a, b);
        const double solved = oracles::gamblers_ruin_solve(rr, a, b);
        const double emp = simulate_biased_walk_crossing(rr, a, b, trials, rng);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        const double z = std::abs(emp - p) / se;
        const bool cell_ok = z <= cal::kStdErrors && std::abs(solved - p) <= 1e-12;
        worst_z = std::max(worst_z, z);
        ok = ok && cell_ok;
        if (!cell_ok) {
          r.details.push_back(cat("r=", rr, " a=", a, " b=", b, ": formula ", p, ", solve ", solved,
                                  ", empirical ", emp, " (", z, " SE)  FAIL"));
        }
        rows.push_back({{"r", rr}, {"a", a}, {"b", b}, {"formula", p}, {"empirical", emp}, {"z", z}});
      }
    }
  }
  r.details.push_back(cat("27 (r,a,b) cells x ", trials, " trials: worst deviation ", worst_z,
                          " SE (limit ", cal::kStdErrors, ")"));
  const bool budget = within_budget(r, start, 30.0);
  r.passed = ok && budget;
  r.data = {{"cells", rows}};
  return r;
}

// walk-hitting ---------------------------------------------------------------

SuiteReport walk_hitting(const SuiteOptions& o) {
  SuiteReport r;
  const auto start = Clock::now();
  const std::uint64_t trials = 100'000;
  const double n_ref = 16.0;
  const Rng root(o.seed);
  bool ok = true;
  ordered_json rows = ordered_json::array();
  std::uint64_t cell = 0;
  for (const auto& [D, alpha] : std::vector<std::pair<std::uint64_t, double>>{
           {5, 0.0}, {10, 0.5}, {20, 0.9}}) {
    Rng rng = root.substream(cell++);
    const double expected = expected_hit_time(D, alpha);
    const double solved = oracles::hitting_time_solve(D, alpha);
    const double cutoff = hit_time_tail_cutoff(D, alpha, n_ref, 1.0);
    double sum = 0.0;
    std::uint64_t tail = 0;
    for (std::uint64_t k = 0; k < trials; ++k) {
      const auto t = reflecting_lazy_walk_hit_time(D, alpha, rng);
      sum += static_cast<double>(t);
      if (static_cast<double>(t) >= cutoff) ++tail;
    }
    const double mean = sum / static_cast<double>(trials);
    const double rel = std::abs(mean - expected) / expected;
    const double tail_frac = static_cast<double>(tail) / static_cast<double>(trials);
    const bool row_ok = rel <= 0.02 && tail_frac < 1.0 / n_ref &&
                        std::abs(solved - expected) <= 1e-9 * expected;
    ok = ok && row_ok;
    r.details.push_back(cat("D=", D, " alpha=", alpha, ": E[T]=", expected, " (solve ", solved,
                            "), mean ", mean, " rel err ", rel, " (tol 0.02); P[T >= ", cutoff,
                            "] = ", tail_frac, " (ref 1/16)", row_ok ? "" : "  FAIL"));
    rows.push_back({{"D", D}, {"alpha", alpha}, {"expected", expected}, {"mean", mean},
                    {"rel_err", rel}, {"tail_fraction", tail_frac}});
  }
  const bool budget = within_budget(r, start, 60.0);
  r.passed = ok && budget;
  r.data = {{"rows", rows}};
  return r;
}

// discrepancy-log and balls-above-average share one set of runs --------------

struct LogRun {
  std::size_t n;
  std::uint64_t seed;
  double max_adisc;
  std::vector<Load> above_counts;  // at the random sample times
};

std::vector<LogRun> constant_beta_runs(const SuiteOptions& o) {
  const double beta = 0.6;
  const std::uint64_t seeds = replicas(o, 10);
  const std::vector<std::size_t> sizes{128, 512, 2048};
  const std::size_t samples_per_run = 20;
  std::vector<LogRun> runs(sizes.size() * seeds);
  parallel_for(runs.size(), o.jobs, [&](std::size_t idx) {
    const std::size_t n = sizes[idx / seeds];
    const double nn = static_cast<double>(n);
    const auto steps = static_cast<std::uint64_t>(std::ceil(200.0 * nn * std::log(nn)));
    const std::uint64_t sample_count = steps / n;

    LogRun run{n, mix_seed(o.seed, idx), 0.0, {}};
    Rng rng(run.seed);
    // 20 distinct sample indices in [1, sample_count], from a separate stream
    Rng pick = rng.substream(1);
    std::set<std::uint64_t> chosen;
    while (chosen.size() < std::min<std::uint64_t>(samples_per_run, sample_count)) {
      chosen.insert(1 + pick.uniform(sample_count));
    }

    BinState state(n);
    for (std::uint64_t t = 1; t <= steps; ++t) {
      step(state, beta, rng);
      if (t % n != 0) continue;
      run.max_adisc = std::max(run.max_adisc, measure(state, t).adisc);
      if (chosen.contains(t / n)) {
        const Load c = (state.total_load() + static_cast<Load>(n) - 1) / static_cast<Load>(n);
        run.above_counts.push_back(balls_at_or_above(state, c + cal::kBallsAboveGamma));
      }
    }
    runs[idx] = std::move(run);
  });
  return runs;
}

SuiteReport discrepancy_log(const SuiteOptions& o) {
  SuiteReport r;
  const double alpha = 0.6 / 16.0;
  const auto runs = constant_beta_runs(o);
  bool bound_ok = true;
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& run : runs) {
    const double limit = cal::kAdiscFactor / alpha * std::log(static_cast<double>(run.n));
    bound_ok = bound_ok && run.max_adisc <= limit;
    by_n[run.n].push_back(run.max_adisc);
  }
  ordered_json per_n = ordered_json::object();
  for (const auto& [n, v] : by_n) {
    const double limit = cal::kAdiscFactor / alpha * std::log(static_cast<double>(n));
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    r.details.push_back(cat("n=", n, ": max sampled adisc over ", v.size(), " seeds in [", *mn, ", ",
                            *mx, "], mean ", mean, "; bound (7/alpha) ln n = ", limit));
    per_n[std::to_string(n)] = v;
  }
  auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double ratio = mean_of(by_n[2048]) / mean_of(by_n[128]);
  const double ratio_limit = std::log(2048.0) / std::log(128.0) * cal::kAdiscScalingSlack;
  r.details.push_back(cat("scaling: mean max-adisc ratio n=2048 / n=128 = ", ratio, " (limit ",
                          ratio_limit, ")"));
  r.passed = bound_ok && ratio <= ratio_limit;
  r.data = {{"max_adisc", per_n}, {"ratio", ratio}};
  return r;
}

SuiteReport balls_above_average(const SuiteOptions& o) {
  SuiteReport r;
  const auto runs = constant_beta_runs(o);
  std::uint64_t total = 0;
  std::uint64_t good = 0;
  Load worst = 0;
  for (const auto& run : runs) {
    const double cap = cal::kBallsAboveShareOfN * static_cast<double>(run.n);
    for (const Load c : run.above_counts) {
      ++total;
      if (static_cast<double>(c) <= cap) ++good;
      worst = std::max(worst, c);
    }
  }
  const double share = static_cast<double>(good) / static_cast<double>(total);
  r.details.push_back(cat(total, " sampled states (n in {128,512,2048}): balls at height >= ",
                          "ceil(m/n)+", cal::kBallsAboveGamma, " within 0.5 n in ", good, " (",
                          share * 100.0, "%, need ", cal::kRequiredShare * 100.0, "%); worst count ",
                          worst));
  r.passed = share >= cal::kRequiredShare;
  r.data = {{"samples", total}, {"within", good}, {"worst", worst}};
  return r;
}

// overload -------------------------------------------------------------------

SuiteReport overload(const SuiteOptions& o) {
  SuiteReport r;
  const std::size_t n = 1024;
  const std::uint64_t seeds = replicas(o, 20);
  const double limit = std::log(std::log(static_cast<double>(n))) + cal::kOverloadAdditive;
  std::vector<double> max_overload(seeds, 0.0);
  parallel_for(seeds, o.jobs, [&](std::size_t k) {
    ExperimentConfig c;
    c.name = "overload";
    c.n = n;
    c.steps = static_cast<std::uint64_t>(n) * n;
    c.seed = mix_seed(o.seed, k);
    c.schedule = Schedule(Schedule::IidUniform{0.4, 0.7, mix_seed(o.seed ^ 0x5bd1e995ULL, k)});
    c.initial_balanced_load = static_cast<Load>(10 * n);
    c.sample_every = n;
    max_overload[k] = run_simulation(c).report.seeds.front().max_overload;
  });
  const auto within = static_cast<std::uint64_t>(
      std::count_if(max_overload.begin(), max_overload.end(), [&](double v) { return v <= limit; }));
  const double share = static_cast<double>(within) / static_cast<double>(seeds);
  const auto worst = *std::max_element(max_overload.begin(), max_overload.end());
  r.details.push_back(cat(seeds, " seeds, n=1024, n^2 steps, beta iid U[0.4,0.7], start 10n balanced: ",
                          "max overload <= ln ln n + ", cal::kOverloadAdditive, " = ", limit, " in ",
                          within, " seeds (", share * 100.0, "%, need ",
                          cal::kRequiredShare * 100.0, "%); worst ", worst));
  r.passed = share >= cal::kRequiredShare;
  r.data = {{"max_overload", max_overload}, {"limit", limit}};
  return r;
}

// deletion-burst-lower-bound ---------------------------------------------------

SuiteReport deletion_burst_lower_bound(const SuiteOptions& o) {
  SuiteReport r;
  const std::size_t n = 4096;
  const double epsilon = 0.1;
  const std::uint64_t seeds = replicas(o, 10);
  const double nn = static_cast<double>(n);
  const auto prefill = static_cast<Load>(n) * static_cast<Load>(std::ceil(std::log(nn)));
  const auto res = lower_bound_experiment(n, epsilon, prefill, seeds, o.seed, 1.0 / 16.0,
                                          DeletionModel::kBin, o.jobs);
  const double count_limit = std::sqrt(nn) / cal::kLowerBoundSqrtDivisor;
  const double min_fraction =
      *std::min_element(res.per_seed_fraction.begin(), res.per_seed_fraction.end());
  const double max_gamma =
      *std::max_element(res.per_seed_gamma_over_n.begin(), res.per_seed_gamma_over_n.end());
  r.details.push_back(cat("n=4096, prefill ", prefill, " inserts, burst beta=0.4 for ",
                          deletion_burst_length(n, epsilon), " steps, ", seeds, " seeds"));
  r.details.push_back(cat("prefill sanity: max Gamma/n = ", max_gamma, " (alpha = 1/16)"));
  r.details.push_back(cat("share of bins at >= floor(m/n) at burst start: min ", min_fraction,
                          ", mean ", res.mean_fraction, " (need >= ", cal::kConstantFraction, ")"));
  r.details.push_back(cat("bins at >= floor(m(T)/n) + ln(n)/2 (i.e. load >= ",
                          res.per_seed_threshold.front(), "): mean ", res.mean_count, " (need >= ",
                          count_limit, "); max load per seed ",
                          *std::max_element(res.per_seed_max_load.begin(), res.per_seed_max_load.end())));
  r.passed = res.mean_count >= count_limit && min_fraction >= cal::kConstantFraction;
  r.data = {{"counts", res.per_seed_counts},
            {"fractions", res.per_seed_fraction},
            {"gamma_over_n", res.per_seed_gamma_over_n},
            {"max_load", res.per_seed_max_load},
            {"threshold", res.per_seed_threshold}};
  return r;
}

// drift ----------------------------------------------------------------------

SuiteReport drift(const SuiteOptions& o) {
  SuiteReport r;
  Rng rng(o.seed);

  // one bin 20 above the average, one 20 below
  const std::size_t n = 64;
  std::vector<Load> loads(n, 30);
  loads[0] = 50;
  loads[1] = 10;
  const BinState high = BinState::from_loads(loads);
  const double alpha = 0.01;
  const double beta = 0.6;
  const auto est = drift_estimate(high, beta, alpha, 100'000, rng);
  const double exact_high = oracles::exact_gamma_drift(loads, beta, alpha, false);
  const bool negative = est.mean + cal::kStdErrors * est.std_err < 0.0;
  r.details.push_back(cat("+-20 state (n=64, others at 30), alpha=0.01, beta=0.6: mean dGamma ",
                          est.mean, " +- ", est.std_err, " (", est.mean / est.std_err,
                          " SE); exact ", exact_high, "; need negative at > 3 SE",
                          negative ? "" : "  FAIL"));

  const std::uint64_t states = 100;
  const std::uint64_t trials = 20'000;
  std::uint64_t matched = 0;
  double worst_z = 0.0;
  for (std::uint64_t k = 0; k < states; ++k) {
    const std::size_t sn = 2 + rng.uniform(15);
    oracles::Loads sl(sn);
    for (auto& v : sl) v = static_cast<Load>(rng.uniform(13));
    const double sb = 0.2 + 0.7 * rng.uniform01();
    const double sa = 0.02 + 0.18 * rng.uniform01();
    const auto model = k % 2 == 0 ? DeletionModel::kBin : DeletionModel::kBall;
    const auto e = drift_estimate(BinState::from_loads(sl), sb, sa, trials, rng, model);
    const double exact = oracles::exact_gamma_drift(sl, sb, sa, model == DeletionModel::kBall);
    const double diff = std::abs(e.mean - exact);
    const bool ok = diff <= cal::kStdErrors * e.std_err + 1e-12 * std::abs(exact);
    if (ok) ++matched;
    if (e.std_err > 0.0) worst_z = std::max(worst_z, diff / e.std_err);
  }
  const std::uint64_t need = 99;
  r.details.push_back(cat(states, " random states (n <= 16), ", trials,
                          " trials each: Monte-Carlo within 3 SE of exact enumeration in ", matched,
                          " (need >= ", need, "); worst ", worst_z, " SE"));
  r.passed = negative && matched >= need;
  r.data = {{"high_mean", est.mean}, {"high_se", est.std_err}, {"high_exact", exact_high},
            {"matched", matched}};
  return r;
}

// coupling-time --------------------------------------------------------------

SuiteReport coupling_time(const SuiteOptions& o) {
  SuiteReport r;
  const std::size_t n = 64;
  const std::uint64_t seeds = replicas(o, 20);
  const double nn = static_cast<double>(n);
  const double ln = std::log(nn);
  const double bound = cal::kCouplingConstant * nn * nn * nn * ln * ln * ln;
  const BinState x0 = BinState::balanced(n, static_cast<Load>(4 * n));
  std::vector<Load> displaced(x0.loads().begin(), x0.loads().end());
  --displaced[0];
  ++displaced[1];
  const BinState y0 = BinState::from_loads(displaced);
  const Schedule beta = Schedule::constant(0.5);

  std::vector<std::optional<std::uint64_t>> times(seeds);
  parallel_for(seeds, o.jobs, [&](std::size_t k) {
    const auto out = coupling_time_experiment(x0, y0, beta, DeletionModel::kBin, mix_seed(o.seed, k));
    if (const auto* at = std::get_if<CoupledAt>(&out.verdict)) times[k] = at->t;
  });
  std::uint64_t within = 0;
  std::uint64_t worst = 0;
  ordered_json data = ordered_json::array();
  for (const auto& t : times) {
    if (t && static_cast<double>(*t) <= bound) ++within;
    if (t) worst = std::max(worst, *t);
    data.push_back(t ? ordered_json(*t) : ordered_json(nullptr));
  }
  r.details.push_back(cat("n=64, balanced 4n vs one ball displaced, beta=0.5: met within n^3 ln^3 n = ",
                          bound, " in ", within, "/", seeds, " seeds; slowest ", worst, " steps"));
  r.passed = within == seeds;
  r.data = {{"coupled_at", data}, {"bound", bound}};
  return r;
}

// level-transitions ------------------------------------------------------------

SuiteReport level_transitions(const SuiteOptions& o) {
  SuiteReport r;
  Rng rng(o.seed);
  const std::uint64_t configs = replicas(o, 200);
  std::uint64_t agree = 0;
  for (std::uint64_t k = 0; k < configs; ++k) {
    const std::size_t n = 1 + rng.uniform(8);
    oracles::Loads loads(n);
    for (auto& v : loads) v = static_cast<Load>(rng.uniform(7));
    const BinState state = BinState::from_loads(loads);
    const Load h = 1 + static_cast<Load>(rng.uniform(static_cast<std::uint64_t>(state.max_load()) + 2));
    const double beta = rng.uniform01();
    const auto p = level_step_probs(state, h, beta);
    const auto e = oracles::enumerate_level_moves(loads, h);
    const auto up_pairs = static_cast<std::uint64_t>(p.up_bins * p.up_bins);
    // exact on the integer numerators over n^2; the doubles only up to rounding
    const double p_ref = beta * static_cast<double>(e.up_pairs) / static_cast<double>(n * n);
    const bool ok = up_pairs == e.up_pairs && e.total_pairs == n * n &&
                    static_cast<std::uint64_t>(p.down_bins) == e.down_bins &&
                    std::abs(p.p_up - p_ref) <= 1e-15 * std::max(1.0, p_ref);
    if (ok) {
      ++agree;
    } else {
      r.details.push_back(cat("mismatch: n=", n, " h=", h, " engine up_bins^2=", up_pairs,
                              " enumeration=", e.up_pairs));
    }
  }
  r.details.push_back(cat(configs, " random configurations (n <= 8): exact agreement with n^2-pair ",
                          "enumeration in ", agree));
  r.passed = agree == configs;
  r.data = {{"agree", agree}, {"configs", configs}};
  return r;
}

// determinism ------------------------------------------------------------------

SuiteReport determinism(const SuiteOptions& o) {
  SuiteReport r;
  ExperimentConfig c;
  c.name = "determinism";
  c.n = 64;
  c.steps = 100'000;
  c.seed = o.seed;
  c.seeds_count = 3;
  c.schedule = Schedule(Schedule::IidUniform{0.3, 0.8, o.seed});
  c.alpha = 0.05;
  c.sample_every = 100;
  auto jsonl = [](const ExperimentConfig& cfg) {
    std::ostringstream os;
    write_samples_jsonl(os, run_simulation(cfg).runs);
    return os.str();
  };
  const std::string first = jsonl(c);
  const std::string second = jsonl(c);
  ExperimentConfig parallel = c;
  parallel.jobs = 3;
  const std::string third = jsonl(parallel);
  const bool same = first == second && first == third;
  r.details.push_back(cat("same config + seed: JSONL byte-identical across two runs and jobs=1 vs 3: ",
                          same ? "yes" : "NO", " (", first.size(), " bytes)"));

  Rng rng(mix_seed(o.seed, 1));
  std::string engine_err;
  for (const auto model : {DeletionModel::kBin, DeletionModel::kBall}) {
    BinState state(128);
    for (std::uint64_t t = 1; t <= 100'000; ++t) step(state, 0.52, rng, model);
    if (engine_err.empty()) engine_err = state.coherence_error();
  }
  CoupledPair pair(BinState(32), BinState(32), mix_seed(o.seed, 2));
  for (std::uint64_t t = 0; t < 100'000; ++t) pair.step(0.55);
  std::string view_err = pair.sorted_x().coherence_error(pair.x());
  if (view_err.empty()) view_err = pair.sorted_y().coherence_error(pair.y());
  if (view_err.empty() && pair.distance() != transformation_distance(pair.x().loads(), pair.y().loads())) {
    view_err = "maintained distance differs from recomputation";
  }
  r.details.push_back(cat("BinState after 1e5 steps (bin and ball models) equals recomputation: ",
                          engine_err.empty() ? "yes" : engine_err));
  r.details.push_back(cat("coupled sorted views after 1e5 steps equal recomputation: ",
                          view_err.empty() ? "yes" : view_err));
  r.passed = same && engine_err.empty() && view_err.empty();
  r.data = {{"jsonl_bytes", first.size()}};
  return r;
}

struct Entry {
  SuiteInfo info;
  std::function<SuiteReport(const SuiteOptions&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"ball-potential-identity", "per-ball potential sum plus zero-excess bins equals clipped Phi"},
       ball_potential_identity},
      {{"rank-law", "Greedy-2 places into sorted rank i with probability (2i-1)/n^2"}, rank_law},
      {{"majorization", "random-bin process majorizes the coupled random-ball process at every step"},
       majorization},
      {{"walk-crossing", "biased walk crosses +b before -a with probability (r^a-1)/(r^(a+b)-1)"},
       walk_crossing},
      {{"walk-hitting", "lazy reflecting walk hits 0 from D in D(D+1)/(1-alpha) expected steps"},
       walk_hitting},
      {{"discrepancy-log", "constant beta keeps the absolute discrepancy O(log n)"}, discrepancy_log},
      {{"balls-above-average", "few balls sit more than gamma above the average"},
       balls_above_average},
      {{"overload", "overload stays below ln ln n + const under fluctuating beta"}, overload},
      {{"deletion-burst-lower-bound",
        "a deletion burst leaves Omega(sqrt n) bins at floor(m/n) + ln(n)/2"},
       deletion_burst_lower_bound},
      {{"drift", "Gamma drifts down from a high-potential state; Monte-Carlo matches enumeration"},
       drift},
      {{"coupling-time", "two copies meet within n^3 ln^3 n steps"}, coupling_time},
      {{"level-transitions", "level step probabilities agree with full pair enumeration"},
       level_transitions},
      {{"determinism", "same seed gives identical output; incremental state equals recomputation"},
       determinism},
  };
  return table;
}

}  // namespace

const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> infos = [] {
    std::vector<SuiteInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& options) {
  const auto& table = entries();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Entry& e) { return e.info.name == name; });
  if (it == table.end()) throw UnknownSuite("unknown suite '" + name + "'");
  const auto start = Clock::now();
  SuiteReport report = it->run(options);
  report.name = it->info.name;
  report.claim = it->info.claim;
  report.wall_clock_seconds = seconds_since(start);
  if (options.out) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(*options.out, ec);
    const fs::path file = fs::path(*options.out) / ("suite-" + name + ".json");
    std::ofstream f(file);
    if (!f) throw ConfigError("cannot write " + file.string());
    f << report.to_json().dump(2) << '\n';
  }
  return report;
}

}  // namespace twochoice
