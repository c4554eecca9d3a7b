#include "twochoice/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twochoice/errors.hpp"
#include "twochoice/rng.hpp"

namespace twochoice {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Schedule::Schedule(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      Overloaded{
          [&](const Constant& c) {
            require_probability(c.beta, "beta");
            lo_ = hi_ = c.beta;
          },
          [&](const PiecewiseConstant& p) {
            if (p.segments.empty() || p.segments.front().start != 1) {
              throw ConfigError("piecewise schedule must start with a segment at t = 1");
            }
            lo_ = 1.0;
            hi_ = 0.0;
            for (std::size_t i = 0; i < p.segments.size(); ++i) {
              require_probability(p.segments[i].beta, "segment beta");
              if (i > 0 && p.segments[i].start <= p.segments[i - 1].start) {
                throw ConfigError("piecewise segments must have increasing starts");
              }
              lo_ = std::min(lo_, p.segments[i].beta);
              hi_ = std::max(hi_, p.segments[i].beta);
            }
          },
          [&](const Sinusoid& s) {
            if (!(s.period > 0.0)) throw ConfigError("sinusoid period must be positive");
            if (s.amplitude < 0.0) throw ConfigError("sinusoid amplitude must be non-negative");
            lo_ = s.mid - s.amplitude;
            hi_ = s.mid + s.amplitude;
            require_probability(lo_, "sinusoid minimum");
            require_probability(hi_, "sinusoid maximum");
          },
          [&](const Explicit& e) {
            if (e.values.empty()) throw ConfigError("explicit schedule is empty");
            for (double v : e.values) require_probability(v, "explicit beta");
            const auto [mn, mx] = std::minmax_element(e.values.begin(), e.values.end());
            lo_ = *mn;
            hi_ = *mx;
          },
          [&](const DeletionBurst& d) {
            require_probability(d.beta_pre, "beta_pre");
            if (!(d.epsilon > 0.0 && d.epsilon < 0.5)) {
              throw ConfigError("deletion burst epsilon must lie in (0, 1/2)");
            }
            const double burst = 0.5 - d.epsilon;
            lo_ = d.t_switch > 0 ? std::min(d.beta_pre, burst) : burst;
            hi_ = d.t_switch > 0 ? std::max(d.beta_pre, burst) : burst;
          },
          [&](const IidUniform& u) {
            require_probability(u.lo, "iid lo");
            require_probability(u.hi, "iid hi");
            if (u.lo > u.hi) throw ConfigError("iid schedule needs lo <= hi");
            lo_ = u.lo;
            hi_ = u.hi;
          },
      },
      kind_);
}

double Schedule::beta(std::uint64_t t) const {
  if (t == 0) throw ScheduleTooShort("schedules are indexed from t = 1");
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.beta; },
          [t](const PiecewiseConstant& p) {
            auto it = std::upper_bound(
                p.segments.begin(), p.segments.end(), t,
                [](std::uint64_t value, const Segment& s) { return value < s.start; });
            return std::prev(it)->beta;
          },
          [t](const Sinusoid& s) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / s.period;
            return std::clamp(s.mid + s.amplitude * std::sin(phase), 0.0, 1.0);
          },
          [t](const Explicit& e) {
            if (t > e.values.size()) {
              throw ScheduleTooShort("explicit schedule has " + std::to_string(e.values.size()) +
                                     " steps, queried t = " + std::to_string(t));
            }
            return e.values[t - 1];
          },
          [t](const DeletionBurst& d) {
            if (t <= d.t_switch) return d.beta_pre;
            if (t > d.t_switch + d.burst_length) {
              throw ScheduleTooShort("deletion burst schedule ends at t = " +
                                     std::to_string(d.t_switch + d.burst_length));
            }
            return 0.5 - d.epsilon;
          },
          [t](const IidUniform& u) {
            const double unit = static_cast<double>(mix_seed(u.seed, t) >> 11) * 0x1.0p-53;
            return u.lo + (u.hi - u.lo) * unit;
          },
      },
      kind_);
}

std::optional<std::uint64_t> Schedule::length() const noexcept {
  if (const auto* e = std::get_if<Explicit>(&kind_)) return e->values.size();
  if (const auto* d = std::get_if<DeletionBurst>(&kind_)) return d->t_switch + d->burst_length;
  return std::nullopt;
}

nlohmann::ordered_json Schedule::to_json() const {
  nlohmann::ordered_json j;
  std::visit(Overloaded{
                 [&](const Constant& c) {
                   j["kind"] = "constant";
                   j["beta"] = c.beta;
                 },
                 [&](const PiecewiseConstant& p) {
                   j["kind"] = "piecewise";
                   auto segs = nlohmann::ordered_json::array();
                   for (const auto& s : p.segments) {
                     segs.push_back({{"start", s.start}, {"beta", s.beta}});
                   }
                   j["segments"] = std::move(segs);
                 },
                 [&](const Sinusoid& s) {
                   j["kind"] = "sinusoid";
                   j["mid"] = s.mid;
                   j["amplitude"] = s.amplitude;
                   j["period"] = s.period;
                 },
                 [&](const Explicit& e) {
                   j["kind"] = "explicit";
                   j["values"] = e.values;
                 },
                 [&](const DeletionBurst& d) {
                   j["kind"] = "deletion_burst";
                   j["beta_pre"] = d.beta_pre;
                   j["t_switch"] = d.t_switch;
                   j["epsilon"] = d.epsilon;
                   j["burst_length"] = d.burst_length;
                 },
                 [&](const IidUniform& u) {
                   j["kind"] = "iid_uniform";
                   j["lo"] = u.lo;
                   j["hi"] = u.hi;
                   j["seed"] = u.seed;
                 },
             },
             kind_);
  return j;
}

Schedule Schedule::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Schedule(Constant{j.at("beta").get<double>()});
    if (kind == "piecewise") {
      PiecewiseConstant p;
      for (const auto& s : j.at("segments")) {
        p.segments.push_back({s.at("start").get<std::uint64_t>(), s.at("beta").get<double>()});
      }
      return Schedule(std::move(p));
    }
    if (kind == "sinusoid") {
      return Schedule(Sinusoid{j.at("mid").get<double>(), j.at("amplitude").get<double>(),
                               j.at("period").get<double>()});
    }
    if (kind == "explicit") return Schedule(Explicit{j.at("values").get<std::vector<double>>()});
    if (kind == "deletion_burst") {
      const double eps = j.at("epsilon").get<double>();
      std::uint64_t burst = 0;
      if (j.contains("burst_length")) {
        burst = j.at("burst_length").get<std::uint64_t>();
      } else {
        const auto n = j.at("n").get<double>();
        burst = static_cast<std::uint64_t>(std::ceil(n * std::log(n) / (2.0 + 4.0 * eps)));
      }
      return Schedule(DeletionBurst{j.at("beta_pre").get<double>(),
                                    j.at("t_switch").get<std::uint64_t>(), eps, burst});
    }
    if (kind == "iid_uniform") {
      return Schedule(IidUniform{j.at("lo").get<double>(), j.at("hi").get<double>(),
                                 j.value("seed", std::uint64_t{0})});
    }
    throw ConfigError("unknown schedule kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed schedule: ") + e.what());
  }
}

}  // namespace twochoice
