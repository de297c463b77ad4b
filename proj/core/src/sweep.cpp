#include "popcomp/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <limits>
#include <thread>

#include "json.hpp"

namespace popcomp {

using nlohmann::json;

RunResult run_spec(const RunSpec& spec, SplitRng rng) {
  Population pop = make_initial(spec.params, spec.x0, spec.y0, spec.rest_policy, rng);
  Trace trace = run(pop, spec.total_steps(), spec.cadence_steps(), spec.switches, rng);
  return {std::move(trace), std::move(pop)};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RepOutcome {
  std::map<std::string, double> values;
  std::map<std::string, bool> flags;
  TailMeans tail;
};

double optional_ptime(const std::optional<double>& v) { return v ? *v : kNaN; }

RepOutcome evaluate_rep(const RunSpec& spec, const RunResult& result) {
  RepOutcome out;
  const Trace& trace = result.trace;
  const Population& pop = result.population;
  const double window_from = spec.window_from_ptime();
  out.tail = tail_means(trace, window_from);

  for (const auto& ms : spec.metrics) {
    if (ms.name == "end_ratio") {
      out.values[ms.name] = end_strong_ratio(trace);
    } else if (ms.name == "stabilize_ratio") {
      const auto t = convergence_time(trace, ratio_at_least(ms.theta));
      out.values[ms.name] = optional_ptime(t);
      out.flags[ms.name] = t.has_value();
    } else if (ms.name == "stabilize_majority") {
      const auto t = convergence_time(trace, majority_correct(ms.truth));
      out.values[ms.name] = optional_ptime(t);
      out.flags[ms.name] = t.has_value();
    } else if (ms.name == "wrong_output_fraction") {
      out.values[ms.name] = output_fractions(pop, ms.truth).wrong;
    } else if (ms.name == "undecided_fraction") {
      out.values[ms.name] = output_fractions(pop, ms.truth).undecided;
    } else if (ms.name == "counter_hit_fraction") {
      const int target = ms.target != 0 ? ms.target : spec.params.m;
      out.values[ms.name] = counter_hit_fraction(pop, target);
    } else if (ms.name == "strong_fraction_end") {
      out.values[ms.name] =
          1.0 - static_cast<double>(pop.neutral_count()) / static_cast<double>(pop.size());
    } else if (ms.name == "neutral_fraction_end") {
      out.values[ms.name] =
          static_cast<double>(pop.neutral_count()) / static_cast<double>(pop.size());
    } else if (ms.name == "potential_end") {
      const double d = ms.d > 1.0 ? ms.d : 2.0 * (1.0 + spec.params.p) / spec.params.p;
      out.values[ms.name] = potential(pop, d);
    } else if (ms.name == "first_all_neutral_ptime") {
      out.values[ms.name] = optional_ptime(trace.first_all_neutral_ptime);
      out.flags[ms.name] = trace.first_all_neutral_ptime.has_value();
    } else if (ms.name == "first_level_cap_ptime") {
      out.values[ms.name] = optional_ptime(trace.first_level_cap_ptime);
      out.flags[ms.name] = trace.first_level_cap_ptime.has_value();
    } else if (ms.name == "leaks_total") {
      out.values[ms.name] = static_cast<double>(pop.leak_events);
    } else {
      throw ConfigError("unknown metric '" + ms.name + "'");
    }
  }
  return out;
}

std::size_t worker_count(std::uint32_t replications) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("POPCOMP_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) workers = static_cast<std::size_t>(v);
  }
  return std::min<std::size_t>(workers, replications);
}

}  // namespace

SweepSummary replicate(const RunSpec& spec) {
  const std::uint32_t reps = spec.replications;
  std::vector<RepOutcome> outcomes(reps);

  const std::size_t workers = worker_count(reps);
  if (workers <= 1) {
    for (std::uint32_t r = 0; r < reps; ++r)
      outcomes[r] = evaluate_rep(spec, run_spec(spec, SplitRng::substream(spec.seed, r)));
  } else {
    std::atomic<std::uint32_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto work = [&] {
      try {
        for (;;) {
          const std::uint32_t r = next.fetch_add(1);
          if (r >= reps) return;
          outcomes[r] =
              evaluate_rep(spec, run_spec(spec, SplitRng::substream(spec.seed, r)));
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(reps);  // stop the other workers
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  SweepSummary summary;
  summary.replications = reps;
  if (reps == 0) return summary;

  // metric aggregation, in r order
  for (const auto& ms : spec.metrics) {
    std::vector<double> values;
    values.reserve(reps);
    std::size_t successes = 0;
    bool has_flag = false;
    for (const auto& oc : outcomes) {
      values.push_back(oc.values.at(ms.name));
      auto it = oc.flags.find(ms.name);
      if (it != oc.flags.end()) {
        has_flag = true;
        successes += it->second ? 1 : 0;
      }
    }
    MetricStat stat;
    stat.min = std::numeric_limits<double>::infinity();
    stat.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
      if (!std::isfinite(v)) continue;
      stat.count += 1;
      sum += v;
      sum_sq += v * v;
      stat.min = std::min(stat.min, v);
      stat.max = std::max(stat.max, v);
    }
    if (stat.count > 0) {
      stat.mean = sum / static_cast<double>(stat.count);
      const double var =
          std::max(0.0, sum_sq / static_cast<double>(stat.count) - stat.mean * stat.mean);
      stat.stddev = std::sqrt(var);
    } else {
      stat.mean = stat.stddev = stat.min = stat.max = kNaN;
    }
    if (has_flag)
      stat.success_fraction = static_cast<double>(successes) / static_cast<double>(reps);
    summary.metrics[ms.name] = stat;
    summary.per_rep[ms.name] = std::move(values);
  }

  // per-level tail means averaged across reps
  const std::size_t levels = outcomes.front().tail.r.size();
  summary.tail_mean_r.assign(levels, 0.0);
  summary.tail_mean_x.assign(levels, 0.0);
  summary.tail_mean_y.assign(levels, 0.0);
  for (const auto& oc : outcomes) {
    for (std::size_t l = 0; l < levels; ++l) {
      summary.tail_mean_r[l] += oc.tail.r[l];
      summary.tail_mean_x[l] += oc.tail.x[l];
      summary.tail_mean_y[l] += oc.tail.y[l];
    }
  }
  for (std::size_t l = 0; l < levels; ++l) {
    summary.tail_mean_r[l] /= reps;
    summary.tail_mean_x[l] /= reps;
    summary.tail_mean_y[l] /= reps;
  }
  return summary;
}

std::string summary_to_json(const SweepSummary& summary, const RunSpec& spec) {
  json doc;
  doc["config"] = json::parse(config_echo_json(spec));
  doc["replications"] = summary.replications;
  json metrics = json::object();
  for (const auto& [name, stat] : summary.metrics) {
    json entry;
    entry["mean"] = stat.mean;
    entry["stddev"] = stat.stddev;
    entry["min"] = stat.min;
    entry["max"] = stat.max;
    entry["count"] = stat.count;
    if (stat.success_fraction) entry["success_fraction"] = *stat.success_fraction;
    metrics[name] = entry;
  }
  doc["metrics"] = metrics;
  doc["tail_mean_r"] = summary.tail_mean_r;
  doc["tail_mean_x"] = summary.tail_mean_x;
  doc["tail_mean_y"] = summary.tail_mean_y;
  return doc.dump(2);
}

std::string per_rep_csv(const SweepSummary& summary) {
  std::string out = "rep,metric,value\n";
  char buf[64];
  for (const auto& [name, values] : summary.per_rep) {
    for (std::size_t r = 0; r < values.size(); ++r) {
      std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g\n", r, name.c_str(), values[r]);
      out += buf;
    }
  }
  return out;
}

}  // namespace popcomp
