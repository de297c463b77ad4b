#pragma once

#include <map>
#include <string>
#include <vector>

#include "popcomp/config.hpp"
#include "popcomp/metrics.hpp"

namespace popcomp {

// One finished replication: the trace plus the final population.
struct RunResult {
  Trace trace;
  Population population;
};

// Builds the initial population from the spec and drives one run on the
// given stream.
RunResult run_spec(const RunSpec& spec, SplitRng rng);

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;                   // finite values only
  std::optional<double> success_fraction;  // boolean predicates
};

struct SweepSummary {
  std::uint32_t replications = 0;
  std::map<std::string, MetricStat> metrics;
  std::map<std::string, std::vector<double>> per_rep;
  // per-level empirical means over the tail window, averaged across reps
  std::vector<double> tail_mean_r;
  std::vector<double> tail_mean_x;
  std::vector<double> tail_mean_y;
};

// Runs `replications` independent simulations on substream(seed, r) and
// aggregates deterministically in r order. Replications may execute
// concurrently (POPCOMP_WORKERS caps the worker count).
SweepSummary replicate(const RunSpec& spec);

// Summary plus the expanded config, as a JSON document.
std::string summary_to_json(const SweepSummary& summary, const RunSpec& spec);

// Optional per-replication CSV: "rep,metric,value".
std::string per_rep_csv(const SweepSummary& summary);

}  // namespace popcomp
