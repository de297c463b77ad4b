#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popcomp/engine.hpp"
#include "popcomp/population.hpp"

namespace popcomp {

// One requested metric; fields beyond `name` apply only where meaningful.
struct MetricSpec {
  std::string name;
  double theta = 1.5;       // ratio predicates
  Color truth = Color::X;   // correctness predicates
  int target = 0;           // counter target; 0 means +m
  double d = 0.0;           // potential base; 0 means 2(1+p)/p
};

// A fully expanded run/sweep configuration (the JSON file format with every
// "auto" resolved).
struct RunSpec {
  ProtocolParams params;
  std::uint64_t x0 = 0;
  std::uint64_t y0 = 0;
  RestPolicy rest_policy = RestPolicy::AllNeutral;
  double parallel_time = 0.0;
  double snapshot_every_ptime = 1.0;
  std::vector<SwitchEvent> switches;
  std::uint64_t seed = 0;
  std::uint32_t replications = 1;
  double window_fraction = 0.25;
  std::vector<MetricSpec> metrics;

  std::uint64_t total_steps() const;
  std::uint64_t cadence_steps() const;
  double window_from_ptime() const;  // tail-window start
};

// Strict parsing: unknown keys are rejected, "auto" expands to the protocol
// defaults. Throws ConfigError.
RunSpec parse_run_config_text(const std::string& json_text);
RunSpec load_run_config(const std::string& path);

// Fully expanded configuration as a JSON document (provenance echo).
std::string config_echo_json(const RunSpec& spec);

}  // namespace popcomp
