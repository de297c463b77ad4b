#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popcomp/population.hpp"

namespace popcomp {

struct SwitchEvent {
  double at_ptime = 0.0;
  std::uint64_t x0 = 0;
  std::uint64_t y0 = 0;
};

struct AppliedSwitch {
  std::uint64_t step = 0;
  double at_ptime = 0.0;
  std::uint64_t x0 = 0;
  std::uint64_t y0 = 0;
};

struct Snapshot {
  std::uint64_t step = 0;
  double ptime = 0.0;
  std::uint64_t baseline_x = 0;
  std::uint64_t baseline_y = 0;
  std::uint64_t neutral = 0;
  std::vector<std::uint64_t> x;  // index 1..s
  std::vector<std::uint64_t> y;
  std::uint64_t out_x = 0;
  std::uint64_t out_y = 0;
  std::uint64_t out_undecided = 0;
  std::uint64_t leaks = 0;  // cumulative leak rewrites so far

  std::uint64_t strong_x() const;  // sum of x[1..s]
  std::uint64_t strong_y() const;
  std::uint64_t cumulative_r(int level) const;  // |R_level|, baselines included
};

struct Trace {
  std::uint64_t n = 0;
  int s = 0;
  Variant variant = Variant::Comparison;
  std::uint64_t cadence = 0;
  std::vector<Snapshot> snapshots;
  std::vector<AppliedSwitch> events;
  // first parallel time at which the predicate held (tracked every step)
  std::optional<double> first_all_neutral_ptime;
  std::optional<double> first_level_cap_ptime;  // no agent with level < s

  double end_ptime() const { return snapshots.empty() ? 0.0 : snapshots.back().ptime; }
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

struct InteractionRecord {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  bool generic_leak = false;
  bool structured_leak = false;
};

// One scheduler step: draws an ordered pair of distinct agents; a configured
// generic leak fires instead of the interaction with its per-step rate.
InteractionRecord step(Population& pop, SplitRng& rng);

// Drives `total_steps` interactions, applying each switch exactly once when
// parallel time first reaches its threshold and snapshotting at the cadence
// (step 0 and the final step included).
Trace run(Population& pop, std::uint64_t total_steps, std::uint64_t cadence,
          std::vector<SwitchEvent> switches, SplitRng& rng);

}  // namespace popcomp
