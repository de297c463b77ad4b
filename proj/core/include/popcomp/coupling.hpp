#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "popcomp/engine.hpp"
#include "popcomp/population.hpp"

namespace popcomp {

enum class CouplingProperty : std::uint8_t { P1, P2, P3 };

struct CouplingViolation {
  std::uint64_t step = 0;
  CouplingProperty property = CouplingProperty::P1;
  std::uint32_t index = 0;
};

// Populations driven by a shared schedule: every step applies the same
// ordered index pair and the same uniform variate to each of them.
struct CoupledRun {
  ProtocolParams params;
  std::vector<Population> pops;
  // effective color per agent: the state's color for non-neutral agents, the
  // last strong color (default X) once neutral
  std::vector<std::vector<Color>> display;

  // u as given; v = u with baselines replaced by N; w = u with non-baselines
  // replaced by N.
  static CoupledRun split_construction(Population u);
  static CoupledRun of_populations(std::vector<Population> pops);
};

struct CouplingReport {
  std::uint64_t steps_run = 0;
  std::uint64_t checks_run = 0;
  std::uint64_t total_violations = 0;
  std::vector<CouplingViolation> violations;  // first kMaxRecorded only
  static constexpr std::size_t kMaxRecorded = 256;
};

// Steps all populations under the shared schedule for total_steps, asserting
// the selected properties over every agent index each check_every steps (and
// once before stepping; an initial violation is rejected with the offending
// index).
CouplingReport run_coupled(CoupledRun& run, const std::vector<CouplingProperty>& properties,
                           std::uint64_t total_steps, SplitRng& rng,
                           std::uint64_t check_every = 1);

enum class ResetInit : std::uint8_t { AllNeutral, AllLevelOne, ArbitraryNoBaselines };

struct ResetResult {
  std::uint64_t steps_run = 0;
  std::optional<double> level_cap_ptime;    // first time no agent has level < s
  std::optional<double> all_neutral_ptime;  // first time every agent is N
};

// Baseline-free decay experiment: runs until the population is all-N (after
// which it is frozen) or the horizon expires.
ResetResult reset_experiment(const ProtocolParams& params, ResetInit init,
                             double horizon_ptime, SplitRng& rng);

}  // namespace popcomp
