#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "popcomp/protocol.hpp"
#include "popcomp/rng.hpp"

namespace popcomp {

enum class RestPolicy : std::uint8_t { AllNeutral, Arbitrary };

// Per-level aggregate view of a configuration.
struct LevelCounts {
  std::uint64_t baseline_x = 0;
  std::uint64_t baseline_y = 0;
  std::uint64_t neutral = 0;
  std::vector<std::uint64_t> x;  // index 1..s (index 0 unused)
  std::vector<std::uint64_t> y;
  std::uint64_t out_x = 0;
  std::uint64_t out_y = 0;
  std::uint64_t out_undecided = 0;
};

// n agents plus an incrementally maintained histogram over the (dense) state
// space. All mutation funnels through assign() so the counts, the cap/neutral
// tallies and the per-agent counter peaks never drift from the agent array.
class Population {
 public:
  explicit Population(ProtocolParams params);

  const ProtocolParams& params() const { return params_; }
  std::uint64_t size() const { return params_.n; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const AgentState& agent(std::size_t i) const { return agents_[i]; }

  std::uint64_t steps = 0;
  std::uint64_t leak_events = 0;

  void assign(std::size_t i, const AgentState& next) {
    const AgentState prev = agents_[i];
    if (prev == next) return;
    counts_[state_index(prev)] -= 1;
    counts_[state_index(next)] += 1;
    neutral_count_ += std::uint64_t(next.is_neutral()) - std::uint64_t(prev.is_neutral());
    below_cap_ += std::uint64_t(level_of(next) < params_.s) -
                  std::uint64_t(level_of(prev) < params_.s);
    agents_[i] = next;
    if (!counter_peak_.empty() && next.counter > counter_peak_[i])
      counter_peak_[i] = next.counter;
  }

  std::size_t state_index(const AgentState& a) const {
    std::size_t base;
    switch (a.role) {
      case Role::BaselineX:
        base = 0;
        break;
      case Role::BaselineY:
        base = 1;
        break;
      case Role::Neutral:
        base = 2;
        break;
      default:
        base = 2 + a.level + (a.color == Color::Y ? params_.s : 0);
        break;
    }
    return counter_span_ == 1 ? base
                              : base * counter_span_ + (a.counter + params_.m);
  }

  std::uint64_t count(const AgentState& a) const { return counts_[state_index(a)]; }
  std::uint64_t baseline_x() const { return count_base(0); }
  std::uint64_t baseline_y() const { return count_base(1); }
  std::uint64_t neutral_count() const { return neutral_count_; }
  // agents with level(u) < s (baselines included; Neutral is level infinity)
  std::uint64_t below_cap() const { return below_cap_; }
  std::uint64_t strong_count(Color c, int level) const {
    return count_base(2 + level + (c == Color::Y ? params_.s : 0));
  }

  LevelCounts aggregate() const;
  const std::vector<std::int8_t>& counter_peaks() const { return counter_peak_; }

  // Full recount of the histogram; throws ContractError on any drift.
  void verify_counts() const;

 private:
  std::uint64_t count_base(std::size_t base) const {
    if (counter_span_ == 1) return counts_[base];
    std::uint64_t total = 0;
    for (int k = 0; k < counter_span_; ++k) total += counts_[base * counter_span_ + k];
    return total;
  }

  ProtocolParams params_;
  int counter_span_;
  std::vector<AgentState> agents_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t neutral_count_ = 0;
  std::uint64_t below_cap_ = 0;
  std::vector<std::int8_t> counter_peak_;  // counter variant only

  friend Population make_initial(const ProtocolParams&, std::uint64_t, std::uint64_t,
                                 RestPolicy, SplitRng&);
};

// Exactly x0 BaselineX and y0 BaselineY agents; the rest are Neutral or
// seeded uniformly over valid non-baseline states. Counters start at 0 under
// AllNeutral and uniform in [-m, m] under Arbitrary.
Population make_initial(const ProtocolParams& params, std::uint64_t x0, std::uint64_t y0,
                        RestPolicy rest_policy, SplitRng& rng);

// Dynamic-input switch: grows a baseline by turning uniformly chosen
// non-baseline agents into it, shrinks it by turning uniformly chosen members
// neutral (counters preserved). Selections are made against the pre-switch
// population.
void apply_switch(Population& pop, std::uint64_t new_x0, std::uint64_t new_y0, SplitRng& rng);

// Applies one generic leak rewrite; returns false when no eligible agent
// exists. Baselines are catalytic and never touched.
bool apply_leak_policy(Population& pop, const GenericLeakSpec& leak, SplitRng& rng);

}  // namespace popcomp
