#pragma once

#include <cstddef>
#include <vector>

#include "popcomp/protocol.hpp"

namespace popcomp {

// One outcome of an ordered reaction. Branches are listed in variate order:
// a uniform draw u selects the first branch whose cumulative probability
// exceeds u.
struct OracleBranch {
  double prob = 1.0;
  AgentState first;
  AgentState second;
  bool leaked = false;
};

using OracleDistribution = std::vector<OracleBranch>;

// Exhaustive transition table transcribed reaction by reaction from each
// variant's rule lists, with two declared closures: rules apply irrespective of reagent
// order (ties at equal levels go to the first reagent, i.e. the direct
// orientation of a rule beats its mirror), and a catalyst recruits a neutral
// partner to level 1. Built only for small state spaces (s <= 8, m <= 3);
// serves as the independent equivalence oracle for transition().
class RuleTable {
 public:
  explicit RuleTable(const ProtocolParams& params);

  const ProtocolParams& params() const { return params_; }

  // All valid states under the params, enumeration order fixed.
  const std::vector<AgentState>& states() const { return states_; }

  // Outcome distribution for the ordered pair (first, second).
  const OracleDistribution& lookup(const AgentState& first, const AgentState& second) const;

 private:
  struct Rule {
    AgentState l1, l2;
    OracleDistribution branches;
  };

  std::size_t base_index(const AgentState& a) const;
  void add(const AgentState& l1, const AgentState& l2, OracleDistribution branches);
  void build_base_table();

  ProtocolParams params_;
  std::vector<AgentState> states_;                // full states (with counters)
  std::vector<AgentState> base_states_;           // counter-free states
  std::vector<Rule> rules_;                       // transcribed rule lines, in order
  std::vector<OracleDistribution> table_;         // dense over base-state pairs
  std::vector<bool> filled_;
  mutable OracleDistribution scratch_;            // counter-adjusted lookups
};

}  // namespace popcomp
