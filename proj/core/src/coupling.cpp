#include "popcomp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace popcomp {

namespace {

std::vector<Color> initial_display(const Population& pop) {
  std::vector<Color> d(pop.size(), Color::X);
  for (std::uint64_t i = 0; i < pop.size(); ++i) {
    const auto& a = pop.agent(i);
    if (!a.is_neutral()) d[i] = state_color(a);
  }
  return d;
}

void check_coupled_params(const ProtocolParams& params) {
  if (params.counter_enabled())
    throw ConfigError("coupled runs do not support the counter variant");
  if (params.generic_leak)
    throw ConfigError("coupled runs do not support generic leaks");
}

const char* property_name(CouplingProperty p) {
  switch (p) {
    case CouplingProperty::P1:
      return "P1";
    case CouplingProperty::P2:
      return "P2";
    case CouplingProperty::P3:
      return "P3";
  }
  return "?";
}

}  // namespace

CoupledRun CoupledRun::of_populations(std::vector<Population> pops) {
  if (pops.empty()) throw ConfigError("coupled run requires at least one population");
  check_coupled_params(pops.front().params());
  for (const auto& p : pops) {
    if (p.size() != pops.front().size())
      throw ConfigError("coupled populations must have identical sizes");
  }
  CoupledRun run;
  run.params = pops.front().params();
  for (const auto& p : pops) run.display.push_back(initial_display(p));
  run.pops = std::move(pops);
  return run;
}

CoupledRun CoupledRun::split_construction(Population u) {
  check_coupled_params(u.params());
  Population v(u.params());
  Population w(u.params());
  for (std::uint64_t i = 0; i < u.size(); ++i) {
    const AgentState& a = u.agent(i);
    if (a.is_baseline()) {
      w.assign(i, a);
    } else {
      v.assign(i, a);
    }
  }
  std::vector<Population> pops;
  pops.push_back(std::move(u));
  pops.push_back(std::move(v));
  pops.push_back(std::move(w));
  return of_populations(std::move(pops));
}

namespace {

struct Checker {
  const CoupledRun& run;
  const std::vector<CouplingProperty>& properties;

  // returns the violated property at index i, if any
  std::optional<CouplingProperty> check_index(std::uint32_t i) const {
    const int lu = level_of(run.pops[0].agent(i));
    for (const auto prop : properties) {
      switch (prop) {
        case CouplingProperty::P1: {
          for (std::size_t k = 1; k < run.pops.size(); ++k) {
            if (lu > level_of(run.pops[k].agent(i))) return prop;
          }
          break;
        }
        case CouplingProperty::P2: {
          const int lv = level_of(run.pops[1].agent(i));
          const int lw = level_of(run.pops[2].agent(i));
          if (lu != std::min(lv, lw)) return prop;
          break;
        }
        case CouplingProperty::P3: {
          // Levels as in P2, plus color agreement with the population that
          // attains the minimum: u matches v (w) wherever v (w) is strictly
          // lower, and matches one of them where they tie. Neutral agents
          // compare by their last strong color (default X). An unconditional
          // color-equality-at-equal-levels reading is not preserved by the
          // dynamics: a tie inside u can resolve against one of two strict
          // attainers of opposite colors.
          const int lv = level_of(run.pops[1].agent(i));
          const int lw = level_of(run.pops[2].agent(i));
          if (lu != std::min(lv, lw)) return prop;
          const Color du = run.display[0][i];
          const Color dv = run.display[1][i];
          const Color dw = run.display[2][i];
          if (lv < lw && du != dv) return prop;
          if (lw < lv && du != dw) return prop;
          if (lv == lw && du != dv && du != dw) return prop;
          break;
        }
      }
    }
    return std::nullopt;
  }
};

}  // namespace

CouplingReport run_coupled(CoupledRun& run, const std::vector<CouplingProperty>& properties,
                           std::uint64_t total_steps, SplitRng& rng,
                           std::uint64_t check_every) {
  if (check_every == 0) check_every = 1;
  const bool needs_three = std::any_of(properties.begin(), properties.end(), [](auto p) {
    return p != CouplingProperty::P1;
  });
  if (run.pops.empty() || (needs_three && run.pops.size() != 3))
    throw ConfigError("P2/P3 require exactly three coupled populations");
  if (run.pops.size() < 2) throw ConfigError("coupling requires at least two populations");

  const std::uint64_t n = run.pops.front().size();
  Checker checker{run, properties};

  for (std::uint32_t i = 0; i < n; ++i) {
    if (auto bad = checker.check_index(i)) {
      throw ConfigError("initial configuration violates " +
                        std::string(property_name(*bad)) + " at index " + std::to_string(i));
    }
  }

  CouplingReport report;
  std::uint64_t until_check = check_every;
  for (std::uint64_t t = 0; t < total_steps; ++t) {
    const auto [i, j] = rng.ordered_pair(n);
    const double u01 = rng.next_unit();  // shared by every population
    for (std::size_t k = 0; k < run.pops.size(); ++k) {
      Population& pop = run.pops[k];
      const InteractionResult res = transition(pop.agent(i), pop.agent(j), run.params, u01);
      pop.assign(i, res.first);
      pop.assign(j, res.second);
      pop.steps += 1;
      if (!res.first.is_neutral()) run.display[k][i] = state_color(res.first);
      if (!res.second.is_neutral()) run.display[k][j] = state_color(res.second);
    }
    report.steps_run += 1;
    if (--until_check == 0) {
      until_check = check_every;
      report.checks_run += 1;
      for (std::uint32_t idx = 0; idx < n; ++idx) {
        if (auto bad = checker.check_index(idx)) {
          report.total_violations += 1;
          if (report.violations.size() < CouplingReport::kMaxRecorded)
            report.violations.push_back({t + 1, *bad, idx});
        }
      }
    }
  }
  return report;
}

ResetResult reset_experiment(const ProtocolParams& params, ResetInit init,
                             double horizon_ptime, SplitRng& rng) {
  if (params.generic_leak)
    throw ConfigError("reset experiments do not support generic leaks");
  Population pop = [&] {
    switch (init) {
      case ResetInit::AllNeutral:
        return make_initial(params, 0, 0, RestPolicy::AllNeutral, rng);
      case ResetInit::ArbitraryNoBaselines:
        return make_initial(params, 0, 0, RestPolicy::Arbitrary, rng);
      case ResetInit::AllLevelOne: {
        Population p = make_initial(params, 0, 0, RestPolicy::AllNeutral, rng);
        for (std::uint64_t i = 0; i < p.size(); ++i)
          p.assign(i, AgentState::strong(Color::X, 1));
        return p;
      }
    }
    throw ContractError("unknown reset init");
  }();

  const auto horizon_steps = static_cast<std::uint64_t>(
      std::ceil(horizon_ptime * static_cast<double>(params.n)));
  ResetResult result;
  for (;;) {
    const double ptime = static_cast<double>(pop.steps) / static_cast<double>(params.n);
    if (!result.level_cap_ptime && pop.below_cap() == 0) result.level_cap_ptime = ptime;
    if (!result.all_neutral_ptime && pop.neutral_count() == pop.size()) {
      result.all_neutral_ptime = ptime;
      break;  // no baselines: an all-N population is frozen
    }
    if (pop.steps >= horizon_steps) break;
    step(pop, rng);
  }
  result.steps_run = pop.steps;
  return result;
}

}  // namespace popcomp
