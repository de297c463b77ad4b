#include "popcomp/population.hpp"

#include <algorithm>

namespace popcomp {

Population::Population(ProtocolParams params)
    : params_(std::move(params)),
      counter_span_(params_.counter_enabled() ? 2 * params_.m + 1 : 1) {
  params_.validate();
  agents_.assign(params_.n, AgentState::neutral());
  counts_.assign(static_cast<std::size_t>(2 * params_.s + 3) * counter_span_, 0);
  counts_[state_index(AgentState::neutral())] = params_.n;
  neutral_count_ = params_.n;
  below_cap_ = 0;
  if (params_.counter_enabled()) counter_peak_.assign(params_.n, 0);
}

LevelCounts Population::aggregate() const {
  LevelCounts out;
  out.x.assign(params_.s + 1, 0);
  out.y.assign(params_.s + 1, 0);
  out.baseline_x = baseline_x();
  out.baseline_y = baseline_y();
  out.neutral = neutral_count_;
  for (int l = 1; l <= params_.s; ++l) {
    out.x[l] = strong_count(Color::X, l);
    out.y[l] = strong_count(Color::Y, l);
  }
  if (params_.counter_enabled()) {
    const std::size_t bases = 2 * params_.s + 3;
    for (std::size_t b = 0; b < bases; ++b) {
      for (int k = 0; k < counter_span_; ++k) {
        const std::uint64_t c = counts_[b * counter_span_ + k];
        if (c == 0) continue;
        const int counter = k - params_.m;
        if (counter > 0)
          out.out_x += c;
        else if (counter < 0)
          out.out_y += c;
        else
          out.out_undecided += c;
      }
    }
  } else {
    auto tally = [&](const AgentState& st, std::uint64_t c) {
      switch (output_of(st, params_.variant)) {
        case Output::X:
          out.out_x += c;
          break;
        case Output::Y:
          out.out_y += c;
          break;
        case Output::Undecided:
          out.out_undecided += c;
          break;
      }
    };
    tally(AgentState::baseline(Color::X), out.baseline_x);
    tally(AgentState::baseline(Color::Y), out.baseline_y);
    tally(AgentState::neutral(), out.neutral);
    for (int l = 1; l <= params_.s; ++l) {
      tally(AgentState::strong(Color::X, l), out.x[l]);
      tally(AgentState::strong(Color::Y, l), out.y[l]);
    }
  }
  return out;
}

void Population::verify_counts() const {
  std::vector<std::uint64_t> fresh(counts_.size(), 0);
  std::uint64_t neutral = 0;
  std::uint64_t below = 0;
  for (const auto& a : agents_) {
    fresh[state_index(a)] += 1;
    neutral += a.is_neutral();
    below += level_of(a) < params_.s;
  }
  if (fresh != counts_ || neutral != neutral_count_ || below != below_cap_)
    throw ContractError("population histogram drifted from the agent array");
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  if (total != params_.n) throw ContractError("population histogram does not sum to n");
}

Population make_initial(const ProtocolParams& params, std::uint64_t x0, std::uint64_t y0,
                        RestPolicy rest_policy, SplitRng& rng) {
  if (x0 > params.n || y0 > params.n - x0)
    throw ConfigError("baseline counts x0 + y0 exceed the population size");
  Population pop(params);
  std::uint64_t i = 0;
  for (std::uint64_t k = 0; k < x0; ++k, ++i)
    pop.assign(i, AgentState::baseline(Color::X));
  for (std::uint64_t k = 0; k < y0; ++k, ++i)
    pop.assign(i, AgentState::baseline(Color::Y));

  const bool counters = params.counter_enabled();
  if (rest_policy == RestPolicy::Arbitrary) {
    // uniform over the valid non-baseline states: Neutral plus every strong
    // level of every color present in the variant
    const std::uint64_t strong_choices =
        params.detection_family() ? params.s : 2 * params.s;
    for (; i < params.n; ++i) {
      const std::uint64_t pick = rng.bounded(strong_choices + 1);
      AgentState st;
      if (pick == strong_choices) {
        st = AgentState::neutral();
      } else if (pick < static_cast<std::uint64_t>(params.s)) {
        st = AgentState::strong(Color::X, static_cast<int>(pick) + 1);
      } else {
        st = AgentState::strong(Color::Y, static_cast<int>(pick) - params.s + 1);
      }
      if (counters)
        st.counter = static_cast<std::int8_t>(
            static_cast<int>(rng.bounded(2 * params.m + 1)) - params.m);
      pop.assign(i, st);
    }
    if (counters) {
      // baselines carry counters too
      for (std::uint64_t k = 0; k < x0 + y0; ++k) {
        AgentState st = pop.agent(k);
        st.counter = static_cast<std::int8_t>(
            static_cast<int>(rng.bounded(2 * params.m + 1)) - params.m);
        pop.assign(k, st);
      }
    }
  }
  if (params.counter_enabled()) {
    // peaks reflect the initial counters, not the mutation history above
    auto& peaks = pop.counter_peak_;
    for (std::uint64_t k = 0; k < params.n; ++k) peaks[k] = pop.agent(k).counter;
  }
  return pop;
}

namespace {

// k distinct uniform picks from `candidates` via a partial Fisher-Yates pass.
std::vector<std::uint32_t> pick_distinct(std::vector<std::uint32_t>& candidates,
                                         std::uint64_t k, SplitRng& rng) {
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.bounded(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  return {candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace

void apply_switch(Population& pop, std::uint64_t new_x0, std::uint64_t new_y0,
                  SplitRng& rng) {
  if (new_x0 > pop.size() || new_y0 > pop.size() - new_x0)
    throw ConfigError("switch baseline counts exceed the population size");
  const std::uint64_t cur_x = pop.baseline_x();
  const std::uint64_t cur_y = pop.baseline_y();
  const std::int64_t dx = static_cast<std::int64_t>(new_x0) - static_cast<std::int64_t>(cur_x);
  const std::int64_t dy = static_cast<std::int64_t>(new_y0) - static_cast<std::int64_t>(cur_y);
  if (dx == 0 && dy == 0) return;

  std::vector<std::uint32_t> x_members, y_members, others;
  for (std::uint32_t i = 0; i < pop.size(); ++i) {
    switch (pop.agent(i).role) {
      case Role::BaselineX:
        x_members.push_back(i);
        break;
      case Role::BaselineY:
        y_members.push_back(i);
        break;
      default:
        others.push_back(i);
        break;
    }
  }
  const std::uint64_t grow = (dx > 0 ? dx : 0) + (dy > 0 ? dy : 0);
  if (grow > others.size())
    throw ConfigError("not enough non-baseline agents to grow the baselines");

  std::vector<std::uint32_t> to_neutral;
  if (dx < 0) {
    auto picked = pick_distinct(x_members, static_cast<std::uint64_t>(-dx), rng);
    to_neutral.insert(to_neutral.end(), picked.begin(), picked.end());
  }
  if (dy < 0) {
    auto picked = pick_distinct(y_members, static_cast<std::uint64_t>(-dy), rng);
    to_neutral.insert(to_neutral.end(), picked.begin(), picked.end());
  }
  std::vector<std::uint32_t> recruits;
  if (grow > 0) recruits = pick_distinct(others, grow, rng);

  for (auto i : to_neutral) {
    AgentState st = AgentState::neutral().with_counter(pop.agent(i).counter);
    pop.assign(i, st);
  }
  std::size_t r = 0;
  for (std::int64_t k = 0; k < dx; ++k, ++r)
    pop.assign(recruits[r],
               AgentState::baseline(Color::X).with_counter(pop.agent(recruits[r]).counter));
  for (std::int64_t k = 0; k < dy; ++k, ++r)
    pop.assign(recruits[r],
               AgentState::baseline(Color::Y).with_counter(pop.agent(recruits[r]).counter));
}

namespace {

// Rejection sampling over agent indices; caller guarantees count > 0.
template <typename Pred>
std::uint32_t pick_matching(const Population& pop, SplitRng& rng, Pred&& pred) {
  for (;;) {
    const auto i = static_cast<std::uint32_t>(rng.bounded(pop.size()));
    if (pred(pop.agent(i))) return i;
  }
}

}  // namespace

bool apply_leak_policy(Population& pop, const GenericLeakSpec& leak, SplitRng& rng) {
  const auto& P = pop.params();
  switch (leak.policy) {
    case GenericLeakSpec::Policy::FixedRewrite: {
      const AgentState from = leak.from.with_counter(0);
      std::uint64_t avail = 0;
      if (from.is_strong())
        avail = pop.strong_count(state_color(from), from.level);
      else
        avail = pop.neutral_count();
      if (avail == 0) return false;
      const auto i = pick_matching(pop, rng, [&](const AgentState& a) {
        return a.with_counter(0) == from;
      });
      pop.assign(i, leak.to.with_counter(pop.agent(i).counter));
      return true;
    }
    case GenericLeakSpec::Policy::WorstCaseMajorityFlip: {
      // flip a first-level strong of the currently larger baseline
      const Color major = pop.baseline_x() >= pop.baseline_y() ? Color::X : Color::Y;
      const Color minor = major == Color::X ? Color::Y : Color::X;
      if (pop.strong_count(major, 1) == 0) return false;
      const auto i = pick_matching(pop, rng, [&](const AgentState& a) {
        return a.is_strong() && a.level == 1 && a.color == major;
      });
      pop.assign(i, AgentState::strong(minor, 1).with_counter(pop.agent(i).counter));
      return true;
    }
    case GenericLeakSpec::Policy::RandomNonCatalytic: {
      const std::uint64_t eligible = pop.size() - pop.baseline_x() - pop.baseline_y();
      if (eligible == 0) return false;
      const auto i =
          pick_matching(pop, rng, [](const AgentState& a) { return !a.is_baseline(); });
      const std::uint64_t strong_choices = P.detection_family() ? P.s : 2 * P.s;
      const std::uint64_t pick = rng.bounded(strong_choices + 1);
      AgentState st;
      if (pick == strong_choices) {
        st = AgentState::neutral();
      } else if (pick < static_cast<std::uint64_t>(P.s)) {
        st = AgentState::strong(Color::X, static_cast<int>(pick) + 1);
      } else {
        st = AgentState::strong(Color::Y, static_cast<int>(pick) - P.s + 1);
      }
      pop.assign(i, st.with_counter(pop.agent(i).counter));
      return true;
    }
  }
  return false;
}

}  // namespace popcomp
