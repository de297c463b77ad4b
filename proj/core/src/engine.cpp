#include "popcomp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace popcomp {

std::uint64_t Snapshot::strong_x() const {
  std::uint64_t t = 0;
  for (std::size_t l = 1; l < x.size(); ++l) t += x[l];
  return t;
}

std::uint64_t Snapshot::strong_y() const {
  std::uint64_t t = 0;
  for (std::size_t l = 1; l < y.size(); ++l) t += y[l];
  return t;
}

std::uint64_t Snapshot::cumulative_r(int level) const {
  std::uint64_t t = baseline_x + baseline_y;
  for (int l = 1; l <= level && l < static_cast<int>(x.size()); ++l) t += x[l] + y[l];
  return t;
}

void Trace::write_csv(std::ostream& os) const {
  std::string header = "step,ptime,x0,y0,neutral";
  for (int l = 1; l <= s; ++l) header += ",x" + std::to_string(l);
  for (int l = 1; l <= s; ++l) header += ",y" + std::to_string(l);
  header += ",out_x,out_y,out_undecided,leaks\n";
  os << header;
  char buf[64];
  for (const auto& snap : snapshots) {
    os << snap.step;
    std::snprintf(buf, sizeof(buf), ",%.3f", snap.ptime);
    os << buf << ',' << snap.baseline_x << ',' << snap.baseline_y << ',' << snap.neutral;
    for (int l = 1; l <= s; ++l) os << ',' << snap.x[l];
    for (int l = 1; l <= s; ++l) os << ',' << snap.y[l];
    os << ',' << snap.out_x << ',' << snap.out_y << ',' << snap.out_undecided << ','
       << snap.leaks << '\n';
  }
}

std::string Trace::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

InteractionRecord step(Population& pop, SplitRng& rng) {
  const auto& P = pop.params();
  auto [i, j] = rng.ordered_pair(pop.size());
  InteractionRecord rec{i, j, false, false};
  if (P.generic_leak && rng.next_unit() < P.generic_leak->rate) {
    rec.generic_leak = true;
    if (apply_leak_policy(pop, *P.generic_leak, rng)) pop.leak_events += 1;
  } else {
    const double u = P.consumes_variate() ? rng.next_unit() : 0.0;
    const InteractionResult res = transition(pop.agent(i), pop.agent(j), P, u);
    rec.structured_leak = res.leaked;
    if (res.leaked) pop.leak_events += 1;
    pop.assign(i, res.first);
    pop.assign(j, res.second);
  }
  pop.steps += 1;
  return rec;
}

namespace {

Snapshot take_snapshot(const Population& pop) {
  Snapshot snap;
  snap.step = pop.steps;
  snap.ptime = static_cast<double>(pop.steps) / static_cast<double>(pop.size());
  LevelCounts agg = pop.aggregate();
  snap.baseline_x = agg.baseline_x;
  snap.baseline_y = agg.baseline_y;
  snap.neutral = agg.neutral;
  snap.x = std::move(agg.x);
  snap.y = std::move(agg.y);
  snap.out_x = agg.out_x;
  snap.out_y = agg.out_y;
  snap.out_undecided = agg.out_undecided;
  snap.leaks = pop.leak_events;
  return snap;
}

}  // namespace

Trace run(Population& pop, std::uint64_t total_steps, std::uint64_t cadence,
          std::vector<SwitchEvent> switches, SplitRng& rng) {
  const auto& P = pop.params();
  if (cadence == 0) cadence = P.n;

  std::stable_sort(switches.begin(), switches.end(),
                   [](const SwitchEvent& a, const SwitchEvent& b) {
                     return a.at_ptime < b.at_ptime;
                   });
  std::vector<std::uint64_t> thresholds(switches.size());
  for (std::size_t k = 0; k < switches.size(); ++k) {
    thresholds[k] =
        static_cast<std::uint64_t>(std::ceil(switches[k].at_ptime * static_cast<double>(P.n)));
  }

  Trace trace;
  trace.n = P.n;
  trace.s = P.s;
  trace.variant = P.variant;
  trace.cadence = cadence;

  const std::uint64_t end = pop.steps + total_steps;
  std::size_t next_switch = 0;
  std::uint64_t until_snap = pop.steps % cadence == 0 ? 0 : cadence - pop.steps % cadence;
#ifndef NDEBUG
  std::uint64_t until_recount = cadence;
#endif

  for (;;) {
    while (next_switch < switches.size() && pop.steps >= thresholds[next_switch]) {
      const auto& sw = switches[next_switch];
      apply_switch(pop, sw.x0, sw.y0, rng);
      trace.events.push_back({pop.steps, sw.at_ptime, sw.x0, sw.y0});
      ++next_switch;
    }
    const double ptime = static_cast<double>(pop.steps) / static_cast<double>(P.n);
    if (!trace.first_all_neutral_ptime && pop.neutral_count() == P.n)
      trace.first_all_neutral_ptime = ptime;
    if (!trace.first_level_cap_ptime && pop.below_cap() == 0)
      trace.first_level_cap_ptime = ptime;
    if (until_snap == 0 || pop.steps == end) {
      trace.snapshots.push_back(take_snapshot(pop));
      if (until_snap == 0) until_snap = cadence;
    }
    if (pop.steps == end) break;
    step(pop, rng);
    --until_snap;
#ifndef NDEBUG
    if (--until_recount == 0) {
      pop.verify_counts();
      until_recount = cadence;
    }
#endif
  }
  return trace;
}

}  // namespace popcomp
