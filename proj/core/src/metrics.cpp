#include "popcomp/metrics.hpp"

#include <cmath>
#include <limits>

namespace popcomp {

SnapshotPredicate ratio_at_least(double theta) {
  return [theta](const Snapshot& s) {
    const double x = static_cast<double>(s.strong_x());
    const double y = static_cast<double>(s.strong_y());
    if (y == 0.0) return x > 0.0;
    return x / y >= theta;
  };
}

SnapshotPredicate majority_correct(Color truth) {
  return [truth](const Snapshot& s) {
    const auto x = s.strong_x();
    const auto y = s.strong_y();
    return truth == Color::X ? x > y : y > x;
  };
}

SnapshotPredicate all_neutral(std::uint64_t n) {
  return [n](const Snapshot& s) { return s.neutral == n; };
}

SnapshotPredicate strong_fraction_at_least(double theta, std::uint64_t n) {
  return [theta, n](const Snapshot& s) {
    return static_cast<double>(n - s.neutral) >= theta * static_cast<double>(n);
  };
}

std::optional<double> convergence_time(const Trace& trace, const SnapshotPredicate& pred) {
  std::optional<double> held_since;
  for (const auto& snap : trace.snapshots) {
    if (pred(snap)) {
      if (!held_since) held_since = snap.ptime;
    } else {
      held_since.reset();
    }
  }
  return held_since;
}

TailMeans tail_means(const Trace& trace, double from_ptime) {
  TailMeans out;
  out.x.assign(trace.s + 1, 0.0);
  out.y.assign(trace.s + 1, 0.0);
  out.r.assign(trace.s + 1, 0.0);
  for (const auto& snap : trace.snapshots) {
    if (snap.ptime < from_ptime) continue;
    out.snapshots += 1;
    out.baseline_x += static_cast<double>(snap.baseline_x);
    out.baseline_y += static_cast<double>(snap.baseline_y);
    out.neutral += static_cast<double>(snap.neutral);
    for (int l = 1; l <= trace.s; ++l) {
      out.x[l] += static_cast<double>(snap.x[l]);
      out.y[l] += static_cast<double>(snap.y[l]);
    }
  }
  if (out.snapshots == 0) return out;
  const auto k = static_cast<double>(out.snapshots);
  out.baseline_x /= k;
  out.baseline_y /= k;
  out.neutral /= k;
  out.x[0] = out.baseline_x;
  out.y[0] = out.baseline_y;
  for (int l = 1; l <= trace.s; ++l) {
    out.x[l] /= k;
    out.y[l] /= k;
  }
  out.r[0] = out.baseline_x + out.baseline_y;
  for (int l = 1; l <= trace.s; ++l) out.r[l] = out.r[l - 1] + out.x[l] + out.y[l];
  return out;
}

double end_strong_ratio(const Trace& trace) {
  if (trace.snapshots.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto& snap = trace.snapshots.back();
  const double x = static_cast<double>(snap.strong_x());
  const double y = static_cast<double>(snap.strong_y());
  if (y == 0.0)
    return x > 0.0 ? std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::quiet_NaN();
  return x / y;
}

std::vector<double> level_growth_profile(const Trace& trace, double from_ptime) {
  const TailMeans means = tail_means(trace, from_ptime);
  std::vector<double> ratios;
  ratios.reserve(trace.s);
  for (int l = 0; l < trace.s; ++l) {
    ratios.push_back(means.r[l] > 0.0 ? means.r[l + 1] / means.r[l]
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  return ratios;
}

ConcentrationReport concentration_report(const Trace& trace,
                                         const SteadyStatePrediction& prediction,
                                         double window_from_ptime, double resolution_floor) {
  ConcentrationReport report;
  report.resolution_floor = resolution_floor;
  const TailMeans means = tail_means(trace, window_from_ptime);
  const auto n = static_cast<double>(trace.n);
  const int levels = std::min<int>(trace.s, static_cast<int>(prediction.r_tilde.size()) - 1);

  auto entry = [&](int level, double predicted_frac, double empirical) {
    ConcentrationEntry e;
    e.level = level;
    e.predicted = predicted_frac * n;
    e.empirical = empirical;
    e.below_resolution = e.predicted < resolution_floor;
    e.rel_error = e.below_resolution ? std::numeric_limits<double>::quiet_NaN()
                                     : std::abs(empirical - e.predicted) / e.predicted;
    return e;
  };

  for (int l = 0; l <= levels; ++l)
    report.r.push_back(entry(l, prediction.r_tilde[l], means.r[l]));
  for (int l = 1; l <= levels; ++l) {
    report.x.push_back(entry(l, prediction.x_tilde[l], means.x[l]));
    report.y.push_back(entry(l, prediction.y_tilde[l], means.y[l]));
  }
  return report;
}

namespace {

OutputFractions fractions_from_tallies(std::uint64_t out_x, std::uint64_t out_y,
                                       std::uint64_t undecided, Color truth,
                                       std::uint64_t n) {
  OutputFractions f;
  const auto total = static_cast<double>(n);
  const std::uint64_t correct = truth == Color::X ? out_x : out_y;
  const std::uint64_t wrong = truth == Color::X ? out_y : out_x;
  f.correct = static_cast<double>(correct) / total;
  f.wrong = static_cast<double>(wrong) / total;
  f.undecided = static_cast<double>(undecided) / total;
  return f;
}

}  // namespace

OutputFractions output_fractions(const Snapshot& snap, Color truth, std::uint64_t n) {
  return fractions_from_tallies(snap.out_x, snap.out_y, snap.out_undecided, truth, n);
}

OutputFractions output_fractions(const Population& pop, Color truth) {
  const LevelCounts agg = pop.aggregate();
  return fractions_from_tallies(agg.out_x, agg.out_y, agg.out_undecided, truth, pop.size());
}

double counter_hit_fraction(const Population& pop, int target) {
  const auto& peaks = pop.counter_peaks();
  if (peaks.empty()) throw ConfigError("counter peaks require the counter variant");
  std::uint64_t hits = 0;
  for (auto v : peaks) hits += v >= target;
  return static_cast<double>(hits) / static_cast<double>(pop.size());
}

double potential(const Population& pop, double d) {
  if (!(d > 1.0)) throw ConfigError("potential base d must exceed 1");
  const LevelCounts agg = pop.aggregate();
  double phi = static_cast<double>(agg.baseline_x + agg.baseline_y);
  for (std::size_t l = 1; l < agg.x.size(); ++l)
    phi += static_cast<double>(agg.x[l] + agg.y[l]) * std::pow(d, -static_cast<double>(l));
  return phi;
}

double potential(const Snapshot& snap, double d) {
  if (!(d > 1.0)) throw ConfigError("potential base d must exceed 1");
  double phi = static_cast<double>(snap.baseline_x + snap.baseline_y);
  for (std::size_t l = 1; l < snap.x.size(); ++l)
    phi += static_cast<double>(snap.x[l] + snap.y[l]) * std::pow(d, -static_cast<double>(l));
  return phi;
}

}  // namespace popcomp
