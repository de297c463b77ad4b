#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "popcomp/engine.hpp"
#include "popcomp/steady_state.hpp"

namespace popcomp {

// --- snapshot predicates (comparison against a trace is hold-through-end) ---

using SnapshotPredicate = std::function<bool(const Snapshot&)>;

// sum X_1..s / sum Y_1..s >= theta (false when both sums are zero)
SnapshotPredicate ratio_at_least(double theta);
// strong-opinion majority matches the stated truth (strict)
SnapshotPredicate majority_correct(Color truth);
SnapshotPredicate all_neutral(std::uint64_t n);
// non-neutral fraction >= theta
SnapshotPredicate strong_fraction_at_least(double theta, std::uint64_t n);

// Parallel time of the first snapshot from which the predicate holds through
// the end of the trace (stabilization, not first touch); nullopt when never.
std::optional<double> convergence_time(const Trace& trace, const SnapshotPredicate& pred);

// --- tail-window statistics ---

// Mean per-level counts over snapshots with ptime >= from_ptime.
struct TailMeans {
  double baseline_x = 0.0;
  double baseline_y = 0.0;
  double neutral = 0.0;
  std::vector<double> x;  // index 0..s (0 = baselines)
  std::vector<double> y;
  std::vector<double> r;  // cumulative, baselines included
  std::size_t snapshots = 0;
};
TailMeans tail_means(const Trace& trace, double from_ptime);

double end_strong_ratio(const Trace& trace);  // +inf when Y empty and X present

// Tail-window mean cumulative-count ratios |R_{i+1}|/|R_i|, index i = 0..s-1.
std::vector<double> level_growth_profile(const Trace& trace, double from_ptime);

// --- concentration against a steady-state prediction ---

struct ConcentrationEntry {
  int level = 0;
  double predicted = 0.0;  // agent count
  double empirical = 0.0;
  double rel_error = 0.0;
  bool below_resolution = false;
};

struct ConcentrationReport {
  std::vector<ConcentrationEntry> r;  // levels 0..s
  std::vector<ConcentrationEntry> x;  // levels 1..s
  std::vector<ConcentrationEntry> y;
  double resolution_floor = 50.0;
};

ConcentrationReport concentration_report(const Trace& trace,
                                         const SteadyStatePrediction& prediction,
                                         double window_from_ptime,
                                         double resolution_floor = 50.0);

// --- output quality ---

struct OutputFractions {
  double wrong = 0.0;
  double correct = 0.0;
  double undecided = 0.0;
};

OutputFractions output_fractions(const Snapshot& snap, Color truth, std::uint64_t n);
OutputFractions output_fractions(const Population& pop, Color truth);

// Fraction of agents whose counter reached the target at some point.
double counter_hit_fraction(const Population& pop, int target);

// Sum over agents of d^-level; baselines contribute 1, Neutral contributes 0.
double potential(const Population& pop, double d);
double potential(const Snapshot& snap, double d);

}  // namespace popcomp
