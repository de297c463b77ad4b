// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Tolerances and configurations are pinned here, in code.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "oracle_check.hpp"
#include "popcomp/coupling.hpp"
#include "popcomp/metrics.hpp"
#include "popcomp/steady_state.hpp"
#include "popcomp/sweep.hpp"

using namespace popcomp;

namespace {

void report(int id, bool pass, const std::string& detail) {
  std::printf("[criterion %02d] %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// run `tasks` indexed jobs on a small worker pool (results land by index)
template <typename Fn>
void parallel_for(std::size_t tasks, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(
      tasks, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// per-level means over snapshots with ptime in [from, to)
std::vector<double> window_mean_r(const Trace& trace, double from, double to) {
  std::vector<double> r(trace.s + 1, 0.0);
  std::size_t k = 0;
  for (const auto& snap : trace.snapshots) {
    if (snap.ptime < from || snap.ptime >= to) continue;
    k += 1;
    double cum = static_cast<double>(snap.baseline_x + snap.baseline_y);
    r[0] += cum;
    for (int l = 1; l <= trace.s; ++l) {
      cum += static_cast<double>(snap.x[l] + snap.y[l]);
      r[l] += cum;
    }
  }
  if (k > 0)
    for (auto& v : r) v /= static_cast<double>(k);
  return r;
}

RunSpec main_spec(Variant variant, std::uint64_t seed) {
  RunSpec spec;
  spec.params = ProtocolParams::make(100000, variant);
  spec.x0 = 600;
  spec.y0 = 300;
  spec.parallel_time = 200.0;
  spec.window_fraction = 0.25;  // tail window: last 50 units
  spec.seed = seed;
  spec.replications = 20;
  return spec;
}

}  // namespace

TEST_CASE("criterion 01: rule-table oracle equivalence") {
  std::uint64_t pairs = 0, branches = 0, mismatches = 0;
  std::string first;
  auto probe = [&](const ProtocolParams& P) {
    const auto res = testsupport::check_oracle_equivalence(P);
    pairs += res.pairs;
    branches += res.branches;
    mismatches += res.mismatches;
    if (first.empty()) first = res.first_mismatch;
  };
  for (const int s : {2, 5, 8}) {
    probe(ProtocolParams::make(1000, Variant::Comparison, s));
    probe(ProtocolParams::make(1000, Variant::Detection, s));
    for (const double p : {0.5, 0.25})
      probe(ProtocolParams::make(1000, Variant::CoinDetection, s, std::nullopt, p));
    for (const double z : {0.125, 0.01}) {
      probe(ProtocolParams::make(1000, Variant::LeakFPDetection, s, std::nullopt, 1.0, z));
      probe(ProtocolParams::make(1000, Variant::LeakFNDetection, s, std::nullopt, 1.0, z));
    }
    for (const int m : {1, 2})
      probe(ProtocolParams::make(1000, Variant::CounterComparison, s, m));
  }
  const bool pass = mismatches == 0;
  report(1, pass,
         fmt("rule-table equivalence: %llu ordered pairs, %llu branches, %llu mismatches%s%s",
             (unsigned long long)pairs, (unsigned long long)branches,
             (unsigned long long)mismatches, first.empty() ? "" : "; first: ",
             first.c_str()));
  CHECK(pass);
}

TEST_CASE("criterion 02: predictor identities on the grid") {
  const std::vector<double> r0_grid = {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5};
  const std::vector<double> zeta_grid = {0.0, 1e-3, 1e-2};
  const int L = 64;
  double worst = 0.0;
  std::string worst_what = "none";
  auto track = [&](double err, const char* what) {
    if (err > worst) {
      worst = err;
      worst_what = what;
    }
  };

  for (const double r0 : r0_grid) {
    // closed form vs quad-precision squaring recursion
    const auto r = predict_r(r0, L);
    __float128 q = 1.0 - static_cast<__float128>(r0);
    for (int i = 1; i <= L; ++i) {
      q *= q;
      track(std::abs(r[i] - static_cast<double>(1.0 - q)), "recursion-vs-closed");
    }
    // level shares and proportionality
    const double x0 = 0.6 * r0, y0 = 0.4 * r0;
    const auto xy = predict_xy(x0, y0, L);
    for (int i = 1; i <= L; ++i) {
      track(std::abs(xy.x_tilde[i] + xy.y_tilde[i] - (r[i] - r[i - 1])), "level-share");
      const double tot = xy.x_tilde[i] + xy.y_tilde[i];
      if (tot > 0.0) track(std::abs(xy.x_tilde[i] / tot - x0 / r0), "proportionality");
    }
    for (const double zeta : zeta_grid) {
      const auto lo = predict_fn_leak(r0, zeta, L);
      const auto hi = predict_fp_leak(r0, zeta, L);
      for (int i = 0; i <= L; ++i) {
        track(std::max(0.0, lo[i] - r[i]), "sandwich-lower");
        track(std::max(0.0, r[i] - hi[i]), "sandwich-upper");
      }
      if (zeta == 0.0) {
        for (int i = 0; i <= L; ++i) {
          track(std::abs(hi[i] - r[i]), "fp-zeta0-reduction");
          track(std::abs(lo[i] - r[i]), "fn-zeta0-reduction");
        }
      }
    }
    // p' = 1 reduction, first-order envelope on the grid
    const auto coin = predict_coin(r0, 1.0, L);
    for (int i = 0; i <= L; ++i) {
      const double kx = std::ldexp(1.0, i) * r0;
      if (kx > 0.1) break;
      track(std::max(0.0, r[i] - coin[i]), "coin-below-base");
      track(std::max(0.0, coin[i] - r[i] - kx * kx), "coin-envelope");
    }
  }
  // p' = 1 reduction within 1e-12 where the small-occupancy regime makes the
  // forms equal to that precision
  for (const double r0 : {1e-9, 1e-8}) {
    const auto coin = predict_coin(r0, 1.0, L);
    const auto r = predict_r(r0, L);
    for (int i = 0; i <= L && std::ldexp(1.0, i) * r0 <= 1e-6; ++i)
      track(std::abs(coin[i] - r[i]), "coin-p1-reduction");
  }
  const bool pass = worst <= 1e-12;
  report(2, pass, fmt("predictor identities: worst residual %.3e (%s), limit 1e-12",
                      worst, worst_what.c_str()));
  CHECK(pass);
}

TEST_CASE("criterion 03: steady-state concentration") {
  RunSpec spec = main_spec(Variant::Comparison, 1003);
  const SweepSummary sum = replicate(spec);
  const auto pred = make_prediction(spec.params, spec.x0, spec.y0, spec.params.s);
  const double n = static_cast<double>(spec.params.n);

  double worst_r = 0.0, worst_x = 0.0;
  int levels_r = 0, levels_x = 0;
  for (int l = 1; l <= spec.params.s; ++l) {
    const double pr = pred.r_tilde[l] * n;
    if (pr >= 1e3) {
      levels_r += 1;
      worst_r = std::max(worst_r, std::abs(sum.tail_mean_r[l] - pr) / pr);
    }
    const double px = pred.x_tilde[l] * n;
    if (pr >= 1e3 && px >= 50.0) {
      levels_x += 1;
      worst_x = std::max(worst_x, std::abs(sum.tail_mean_x[l] - px) / px);
    }
  }
  const bool pass = worst_r <= 0.15 && worst_x <= 0.20;
  report(3, pass,
         fmt("concentration: 20 seeds, max |R| err %.3f over %d levels (limit 0.15), "
             "max |X| err %.3f over %d levels (limit 0.20)",
             worst_r, levels_r, worst_x, levels_x));
  CHECK(pass);
}

TEST_CASE("criterion 04: majority separation and stabilization") {
  RunSpec spec = main_spec(Variant::Comparison, 1004);
  spec.metrics = {{.name = "end_ratio"}, {.name = "stabilize_ratio", .theta = 1.5}};
  const SweepSummary sum = replicate(spec);
  int sep_ok = 0, time_ok = 0;
  for (const double v : sum.per_rep.at("end_ratio")) sep_ok += v >= 1.5;
  for (const double t : sum.per_rep.at("stabilize_ratio"))
    time_ok += std::isfinite(t) && t <= 100.0;
  const bool pass = sep_ok >= 19 && time_ok >= 19;
  report(4, pass,
         fmt("separation: end ratio >= 1.5 in %d/20 seeds, stabilized within 100 pt in "
             "%d/20 seeds (need 19)",
             sep_ok, time_ok));
  CHECK(pass);
}

TEST_CASE("criterion 05: dynamic switch recovery") {
  RunSpec spec = main_spec(Variant::Comparison, 1005);
  spec.parallel_time = 160.0;
  spec.switches = {{80.0, 300, 600}};
  const auto pred = make_prediction(spec.params, spec.x0, spec.y0, spec.params.s);
  const double n = static_cast<double>(spec.params.n);
  // mid levels: cumulative prediction below saturation yet resolvable
  std::vector<int> mid_levels;
  for (int l = 1; l < spec.params.s; ++l) {
    if (pred.r_tilde[l + 1] <= 0.3 && pred.r_tilde[l] * n >= 1e3) mid_levels.push_back(l);
  }

  std::vector<int> recovered(spec.replications, 0), growth_ok(spec.replications, 0);
  parallel_for(spec.replications, [&](std::size_t r) {
    RunResult res = run_spec(spec, SplitRng::substream(spec.seed, r));
    const auto t = convergence_time(res.trace, majority_correct(Color::Y));
    recovered[r] = t.has_value() && *t <= 120.0;
    const auto means = window_mean_r(res.trace, 55.0, 80.0);  // pre-switch tail
    bool ok = true;
    for (const int l : mid_levels) {
      const double ratio = means[l + 1] / means[l];
      ok = ok && ratio >= 1.6 && ratio <= 2.4;
    }
    growth_ok[r] = ok;
  });
  int rec = 0, grw = 0;
  for (std::size_t r = 0; r < spec.replications; ++r) {
    rec += recovered[r];
    grw += growth_ok[r];
  }
  const bool pass = rec >= 19 && grw >= 19;
  report(5, pass,
         fmt("dynamic switch: majority flips to Y within 40 pt after the switch in "
             "%d/20 seeds, pre-switch growth ratios in [1.6, 2.4] over levels 1..%d in "
             "%d/20 seeds (need 19)",
             rec, mid_levels.empty() ? 0 : mid_levels.back(), grw));
  CHECK(pass);
}

TEST_CASE("criterion 06: counter booster quality") {
  RunSpec spec = main_spec(Variant::CounterComparison, 1006);
  const double horizon = 48.0 * std::log(static_cast<double>(spec.params.n));
  spec.parallel_time = horizon;
  spec.window_fraction = 0.1;
  spec.metrics = {{.name = "wrong_output_fraction", .truth = Color::X},
                  {.name = "counter_hit_fraction"}};
  const SweepSummary sum = replicate(spec);
  int wrong_ok = 0, hit_ok = 0;
  for (const double v : sum.per_rep.at("wrong_output_fraction")) wrong_ok += v <= 0.10;
  for (const double v : sum.per_rep.at("counter_hit_fraction")) hit_ok += v >= 0.95;

  // stationary-walk identities at machine precision
  double walk_err = 0.0;
  for (const double b : {1.5, 2.0, 3.0}) {
    for (const int m : {1, 3, 5}) {
      const WalkDistribution w = rw_stationary(b, m);
      double sum_pi = 0.0;
      for (const double v : w.pi) sum_pi += v;
      walk_err = std::max(walk_err, std::abs(sum_pi - 1.0));
      for (int k = 0; k + 1 < static_cast<int>(w.pi.size()); ++k)
        walk_err = std::max(walk_err, std::abs(w.pi[k + 1] / w.pi[k] - b) / b);
      walk_err = std::max(
          walk_err, std::abs(w.positive_mass() / w.negative_mass() - std::pow(b, m + 1)) /
                        std::pow(b, m + 1));
    }
  }
  const bool pass = wrong_ok >= 19 && hit_ok >= 19 && walk_err <= 1e-12;
  report(6, pass,
         fmt("counter booster: m=%d, horizon %.0f pt; wrong fraction <= 0.10 in %d/20, "
             "counter hit +m in %d/20 (need 19); walk identities max err %.2e",
             spec.params.m, horizon, wrong_ok, hit_ok, walk_err));
  CHECK(pass);
}

TEST_CASE("criterion 07: reset from an adversarial start") {
  const ProtocolParams P = ProtocolParams::make(10000, Variant::Comparison);
  const double horizon = 20.0 * std::log2(static_cast<double>(P.n));
  std::vector<double> times(20, -1.0);
  parallel_for(times.size(), [&](std::size_t r) {
    SplitRng rng = SplitRng::substream(1007, r);
    const ResetResult res = reset_experiment(P, ResetInit::AllLevelOne, horizon, rng);
    times[r] = res.all_neutral_ptime.value_or(-1.0);
  });
  int ok = 0;
  double worst = 0.0;
  for (const double t : times) {
    ok += t >= 0.0;
    worst = std::max(worst, t);
  }
  const bool pass = ok == 20;
  report(7, pass,
         fmt("reset: all-neutral within %.1f pt in %d/20 seeds (need 20); slowest %.1f pt",
             horizon, ok, worst));
  CHECK(pass);
}

TEST_CASE("criterion 08: coupling properties hold step by step") {
  const ProtocolParams P = ProtocolParams::make(1000, Variant::Comparison);
  SplitRng rng = SplitRng::substream(1008, 0);
  Population u = make_initial(P, 60, 30, RestPolicy::Arbitrary, rng);
  CoupledRun run = CoupledRun::split_construction(std::move(u));
  const CouplingReport rep =
      run_coupled(run, {CouplingProperty::P2, CouplingProperty::P3}, 100000, rng, 1);
  const bool pass = rep.total_violations == 0 && rep.checks_run == 100000;
  report(8, pass,
         fmt("coupling: P2+P3 asserted for %llu steps x %llu agents, %llu violations "
             "(need 0)",
             (unsigned long long)rep.checks_run, (unsigned long long)P.n,
             (unsigned long long)rep.total_violations));
  CHECK(pass);
}

TEST_CASE("criterion 09: leak robustness") {
  // structured leaks against the closed-form band
  double worst_band = 0.0;  // fraction outside [0.85 lo, 1.15 hi], 0 when inside
  int band_levels = 0;
  for (const Variant v : {Variant::LeakFPDetection, Variant::LeakFNDetection}) {
    RunSpec spec = main_spec(v, 1009);
    spec.params = ProtocolParams::make(100000, v, std::nullopt, std::nullopt, 1.0, 1e-3);
    spec.replications = 10;
    const SweepSummary sum = replicate(spec);
    const double n = static_cast<double>(spec.params.n);
    const double r0 = static_cast<double>(spec.x0 + spec.y0) / n;
    const auto lo = predict_fn_leak(r0, 1e-3, spec.params.s);
    const auto hi = predict_fp_leak(r0, 1e-3, spec.params.s);
    for (int l = 1; l <= spec.params.s; ++l) {
      if (lo[l] * n < 1e3) continue;
      band_levels += 1;
      const double lower = 0.85 * lo[l] * n;
      const double upper = 1.15 * hi[l] * n;
      const double emp = sum.tail_mean_r[l];
      if (emp < lower) worst_band = std::max(worst_band, lower / emp - 1.0);
      if (emp > upper) worst_band = std::max(worst_band, emp / upper - 1.0);
    }
  }

  // a worst-case generic leak at rate 1/n must not break the separation claim
  RunSpec generic = main_spec(Variant::Comparison, 1409);
  GenericLeakSpec leak;
  leak.policy = GenericLeakSpec::Policy::WorstCaseMajorityFlip;
  leak.rate = 1.0 / static_cast<double>(generic.params.n);
  generic.params = ProtocolParams::make(generic.params.n, Variant::Comparison,
                                        std::nullopt, std::nullopt, 1.0, 0.0, leak);
  generic.metrics = {{.name = "end_ratio"}, {.name = "stabilize_ratio", .theta = 1.5}};
  const SweepSummary sum = replicate(generic);
  int sep_ok = 0, time_ok = 0;
  for (const double v : sum.per_rep.at("end_ratio")) sep_ok += v >= 1.5;
  for (const double t : sum.per_rep.at("stabilize_ratio"))
    time_ok += std::isfinite(t) && t <= 100.0;

  const bool pass = worst_band == 0.0 && sep_ok >= 19 && time_ok >= 19;
  report(9, pass,
         fmt("leaks: FP/FN tail means inside the predictor band +-15%% over %d resolvable "
             "levels (worst excess %.3f); worst-case flip at rate 1/n keeps separation in "
             "%d/20 and stabilization in %d/20 seeds (need 19)",
             band_levels, worst_band, sep_ok, time_ok));
  CHECK(pass);
}

TEST_CASE("criterion 10: coin tradeoff") {
  const std::vector<double> ps = {1.0, 0.5, 0.25};
  // growth ratios at the small levels
  double worst_growth = 0.0;
  int growth_levels = 0;
  for (const double p : ps) {
    RunSpec spec;
    spec.params = ProtocolParams::make(100000, Variant::CoinDetection, std::nullopt,
                                       std::nullopt, p);
    spec.x0 = 100;
    spec.y0 = 0;
    spec.parallel_time = 200.0;
    spec.window_fraction = 0.25;
    spec.seed = 1010 + static_cast<std::uint64_t>(p * 100);
    spec.replications = 10;
    const SweepSummary sum = replicate(spec);
    const double n = static_cast<double>(spec.params.n);
    const auto coin = predict_coin(1e-3, p, spec.params.s);
    const double target = (1.0 + p) / p;
    for (int l = 1; l < spec.params.s; ++l) {
      if (coin[l + 1] > 0.03 || coin[l] * n < 100.0) continue;
      growth_levels += 1;
      const double ratio = sum.tail_mean_r[l + 1] / sum.tail_mean_r[l];
      worst_growth = std::max(worst_growth, std::abs(ratio - target) / target);
    }
  }

  // potential decay within the submartingale horizon, and reset medians
  std::vector<double> medians;
  int decay_fail = 0;
  for (const double p : ps) {
    const ProtocolParams P =
        ProtocolParams::make(100000, Variant::CoinDetection, std::nullopt, std::nullopt, p);
    const double d = 2.0 * (1.0 + p) / p;
    const double horizon =
        (2.0 * std::log(static_cast<double>(P.n)) + P.s * std::log(d)) / p;
    std::vector<double> caps(20, 0.0);
    std::atomic<int> decayed{0};
    parallel_for(caps.size(), [&](std::size_t r) {
      SplitRng rng = SplitRng::substream(1510 + static_cast<std::uint64_t>(p * 100), r);
      const ResetResult res = reset_experiment(P, ResetInit::AllLevelOne, horizon, rng);
      // every non-neutral agent contributes at least d^-s, so the potential is
      // below d^-s exactly when the population is all-N
      if (res.all_neutral_ptime) decayed.fetch_add(1);
      caps[r] = res.level_cap_ptime.value_or(horizon);
    });
    if (decayed.load() < 19) decay_fail += 1;
    std::sort(caps.begin(), caps.end());
    medians.push_back(caps[caps.size() / 2]);
  }
  const bool monotone = medians[0] <= medians[1] && medians[1] <= medians[2];

  const bool pass = worst_growth <= 0.25 && decay_fail == 0 && monotone;
  report(10, pass,
         fmt("coin: growth ratios within 25%% of (1+p)/p over %d level pairs (worst "
             "%.3f); potential decayed by the horizon in >=19/20 seeds for all p; reset "
             "medians %.1f <= %.1f <= %.1f pt",
             growth_levels, worst_growth, medians[0], medians[1], medians[2]));
  CHECK(pass);
}

TEST_CASE("criterion 11: determinism and throughput") {
  // byte-identical traces per (seed, config)
  RunSpec spec = main_spec(Variant::Comparison, 1011);
  spec.parallel_time = 50.0;
  spec.switches = {{25.0, 300, 600}};
  const std::string csv1 = run_spec(spec, SplitRng::substream(spec.seed, 0)).trace.to_csv();
  const std::string csv2 = run_spec(spec, SplitRng::substream(spec.seed, 0)).trace.to_csv();
  const std::string csv3 = run_spec(spec, SplitRng::substream(spec.seed, 1)).trace.to_csv();
  const bool identical = csv1 == csv2 && csv1 != csv3;

  // sustained interaction rate at n = 1e6, Comparison
  const ProtocolParams P = ProtocolParams::make(1000000, Variant::Comparison);
  SplitRng rng = SplitRng::substream(1111, 0);
  Population pop = make_initial(P, 10000, 5000, RestPolicy::AllNeutral, rng);
  for (std::uint64_t t = 0; t < P.n; ++t) step(pop, rng);  // warm one parallel unit
  const std::uint64_t timed_steps = 20000000;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t t = 0; t < timed_steps; ++t) step(pop, rng);
  const auto t1 = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  const double rate = static_cast<double>(timed_steps) / secs;

  const bool pass = identical && rate >= 5e6;
  report(11, pass,
         fmt("engineering: traces byte-identical per seed (%s); %.1fM interactions/s at "
             "n=1e6 (need 5M)",
             identical ? "yes" : "no", rate / 1e6));
  CHECK(pass);
}
