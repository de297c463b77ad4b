#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "popcomp/protocol.hpp"

namespace popcomp {

// Cumulative steady-state occupancies r~_i = 1 - (1 - r0)^(2^i) for levels
// 0..levels, evaluated in log space so r0 down to 1e-9 and 64 levels stay
// accurate.
std::vector<double> predict_r(double r0, int levels);

// Per-level fractions for the two-color comparison dynamics. Level 1 seeds as
// x~_1 = x0 (1 - r~_0); above that x~_{i+1} = x~_i (2 - r~_i - r~_{i-1}).
struct XyPrediction {
  std::vector<double> x_tilde;
  std::vector<double> y_tilde;
};
XyPrediction predict_xy(double x0, double y0, int levels);

// False-positive leaks: 1 - r~'_c = (1-zeta)^(2^c - 1) (1 - r0)^(2^c).
std::vector<double> predict_fp_leak(double r0, double zeta, int levels);

// False-negative leaks, exact fixed-point recursion
// r~''_{c+1} = (1-zeta)(1 - (1 - r~''_c)^2).
std::vector<double> predict_fn_leak(double r0, double zeta, int levels);

// Probabilistic-transition protocol, geometric small-occupancy form
// r~_{c+1} = min(1, (1+p')/p' r~_c). Approximate: valid while r~_c = o(1).
std::vector<double> predict_coin(double r0, double p_prime, int levels);

// Minimal level d with r~_d >= threshold; nullopt when unreachable (r0 = 0).
std::optional<int> saturation_level(double r0, double threshold = 0.9);

// Stationary distribution of the bounded biased walk on [-m, m] with up-rate
// b/(b+1) and reflecting self-loops at the ends: pi_{i+1} = b pi_i.
struct WalkDistribution {
  double bias = 1.0;
  int bound = 0;
  std::vector<double> pi;  // index 0 <-> counter -m

  double at(int counter) const { return pi[static_cast<std::size_t>(counter + bound)]; }
  double positive_mass() const;
  double negative_mass() const;
};
WalkDistribution rw_stationary(double bias, int bound);

// Bundle used by the experiment harness when scoring traces.
struct SteadyStatePrediction {
  Variant variant = Variant::Comparison;
  double r0 = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double zeta = 0.0;
  double p_prime = 1.0;
  std::vector<double> r_tilde;
  std::vector<double> x_tilde;
  std::vector<double> y_tilde;
};

// Prediction matching a simulation configuration; x0/y0 are agent counts.
SteadyStatePrediction make_prediction(const ProtocolParams& params, std::uint64_t x0,
                                      std::uint64_t y0, int levels);

}  // namespace popcomp
