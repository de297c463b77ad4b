#include "popcomp/steady_state.hpp"

#include <cmath>

namespace popcomp {

namespace {

void check_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
}

// (1 - r0)^(2^i), evaluated as exp(2^i log1p(-r0)).
double survival(double r0, int level) {
  const double l = std::log1p(-r0);
  return std::exp(std::ldexp(1.0, level) * l);
}

}  // namespace

std::vector<double> predict_r(double r0, int levels) {
  check_fraction(r0, "r0");
  std::vector<double> r(static_cast<std::size_t>(levels) + 1);
  const double l = std::log1p(-r0);
  for (int i = 0; i <= levels; ++i) r[i] = -std::expm1(std::ldexp(1.0, i) * l);
  r[0] = r0;
  return r;
}

XyPrediction predict_xy(double x0, double y0, int levels) {
  check_fraction(x0, "x0");
  check_fraction(y0, "y0");
  if (x0 + y0 > 1.0) throw ConfigError("x0 + y0 must not exceed 1");
  const double r0 = x0 + y0;
  XyPrediction out;
  out.x_tilde.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.y_tilde.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.x_tilde[0] = x0;
  out.y_tilde[0] = y0;
  if (levels == 0) return out;
  const double q0 = 1.0 - r0;
  out.x_tilde[1] = x0 * q0;
  out.y_tilde[1] = y0 * q0;
  for (int i = 1; i < levels; ++i) {
    // 2 - r~_i - r~_{i-1} == q_i + q_{i-1}, which stays accurate near saturation
    const double factor = survival(r0, i) + survival(r0, i - 1);
    out.x_tilde[i + 1] = out.x_tilde[i] * factor;
    out.y_tilde[i + 1] = out.y_tilde[i] * factor;
  }
  return out;
}

std::vector<double> predict_fp_leak(double r0, double zeta, int levels) {
  check_fraction(r0, "r0");
  if (!(zeta >= 0.0 && zeta < 1.0)) throw ConfigError("zeta must be in [0, 1)");
  std::vector<double> r(static_cast<std::size_t>(levels) + 1);
  const double lr = std::log1p(-r0);
  const double lz = std::log1p(-zeta);
  for (int c = 0; c <= levels; ++c) {
    const double two_c = std::ldexp(1.0, c);
    r[c] = -std::expm1((two_c - 1.0) * lz + two_c * lr);
  }
  r[0] = r0;
  return r;
}

std::vector<double> predict_fn_leak(double r0, double zeta, int levels) {
  check_fraction(r0, "r0");
  if (!(zeta >= 0.0 && zeta < 1.0)) throw ConfigError("zeta must be in [0, 1)");
  std::vector<double> r(static_cast<std::size_t>(levels) + 1);
  // extended precision keeps the 64-level recursion within 1e-12 of the
  // zeta = 0 closed form
  long double q = 1.0L - static_cast<long double>(r0);
  const long double z = static_cast<long double>(zeta);
  r[0] = r0;
  for (int c = 1; c <= levels; ++c) {
    q = z + (1.0L - z) * q * q;  // 1 - r''_{c} from 1 - r''_{c-1}
    r[c] = static_cast<double>(1.0L - q);
  }
  return r;
}

std::vector<double> predict_coin(double r0, double p_prime, int levels) {
  check_fraction(r0, "r0");
  if (!(p_prime > 0.0 && p_prime <= 1.0)) throw ConfigError("p' must be in (0, 1]");
  std::vector<double> r(static_cast<std::size_t>(levels) + 1);
  const double factor = (1.0 + p_prime) / p_prime;
  r[0] = r0;
  for (int c = 1; c <= levels; ++c) r[c] = std::min(1.0, r[c - 1] * factor);
  return r;
}

std::optional<int> saturation_level(double r0, double threshold) {
  check_fraction(r0, "r0");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("threshold must be in (0, 1)");
  if (r0 == 0.0) return std::nullopt;
  const double l = std::log1p(-r0);
  for (int d = 0; d <= 1100; ++d) {
    const double r = -std::expm1(std::ldexp(1.0, d) * l);
    if (r >= threshold) return d;
  }
  return std::nullopt;  // not reachable for r0 > 0
}

double WalkDistribution::positive_mass() const {
  double t = 0.0;
  for (int i = 1; i <= bound; ++i) t += at(i);
  return t;
}

double WalkDistribution::negative_mass() const {
  double t = 0.0;
  for (int i = -bound; i <= -1; ++i) t += at(i);
  return t;
}

WalkDistribution rw_stationary(double bias, int bound) {
  if (!(bias > 0.0)) throw ConfigError("walk bias must be positive");
  if (bound < 1) throw ConfigError("walk bound must be at least 1");
  WalkDistribution out;
  out.bias = bias;
  out.bound = bound;
  const int states = 2 * bound + 1;
  out.pi.resize(states);
  // weights b^k scaled by the largest term so no finite bias overflows
  const int kmax = bias >= 1.0 ? states - 1 : 0;
  double total = 0.0;
  for (int k = 0; k < states; ++k) {
    out.pi[k] = std::pow(bias, k - kmax);
    total += out.pi[k];
  }
  for (auto& v : out.pi) v /= total;
  return out;
}

SteadyStatePrediction make_prediction(const ProtocolParams& params, std::uint64_t x0,
                                      std::uint64_t y0, int levels) {
  SteadyStatePrediction out;
  out.variant = params.variant;
  out.x0 = static_cast<double>(x0) / static_cast<double>(params.n);
  out.y0 = static_cast<double>(y0) / static_cast<double>(params.n);
  out.r0 = out.x0 + out.y0;
  out.zeta = params.zeta;
  out.p_prime = params.p;

  switch (params.variant) {
    case Variant::Comparison:
    case Variant::CounterComparison: {
      out.r_tilde = predict_r(out.r0, levels);
      XyPrediction xy = predict_xy(out.x0, out.y0, levels);
      out.x_tilde = std::move(xy.x_tilde);
      out.y_tilde = std::move(xy.y_tilde);
      return out;
    }
    case Variant::Detection:
      out.r_tilde = predict_r(out.r0, levels);
      break;
    case Variant::LeakFPDetection:
      out.r_tilde = predict_fp_leak(out.r0, params.zeta, levels);
      break;
    case Variant::LeakFNDetection:
      out.r_tilde = predict_fn_leak(out.r0, params.zeta, levels);
      break;
    case Variant::CoinDetection:
      out.r_tilde = predict_coin(out.r0, params.p, levels);
      break;
  }
  // merged colors: the whole per-level share is X-colored
  out.x_tilde.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.y_tilde.assign(static_cast<std::size_t>(levels) + 1, 0.0);
  out.x_tilde[0] = out.x0;
  out.y_tilde[0] = out.y0;
  for (int i = 1; i <= levels; ++i)
    out.x_tilde[i] = std::max(0.0, out.r_tilde[i] - out.r_tilde[i - 1]);
  return out;
}

}  // namespace popcomp
