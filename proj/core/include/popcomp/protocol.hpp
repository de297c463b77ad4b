#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace popcomp {

// Configuration problems (bad parameters, malformed input). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariants. CLI exit code 3.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Role : std::uint8_t { BaselineX, BaselineY, Strong, Neutral };
enum class Color : std::uint8_t { X, Y };
enum class Output : std::uint8_t { X, Y, Undecided };

enum class Variant : std::uint8_t {
  Comparison,
  Detection,
  CounterComparison,
  CoinDetection,
  LeakFPDetection,
  LeakFNDetection,
};

// Baselines sit at level 0, strong agents carry 1..s, Neutral compares as
// +infinity.
inline constexpr int kLevelInf = 1 << 20;

struct AgentState {
  Role role = Role::Neutral;
  Color color = Color::X;   // meaningful iff role != Neutral
  std::uint8_t level = 0;   // 1..s iff Strong, 0 otherwise
  std::int8_t counter = 0;  // [-m, m] when the counter variant is enabled

  static constexpr AgentState baseline(Color c) {
    return {c == Color::X ? Role::BaselineX : Role::BaselineY, c, 0, 0};
  }
  static constexpr AgentState strong(Color c, int level) {
    return {Role::Strong, c, static_cast<std::uint8_t>(level), 0};
  }
  static constexpr AgentState neutral() { return {Role::Neutral, Color::X, 0, 0}; }

  AgentState with_counter(int c) const {
    AgentState out = *this;
    out.counter = static_cast<std::int8_t>(c);
    return out;
  }

  bool is_baseline() const { return role == Role::BaselineX || role == Role::BaselineY; }
  bool is_strong() const { return role == Role::Strong; }
  bool is_neutral() const { return role == Role::Neutral; }

  friend constexpr bool operator==(const AgentState&, const AgentState&) = default;
};

inline int level_of(const AgentState& a) {
  switch (a.role) {
    case Role::Neutral:
      return kLevelInf;
    case Role::Strong:
      return a.level;
    default:
      return 0;
  }
}

// Color of a non-neutral state; X for Neutral (callers guard on role).
inline Color state_color(const AgentState& a) {
  switch (a.role) {
    case Role::BaselineX:
      return Color::X;
    case Role::BaselineY:
      return Color::Y;
    default:
      return a.color;
  }
}

struct GenericLeakSpec {
  enum class Policy : std::uint8_t { FixedRewrite, WorstCaseMajorityFlip, RandomNonCatalytic };
  Policy policy = Policy::RandomNonCatalytic;
  double rate = 0.0;   // per-interaction firing probability
  AgentState from{};   // FixedRewrite only; non-catalytic
  AgentState to{};     // FixedRewrite only; non-catalytic
};

struct ProtocolParams {
  std::uint64_t n = 0;
  Variant variant = Variant::Comparison;
  int s = 1;          // level cap
  int m = 0;          // counter bound (CounterComparison)
  double p = 1.0;     // advance probability (CoinDetection)
  double zeta = 0.0;  // structured leak rate (LeakFP/LeakFN)
  std::optional<GenericLeakSpec> generic_leak;

  bool counter_enabled() const { return variant == Variant::CounterComparison; }
  bool detection_family() const {
    return variant == Variant::Detection || variant == Variant::CoinDetection ||
           variant == Variant::LeakFPDetection || variant == Variant::LeakFNDetection;
  }
  bool consumes_variate() const {
    return variant == Variant::CoinDetection || variant == Variant::LeakFPDetection ||
           variant == Variant::LeakFNDetection;
  }

  static int auto_level_cap(std::uint64_t n);      // ceil(lg n) + 2 ceil(lg lg n)
  static int auto_counter_bound(std::uint64_t n);  // ceil(lg lg n), at least 1

  // Validates and fills in auto defaults; throws ConfigError.
  static ProtocolParams make(std::uint64_t n, Variant variant,
                             std::optional<int> s = std::nullopt,
                             std::optional<int> m = std::nullopt, double p = 1.0,
                             double zeta = 0.0,
                             std::optional<GenericLeakSpec> generic_leak = std::nullopt);

  void validate() const;
};

bool is_valid_state(const AgentState& a, const ProtocolParams& params);

// "X0", "Y3", "N" (level 0 = baseline); counter printed as "X3|+2" when set.
std::string to_token(const AgentState& a);
AgentState parse_state_token(const std::string& token);

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

// Counter update against the partner's pre-interaction state: +1 for an
// X-colored non-neutral partner (baselines included), -1 for Y, unchanged
// for N; clamped to [-m, m].
inline int counter_update(int own_counter, const AgentState& partner_pre_state, int m) {
  int v = own_counter;
  if (!partner_pre_state.is_neutral()) {
    v += state_color(partner_pre_state) == Color::X ? 1 : -1;
  }
  return std::clamp(v, -m, m);
}

inline Output output_of(const AgentState& state, Variant variant) {
  switch (variant) {
    case Variant::CounterComparison:
      if (state.counter > 0) return Output::X;
      if (state.counter < 0) return Output::Y;
      return Output::Undecided;
    case Variant::Comparison:
      if (state.is_neutral()) return Output::Undecided;
      return state_color(state) == Color::X ? Output::X : Output::Y;
    default:
      return state.is_neutral() ? Output::Undecided : Output::X;
  }
}

struct InteractionResult {
  AgentState first;
  AgentState second;
  bool leaked = false;  // a structured zeta-branch replaced the normal outcome
};

namespace detail {

inline void set_strong(AgentState& t, Color c, int level, bool merged) {
  t.role = Role::Strong;
  t.color = merged ? Color::X : c;
  t.level = static_cast<std::uint8_t>(level);
}

inline void set_neutral(AgentState& t) {
  t.role = Role::Neutral;
  t.color = Color::X;
  t.level = 0;
}

}  // namespace detail

// The ordered pairwise transition. `rand01` is consumed only by the
// probabilistic variants (coin and structured leaks); deterministic variants
// ignore it. Rules are applied irrespective of reagent order; ties at equal
// strong levels resolve to the first reagent's color.
inline InteractionResult transition(const AgentState& first, const AgentState& second,
                                    const ProtocolParams& params, double rand01) {
  AgentState a = first;
  AgentState b = second;
  const bool merged = params.detection_family();
  const bool a_base = first.is_baseline();
  const bool b_base = second.is_baseline();
  bool leaked = false;

  if (a_base && b_base) {
    // two catalysts never react
  } else if (a_base || b_base) {
    // catalytic recruiting: the partner restarts at level 1 with the
    // catalyst's color; the catalyst itself never changes
    AgentState& target = a_base ? b : a;
    const Color c = a_base ? state_color(first) : state_color(second);
    if (params.variant == Variant::LeakFNDetection && rand01 < params.zeta) {
      detail::set_neutral(target);
      leaked = true;
    } else {
      detail::set_strong(target, c, 1, merged);
    }
  } else {
    const int la = level_of(first);
    const int lb = level_of(second);
    const int l = std::min(la, lb);
    if (l == kLevelInf) {
      // N + N: no rule
    } else if (params.variant == Variant::LeakFPDetection && rand01 < params.zeta) {
      // false-positive leak re-seeds level 1
      detail::set_strong(a, Color::X, 1, merged);
      detail::set_strong(b, Color::X, 1, merged);
      leaked = true;
    } else if (params.variant == Variant::LeakFNDetection && l < params.s &&
               rand01 < params.zeta) {
      // false-negative leak erases the reaction to neutral
      detail::set_neutral(a);
      detail::set_neutral(b);
      leaked = true;
    } else if (l >= params.s) {
      // chain exhausted at the cap
      detail::set_neutral(a);
      detail::set_neutral(b);
    } else {
      const bool first_attains = la <= lb;
      const Color c = first_attains ? state_color(first) : state_color(second);
      if (params.variant == Variant::CoinDetection && rand01 >= params.p) {
        // lazy branch: the min keeps its level, only the partner joins below it
        AgentState& other = first_attains ? b : a;
        detail::set_strong(other, Color::X, l + 1, merged);
      } else {
        detail::set_strong(a, c, l + 1, merged);
        detail::set_strong(b, c, l + 1, merged);
      }
    }
  }

  if (params.counter_enabled()) {
    a.counter = static_cast<std::int8_t>(counter_update(first.counter, second, params.m));
    b.counter = static_cast<std::int8_t>(counter_update(second.counter, first, params.m));
  }
  return {a, b, leaked};
}

}  // namespace popcomp
