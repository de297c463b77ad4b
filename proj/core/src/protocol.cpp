#include "popcomp/protocol.hpp"

#include <bit>
#include <cctype>
#include <charconv>

namespace popcomp {

namespace {

int ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return std::bit_width(x - 1);
}

bool is_catalytic(const AgentState& a) { return a.is_baseline(); }

}  // namespace

int ProtocolParams::auto_level_cap(std::uint64_t n) {
  const int l1 = ceil_log2(n);
  const int l2 = ceil_log2(static_cast<std::uint64_t>(std::max(l1, 1)));
  return std::max(1, l1 + 2 * l2);
}

int ProtocolParams::auto_counter_bound(std::uint64_t n) {
  const int l1 = ceil_log2(n);
  return std::max(1, ceil_log2(static_cast<std::uint64_t>(std::max(l1, 1))));
}

ProtocolParams ProtocolParams::make(std::uint64_t n, Variant variant, std::optional<int> s,
                                    std::optional<int> m, double p, double zeta,
                                    std::optional<GenericLeakSpec> generic_leak) {
  ProtocolParams out;
  out.n = n;
  out.variant = variant;
  out.s = s.value_or(auto_level_cap(n));
  out.m = variant == Variant::CounterComparison ? m.value_or(auto_counter_bound(n)) : 0;
  out.p = p;
  out.zeta = zeta;
  out.generic_leak = std::move(generic_leak);
  out.validate();
  return out;
}

void ProtocolParams::validate() const {
  if (n < 2) throw ConfigError("population size n must be at least 2");
  if (s < 1 || s > 200) throw ConfigError("level cap s must be in [1, 200]");
  if (variant == Variant::CounterComparison) {
    if (m < 1 || m > 100) throw ConfigError("counter bound m must be in [1, 100]");
  } else if (m != 0) {
    throw ConfigError("counter bound m applies to the CounterComparison variant only");
  }
  if (variant == Variant::CoinDetection) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("coin probability p must be in (0, 1]");
  } else if (p != 1.0) {
    throw ConfigError("coin probability p applies to the CoinDetection variant only");
  }
  if (variant == Variant::LeakFPDetection || variant == Variant::LeakFNDetection) {
    if (!(zeta >= 0.0 && zeta < 1.0)) throw ConfigError("leak rate zeta must be in [0, 1)");
  } else if (zeta != 0.0) {
    throw ConfigError("leak rate zeta applies to the leak variants only");
  }
  if (generic_leak) {
    const auto& g = *generic_leak;
    if (!(g.rate >= 0.0 && g.rate < 1.0))
      throw ConfigError("generic leak rate must be in [0, 1)");
    if (g.policy == GenericLeakSpec::Policy::FixedRewrite) {
      if (is_catalytic(g.from) || is_catalytic(g.to))
        throw ConfigError("leak rewrite must not name a catalytic state");
      if (!is_valid_state(g.from, *this) || !is_valid_state(g.to, *this))
        throw ConfigError("leak rewrite names a state outside the protocol's state space");
    }
    if (g.policy == GenericLeakSpec::Policy::WorstCaseMajorityFlip && detection_family())
      throw ConfigError("worst-case majority flip requires a two-color variant");
  }
}

bool is_valid_state(const AgentState& a, const ProtocolParams& params) {
  const int counter_bound = params.counter_enabled() ? params.m : 0;
  if (a.counter < -counter_bound || a.counter > counter_bound) return false;
  switch (a.role) {
    case Role::BaselineX:
      return a.color == Color::X && a.level == 0;
    case Role::BaselineY:
      return a.color == Color::Y && a.level == 0;
    case Role::Neutral:
      return a.color == Color::X && a.level == 0;
    case Role::Strong:
      if (a.level < 1 || a.level > params.s) return false;
      return params.detection_family() ? a.color == Color::X : true;
  }
  return false;
}

std::string to_token(const AgentState& a) {
  std::string base;
  switch (a.role) {
    case Role::BaselineX:
      base = "X0";
      break;
    case Role::BaselineY:
      base = "Y0";
      break;
    case Role::Neutral:
      base = "N";
      break;
    case Role::Strong:
      base = (a.color == Color::X ? "X" : "Y") + std::to_string(int(a.level));
      break;
  }
  if (a.counter != 0) {
    base += a.counter > 0 ? "|+" : "|";
    base += std::to_string(int(a.counter));
  }
  return base;
}

AgentState parse_state_token(const std::string& token) {
  if (token.empty()) throw ConfigError("empty state token");
  if (token == "N") return AgentState::neutral();
  const char head = token[0];
  if (head != 'X' && head != 'Y')
    throw ConfigError("bad state token '" + token + "' (expected X<k>, Y<k> or N)");
  int level = -1;
  const char* begin = token.data() + 1;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, level);
  if (ec != std::errc() || ptr != end || level < 0 || level > 200)
    throw ConfigError("bad state token '" + token + "'");
  const Color c = head == 'X' ? Color::X : Color::Y;
  return level == 0 ? AgentState::baseline(c) : AgentState::strong(c, level);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Comparison:
      return "Comparison";
    case Variant::Detection:
      return "Detection";
    case Variant::CounterComparison:
      return "CounterComparison";
    case Variant::CoinDetection:
      return "CoinDetection";
    case Variant::LeakFPDetection:
      return "LeakFPDetection";
    case Variant::LeakFNDetection:
      return "LeakFNDetection";
  }
  throw ContractError("unknown variant");
}

Variant parse_variant(const std::string& name) {
  if (name == "Comparison") return Variant::Comparison;
  if (name == "Detection") return Variant::Detection;
  if (name == "CounterComparison") return Variant::CounterComparison;
  if (name == "CoinDetection") return Variant::CoinDetection;
  if (name == "LeakFPDetection") return Variant::LeakFPDetection;
  if (name == "LeakFNDetection") return Variant::LeakFNDetection;
  throw ConfigError("unknown variant '" + name + "'");
}

}  // namespace popcomp
