#include "popcomp/rule_table.hpp"

namespace popcomp {

namespace {

// The counting rule, transcribed: the counter goes up by one on a
// reaction with a strong molecule of type X, down by one with type Y, and is
// unchanged on a reaction with N; "strong" means any non-N state, so the
// baselines count. The value is clamped to [-m, m].
int oracle_counter(int own, const AgentState& partner, int m) {
  int v = own;
  if (partner.role == Role::BaselineX) v += 1;
  if (partner.role == Role::BaselineY) v -= 1;
  if (partner.role == Role::Strong) v += partner.color == Color::X ? 1 : -1;
  if (v > m) v = m;
  if (v < -m) v = -m;
  return v;
}

bool same_distribution(const OracleDistribution& a, const OracleDistribution& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].prob != b[i].prob || !(a[i].first == b[i].first) ||
        !(a[i].second == b[i].second) || a[i].leaked != b[i].leaked)
      return false;
  }
  return true;
}

}  // namespace

RuleTable::RuleTable(const ProtocolParams& params) : params_(params) {
  if (params.s > 8 || params.m > 3)
    throw ConfigError("rule table oracle requires s <= 8 and m <= 3");

  const int s = params_.s;
  base_states_.push_back(AgentState::baseline(Color::X));
  base_states_.push_back(AgentState::baseline(Color::Y));
  base_states_.push_back(AgentState::neutral());
  for (int l = 1; l <= s; ++l) base_states_.push_back(AgentState::strong(Color::X, l));
  if (!params_.detection_family()) {
    for (int l = 1; l <= s; ++l) base_states_.push_back(AgentState::strong(Color::Y, l));
  }

  if (params_.counter_enabled()) {
    for (const auto& b : base_states_)
      for (int c = -params_.m; c <= params_.m; ++c) states_.push_back(b.with_counter(c));
  } else {
    states_ = base_states_;
  }

  table_.resize(base_states_.size() * base_states_.size());
  filled_.assign(table_.size(), false);
  build_base_table();

  // pass 1: direct orientations own their cells; a rule listed twice must agree
  for (const auto& r : rules_) {
    const std::size_t idx = base_index(r.l1) * base_states_.size() + base_index(r.l2);
    if (filled_[idx]) {
      if (!same_distribution(table_[idx], r.branches))
        throw ContractError("conflicting rule for " + to_token(r.l1) + " + " + to_token(r.l2));
      continue;
    }
    table_[idx] = r.branches;
    filled_[idx] = true;
  }
  // pass 2: symmetric closure fills the mirrored orientation of every rule,
  // unless the pair already has a rule of its own (ties go to the first reagent)
  for (const auto& r : rules_) {
    const std::size_t idx = base_index(r.l2) * base_states_.size() + base_index(r.l1);
    if (filled_[idx]) continue;
    OracleDistribution mirrored = r.branches;
    for (auto& br : mirrored) std::swap(br.first, br.second);
    table_[idx] = std::move(mirrored);
    filled_[idx] = true;
  }
  // totality: unmatched ordered pairs are explicit no-ops
  for (std::size_t i = 0; i < base_states_.size(); ++i) {
    for (std::size_t j = 0; j < base_states_.size(); ++j) {
      const std::size_t idx = i * base_states_.size() + j;
      if (!filled_[idx]) {
        table_[idx] = {OracleBranch{1.0, base_states_[i], base_states_[j], false}};
        filled_[idx] = true;
      }
    }
  }
}

std::size_t RuleTable::base_index(const AgentState& a) const {
  AgentState key = a.with_counter(0);
  for (std::size_t i = 0; i < base_states_.size(); ++i)
    if (base_states_[i] == key) return i;
  throw ContractError("state outside the oracle's space: " + to_token(a));
}

void RuleTable::add(const AgentState& l1, const AgentState& l2, OracleDistribution branches) {
  rules_.push_back({l1, l2, std::move(branches)});
}

void RuleTable::build_base_table() {
  const int s = params_.s;
  const double p = params_.p;
  const double z = params_.zeta;

  const AgentState bx = AgentState::baseline(Color::X);
  const AgentState by = AgentState::baseline(Color::Y);
  const AgentState nn = AgentState::neutral();
  auto ux = [&](int l) { return AgentState::strong(Color::X, l); };
  auto uy = [&](int l) { return AgentState::strong(Color::Y, l); };

  auto det = [&](const AgentState& a, const AgentState& b, const AgentState& ra,
                 const AgentState& rb) { add(a, b, {OracleBranch{1.0, ra, rb, false}}); };

  switch (params_.variant) {
    case Variant::Comparison:
    case Variant::CounterComparison: {
      // for all 1 <= i <= s
      for (int i = 1; i <= s; ++i) {
        det(bx, ux(i), bx, ux(1));  // X0 + Xi -> X0 + X1
        det(bx, uy(i), bx, ux(1));  // X0 + Yi -> X0 + X1
        det(by, ux(i), by, uy(1));  // Y0 + Xi -> Y0 + Y1
        det(by, uy(i), by, uy(1));  // Y0 + Yi -> Y0 + Y1
      }
      det(bx, nn, bx, ux(1));  // closure: a catalyst recruits N directly
      det(by, nn, by, uy(1));
      // for all 1 <= i < s
      for (int i = 1; i < s; ++i) {
        det(ux(i), nn, ux(i + 1), ux(i + 1));  // Xi + N -> X_{i+1} + X_{i+1}
        det(uy(i), nn, uy(i + 1), uy(i + 1));
      }
      det(ux(s), nn, nn, nn);  // Xs + N -> N + N
      det(uy(s), nn, nn, nn);
      // for all 1 <= i <= j <= s, i != s
      for (int i = 1; i <= s; ++i) {
        for (int j = i; j <= s; ++j) {
          if (i == s) continue;
          det(ux(i), ux(j), ux(i + 1), ux(i + 1));  // Xi + Xj -> X_{i+1} x2
          det(uy(i), uy(j), uy(i + 1), uy(i + 1));
          det(ux(i), uy(j), ux(i + 1), ux(i + 1));  // Xi + Yj -> X_{i+1} x2
          det(uy(i), ux(j), uy(i + 1), uy(i + 1));  // Yi + Xj -> Y_{i+1} x2
        }
      }
      det(ux(s), ux(s), nn, nn);  // Xs + Xs -> N + N
      det(ux(s), uy(s), nn, nn);
      det(uy(s), uy(s), nn, nn);
      det(uy(s), ux(s), nn, nn);
      break;
    }

    case Variant::Detection: {
      for (const auto& b0 : {bx, by}) {
        for (int i = 1; i <= s; ++i) det(b0, ux(i), b0, ux(1));  // U0 + Ui -> U0 + U1
        det(b0, nn, b0, ux(1));
      }
      for (int i = 1; i < s; ++i) det(ux(i), nn, ux(i + 1), ux(i + 1));
      det(ux(s), nn, nn, nn);
      for (int i = 1; i <= s; ++i)
        for (int j = i; j <= s; ++j)
          if (i != s) det(ux(i), ux(j), ux(i + 1), ux(i + 1));
      det(ux(s), ux(s), nn, nn);
      break;
    }

    case Variant::CoinDetection: {
      // branch order: [0, p) advance-both, [p, 1) lazy
      auto coin = [&](const AgentState& a, const AgentState& b, const AgentState& fa,
                      const AgentState& fb, const AgentState& la, const AgentState& lb) {
        add(a, b, {OracleBranch{p, fa, fb, false}, OracleBranch{1.0 - p, la, lb, false}});
      };
      for (const auto& b0 : {bx, by}) {
        for (int i = 1; i <= s; ++i) det(b0, ux(i), b0, ux(1));
        det(b0, nn, b0, ux(1));
      }
      for (int i = 1; i < s; ++i)
        coin(ux(i), nn, ux(i + 1), ux(i + 1), ux(i), ux(i + 1));  // Ui + N
      for (int i = 1; i <= s; ++i)
        for (int j = i; j <= s; ++j)
          if (i != s) coin(ux(i), ux(j), ux(i + 1), ux(i + 1), ux(i), ux(i + 1));
      det(ux(s), nn, nn, nn);     // Us + N -> N + N
      det(ux(s), ux(s), nn, nn);  // printed as "Us + Rs"; read as Us + Us
      break;
    }

    case Variant::LeakFPDetection: {
      // branch order: [0, z) leak to U1 + U1, [z, 1) normal
      auto leaky = [&](const AgentState& a, const AgentState& b, const AgentState& ra,
                       const AgentState& rb) {
        add(a, b, {OracleBranch{z, ux(1), ux(1), true}, OracleBranch{1.0 - z, ra, rb, false}});
      };
      for (const auto& b0 : {bx, by}) {
        for (int i = 1; i <= s; ++i) det(b0, ux(i), b0, ux(1));  // catalytic, not leaky
        det(b0, nn, b0, ux(1));
      }
      for (int i = 1; i < s; ++i) leaky(ux(i), nn, ux(i + 1), ux(i + 1));
      for (int i = 1; i <= s; ++i)
        for (int j = i; j <= s; ++j)
          if (i != s) leaky(ux(i), ux(j), ux(i + 1), ux(i + 1));
      leaky(ux(s), nn, nn, nn);
      leaky(ux(s), ux(s), nn, nn);
      break;
    }

    case Variant::LeakFNDetection: {
      // branch order: [0, z) leak (non-catalysts to N), [z, 1) normal
      auto leaky = [&](const AgentState& a, const AgentState& b, const AgentState& ra,
                       const AgentState& rb, const AgentState& za, const AgentState& zb) {
        add(a, b, {OracleBranch{z, za, zb, true}, OracleBranch{1.0 - z, ra, rb, false}});
      };
      for (const auto& b0 : {bx, by}) {
        for (int i = 1; i <= s; ++i) leaky(b0, ux(i), b0, ux(1), b0, nn);  // U0 + Ui
        leaky(b0, nn, b0, ux(1), b0, nn);
      }
      for (int i = 1; i < s; ++i) leaky(ux(i), nn, ux(i + 1), ux(i + 1), nn, nn);
      for (int i = 1; i <= s; ++i)
        for (int j = i; j <= s; ++j)
          if (i != s) leaky(ux(i), ux(j), ux(i + 1), ux(i + 1), nn, nn);
      det(ux(s), nn, nn, nn);  // cap reactions already produce N; no branch listed
      det(ux(s), ux(s), nn, nn);
      break;
    }
  }
}

const OracleDistribution& RuleTable::lookup(const AgentState& first,
                                            const AgentState& second) const {
  const auto& base = table_[base_index(first) * base_states_.size() + base_index(second)];
  if (!params_.counter_enabled()) return base;
  // counter adjustments are per-lookup; the scratch buffer makes lookup
  // single-threaded, which is fine for its test-oracle role
  scratch_ = base;
  for (auto& br : scratch_) {
    br.first.counter =
        static_cast<std::int8_t>(oracle_counter(first.counter, second, params_.m));
    br.second.counter =
        static_cast<std::int8_t>(oracle_counter(second.counter, first, params_.m));
  }
  return scratch_;
}

}  // namespace popcomp
