#include <cmath>

#include "doctest.h"
#include "popcomp/coupling.hpp"

using namespace popcomp;

namespace {

CoupledRun split_run(std::uint64_t n, std::uint64_t x0, std::uint64_t y0, SplitRng& rng) {
  const ProtocolParams P = ProtocolParams::make(n, Variant::Comparison);
  Population u = make_initial(P, x0, y0, RestPolicy::Arbitrary, rng);
  return CoupledRun::split_construction(std::move(u));
}

}  // namespace

TEST_CASE("u duplicated against an all-neutral partner satisfies P1 forever") {
  const ProtocolParams P = ProtocolParams::make(100, Variant::Comparison, 6);
  SplitRng rng(21);
  Population u = make_initial(P, 10, 5, RestPolicy::Arbitrary, rng);
  Population w = u;
  Population v(P);  // all neutral: levels are +infinity
  std::vector<Population> pops;
  pops.push_back(std::move(u));
  pops.push_back(std::move(v));
  pops.push_back(std::move(w));
  CoupledRun run = CoupledRun::of_populations(std::move(pops));
  const auto report = run_coupled(run, {CouplingProperty::P1}, 20000, rng);
  CHECK(report.total_violations == 0);
  CHECK(report.steps_run == 20000);
}

TEST_CASE("split construction holds P2 and P3 step by step") {
  SplitRng rng(22);
  CoupledRun run = split_run(200, 14, 7, rng);
  const auto report =
      run_coupled(run, {CouplingProperty::P2, CouplingProperty::P3}, 30000, rng);
  CHECK(report.total_violations == 0);
  CHECK(report.checks_run == 30000);
}

TEST_CASE("all-neutral triple satisfies P2 trivially") {
  const ProtocolParams P = ProtocolParams::make(64, Variant::Comparison, 5);
  std::vector<Population> pops{Population(P), Population(P), Population(P)};
  CoupledRun run = CoupledRun::of_populations(std::move(pops));
  SplitRng rng(23);
  const auto report = run_coupled(run, {CouplingProperty::P2}, 5000, rng);
  CHECK(report.total_violations == 0);
}

TEST_CASE("corrupted initial configurations are rejected with the index") {
  const ProtocolParams P = ProtocolParams::make(50, Variant::Comparison, 5);
  SplitRng rng(24);
  Population u = make_initial(P, 4, 2, RestPolicy::AllNeutral, rng);
  CoupledRun run = CoupledRun::split_construction(std::move(u));
  // break P2 at index 30: give v a lower level than u
  run.pops[1].assign(30, AgentState::strong(Color::X, 1));
  run.display[1][30] = Color::X;
  CHECK_THROWS_WITH_AS(
      run_coupled(run, {CouplingProperty::P2}, 10, rng),
      "initial configuration violates P2 at index 30", ConfigError);
}

TEST_CASE("sampled checking still runs the schedule") {
  SplitRng rng(25);
  CoupledRun run = split_run(100, 8, 4, rng);
  const auto report =
      run_coupled(run, {CouplingProperty::P2, CouplingProperty::P3}, 10000, rng, 100);
  CHECK(report.total_violations == 0);
  CHECK(report.checks_run == 100);
}

TEST_CASE("reset experiment baselines-free decay") {
  SUBCASE("all-neutral start hits both predicates at time zero") {
    const ProtocolParams P = ProtocolParams::make(100, Variant::Comparison, 8);
    SplitRng rng(26);
    const ResetResult res = reset_experiment(P, ResetInit::AllNeutral, 10.0, rng);
    REQUIRE(res.all_neutral_ptime.has_value());
    CHECK(*res.all_neutral_ptime == 0.0);
    REQUIRE(res.level_cap_ptime.has_value());
    CHECK(*res.level_cap_ptime == 0.0);
  }
  SUBCASE("an adversarial all-level-1 start dies out") {
    const ProtocolParams P = ProtocolParams::make(500, Variant::Comparison, 8);
    SplitRng rng(27);
    const ResetResult res = reset_experiment(P, ResetInit::AllLevelOne, 500.0, rng);
    REQUIRE(res.level_cap_ptime.has_value());
    REQUIRE(res.all_neutral_ptime.has_value());
    CHECK(*res.level_cap_ptime <= *res.all_neutral_ptime);
    CHECK(*res.all_neutral_ptime > 0.0);
  }
  SUBCASE("horizon expiry reports not-reached") {
    const ProtocolParams P = ProtocolParams::make(500, Variant::Comparison, 8);
    SplitRng rng(28);
    const ResetResult res = reset_experiment(P, ResetInit::AllLevelOne, 0.01, rng);
    CHECK(!res.all_neutral_ptime.has_value());
  }
}

TEST_CASE("reset first-hit stays within the logarithmic budget") {
  // adversarial all-level-1 start at s = 16; every seed must shed all levels
  // below the cap well before 20 lg n parallel time
  const ProtocolParams P = ProtocolParams::make(10000, Variant::Comparison, 16);
  const double budget = 20.0 * std::log2(10000.0);
  for (std::uint64_t r = 0; r < 5; ++r) {
    SplitRng rng = SplitRng::substream(2600, r);
    const ResetResult res = reset_experiment(P, ResetInit::AllLevelOne, budget, rng);
    REQUIRE(res.level_cap_ptime.has_value());
    CHECK(*res.level_cap_ptime <= budget);
    CHECK(*res.level_cap_ptime > 0.0);
  }
}

TEST_CASE("coupled runs reject unsupported configurations") {
  const ProtocolParams counter = ProtocolParams::make(50, Variant::CounterComparison, 5, 2);
  std::vector<Population> pops{Population(counter)};
  CHECK_THROWS_AS(CoupledRun::of_populations(std::move(pops)), ConfigError);
}
