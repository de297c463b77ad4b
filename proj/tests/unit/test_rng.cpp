#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "popcomp/rng.hpp"

using popcomp::SplitRng;

TEST_CASE("same seed reproduces the stream bit for bit") {
  SplitRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams are distinct") {
  SplitRng a = SplitRng::substream(7, 0);
  SplitRng b = SplitRng::substream(7, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("next_unit stays in [0, 1)") {
  SplitRng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bounded respects the bound and covers small ranges") {
  SplitRng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.bounded(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("ordered pair draw is uniform over distinct pairs (chi-squared)") {
  // n = 5 has 20 ordered pairs; 2e5 draws, fixed seed. The 1e-6 quantile of
  // chi-squared with 19 degrees of freedom is about 63.
  const std::uint64_t n = 5;
  const int draws = 200000;
  SplitRng rng(1234);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> hist;
  for (int i = 0; i < draws; ++i) {
    const auto pr = rng.ordered_pair(n);
    CHECK(pr.first != pr.second);
    CHECK(pr.first < n);
    CHECK(pr.second < n);
    hist[pr] += 1;
  }
  CHECK(hist.size() == n * (n - 1));
  const double expected = double(draws) / double(n * (n - 1));
  double chi2 = 0.0;
  for (const auto& [pair, count] : hist) {
    const double d = count - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 63.0);
}
