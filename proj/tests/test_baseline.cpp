#include <doctest.h>

#include <map>

#include "trajpriv/baseline.hpp"

using namespace trajpriv;

TEST_CASE("baseline on a singleton region") {
  const PublishedTrajectory pub{"a", {{0, {3, 4, 1, 1}}, {18, {3, 5, 1, 1}}}};
  const auto pred = baseline_attack(pub, 1);
  CHECK(pred.id == "a");
  CHECK(pred.points == std::vector<TimedCell>{{0, {3, 4}}, {18, {3, 5}}});
}

TEST_CASE("baseline is uniform over a 2x5 region") {
  constexpr int kDraws = 100000;
  PublishedTrajectory pub{"u", {}};
  for (int i = 0; i < kDraws; ++i) pub.regions.push_back({i, {2, 3, 2, 5}});
  const auto pred = baseline_attack(pub, 77);
  std::map<Cell, int> freq;
  for (const auto& p : pred.points) {
    REQUIRE(contains({2, 3, 2, 5}, p.cell));
    ++freq[p.cell];
  }
  REQUIRE(freq.size() == 10);
  double chi2 = 0;
  for (const auto& [cell, n] : freq) {
    CHECK(static_cast<double>(n) / kDraws == doctest::Approx(0.1).epsilon(0.1));
    const double e = kDraws / 10.0;
    chi2 += (n - e) * (n - e) / e;
  }
  // Upper 0.1% point of chi-square with 9 degrees of freedom.
  CHECK(chi2 < 27.877);
}

TEST_CASE("baseline is deterministic per seed and id") {
  const PublishedTrajectory a{"a", {{0, {0, 0, 4, 4}}, {18, {1, 1, 4, 4}}, {36, {2, 2, 4, 4}}}};
  PublishedTrajectory b = a;
  b.id = "b";
  CHECK(baseline_attack(a, 3) == baseline_attack(a, 3));
  const auto corpus = baseline_attack(std::vector<PublishedTrajectory>{b, a}, 3);
  CHECK(corpus[1] == baseline_attack(a, 3));  // independent of corpus order
  bool differs = false;
  for (std::uint64_t s = 4; s < 10; ++s) differs |= !(baseline_attack(a, s) == baseline_attack(a, 3));
  CHECK(differs);
}
