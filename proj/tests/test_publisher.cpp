#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "trajpriv/errors.hpp"
#include "trajpriv/publisher.hpp"

using namespace trajpriv;

namespace {

GridSpace grid(int rows, int cols) { return GridSpace::with_shape(116.28, 40.0, 100.0, rows, cols); }

std::function<Axis()> sequence(std::vector<Axis> axes) {
  auto i = std::make_shared<std::size_t>(0);
  return [axes, i] { return axes.at((*i)++); };
}

}  // namespace

TEST_CASE("min_region_size") {
  CHECK(min_region_size(0.1) == 10);
  CHECK(min_region_size(1.0) == 1);
  CHECK(min_region_size(0.05) == 20);
  CHECK(min_region_size(0.2) == 5);
  CHECK(min_region_size(0.3) == 4);
  for (double lambda = 0.01; lambda <= 1.0; lambda += 0.0137) {
    const long ell = min_region_size(lambda);
    CHECK(1.0 / static_cast<double>(ell) <= lambda);
    if (ell > 1) CHECK(1.0 / static_cast<double>(ell - 1) > lambda);
  }
}

TEST_CASE("expand_region with ell 1 is the cell itself") {
  Rng rng = make_rng(1);
  CHECK(expand_region({5, 5}, 1, grid(11, 11), rng) == Region{5, 5, 1, 1});
}

TEST_CASE("expand_region by lat, lon, lat gives a centered 5x3") {
  const Region r = expand_region_by({5, 5}, 10, grid(11, 11),
                                    sequence({Axis::kLatitude, Axis::kLongitude, Axis::kLatitude}));
  CHECK(r == Region{3, 4, 5, 3});
  CHECK(r.area() == 15);
}

TEST_CASE("expand_region clips at a corner") {
  const Region r = expand_region_by({0, 0}, 9, grid(11, 11), [] { return Axis::kLongitude; });
  // Width grows east only: 1, 2, ..., 9.
  CHECK(r == Region{0, 0, 1, 9});
}

TEST_CASE("expand_region switches axis when one is exhausted") {
  // A 1-row grid can only grow along longitude.
  const Region r = expand_region_by({0, 3}, 5, grid(1, 10), [] { return Axis::kLatitude; });
  CHECK(r == Region{0, 1, 1, 5});
}

TEST_CASE("expand_region rejects grids that are too small") {
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(expand_region({0, 0}, 10, grid(3, 3), rng), RegionSizeError);
}

TEST_CASE("expand_region stays centered where the grid allows") {
  const GridSpace gs = grid(21, 21);
  Rng rng = make_rng(42);
  for (int i = 0; i < 200; ++i) {
    const Region r = expand_region({10, 10}, 10, gs, rng);
    CHECK(r.area() >= 10);
    CHECK(contains(r, {10, 10}));
    // Symmetric growth leaves the cell exactly in the middle.
    CHECK(r.row0 + r.row_end() - 1 == 20);
    CHECK(r.col0 + r.col_end() - 1 == 20);
  }
}

TEST_CASE("shift_region translates then clamps") {
  const GridSpace gs = grid(11, 11);
  const Region r{4, 3, 3, 5};  // centered on (5, 5)
  CHECK(shift_region(r, Direction::kEast, 2, gs) == Region{4, 5, 3, 5});
  CHECK(shift_region(r, Direction::kWest, 2, gs) == Region{4, 1, 3, 5});
  CHECK(shift_region(r, Direction::kNorth, 2, gs) == Region{2, 3, 3, 5});
  CHECK(shift_region(r, Direction::kSouth, 2, gs) == Region{6, 3, 3, 5});
  CHECK(shift_region(r, Direction::kWest, 9, gs) == Region{4, 0, 3, 5});
  CHECK(shift_region(r, Direction::kSouth, 9, gs) == Region{8, 3, 3, 5});
}

TEST_CASE("apply_deviation with d=0 is the identity") {
  Rng rng = make_rng(3);
  CHECK(apply_deviation({4, 3, 3, 5}, {5, 5}, 0, grid(11, 11), rng) == Region{4, 3, 3, 5});
}

TEST_CASE("apply_deviation d=2 keeps the true cell") {
  const GridSpace gs = grid(11, 11);
  Rng rng = make_rng(5);
  bool saw_east = false;
  for (int i = 0; i < 200; ++i) {
    const Region r = apply_deviation({4, 3, 3, 5}, {5, 5}, 2, gs, rng);
    CHECK(contains(r, {5, 5}));
    // North/south by 2 would evict (5,5) from a height-3 region.
    const bool ok = r == Region{4, 5, 3, 5} || r == Region{4, 1, 3, 5};
    CHECK(ok);
    saw_east |= r == Region{4, 5, 3, 5};
  }
  CHECK(saw_east);
}

TEST_CASE("apply_deviation d=3 redraws evicting directions") {
  // Every direction at d=3 evicts the centre of a 3x5 region, so the
  // shift falls back to d=2 along the width-5 axis.
  const GridSpace gs = grid(11, 11);
  Rng rng = make_rng(6);
  for (int i = 0; i < 200; ++i) {
    const Region r = apply_deviation({4, 3, 3, 5}, {5, 5}, 3, gs, rng);
    CHECK(contains(r, {5, 5}));
    CHECK(r.height == 3);
    CHECK(r.width == 5);
  }
}

TEST_CASE("publish_trajectory") {
  const GridSpace gs = grid(20, 20);
  SUBCASE("lambda 1 publishes singletons") {
    const TrajectoryTrue traj{"a", {{0, {3, 4}}}};
    const auto pub = publish_trajectory(traj, {1.0, 0, 9}, gs);
    REQUIRE(pub.regions.size() == 1);
    CHECK(pub.regions[0] == TimedRegion{0, {3, 4, 1, 1}});
  }

  TrajectoryTrue traj{"walk", {}};
  for (int i = 0; i < 15; ++i) traj.points.push_back({18 * i, {2 + i, 17 - i}});

  SUBCASE("privacy and containment for every lambda and deviation") {
    for (double lambda : {0.05, 0.1, 0.2}) {
      for (int d : {0, 1, 2, 3}) {
        const auto pub = publish_trajectory(traj, {lambda, d, 11}, gs);
        REQUIRE(pub.regions.size() == traj.points.size());
        CHECK(verify_privacy(pub, lambda));
        for (std::size_t i = 0; i < pub.regions.size(); ++i) {
          CHECK(pub.regions[i].t == traj.points[i].t);
          CHECK(gs.inside(pub.regions[i].region));
          CHECK(contains(pub.regions[i].region, traj.points[i].cell));
        }
      }
    }
  }

  SUBCASE("deterministic under the seed and id") {
    const auto a = publish_trajectory(traj, {0.1, 2, 11}, gs);
    CHECK(a == publish_trajectory(traj, {0.1, 2, 11}, gs));
    CHECK_FALSE(a == publish_trajectory(traj, {0.1, 2, 12}, gs));
  }

  SUBCASE("invalid config") {
    CHECK_THROWS_AS(publish_trajectory(traj, {0.0, 0, 1}, gs), ConfigError);
    CHECK_THROWS_AS(publish_trajectory(traj, {1.5, 0, 1}, gs), ConfigError);
    CHECK_THROWS_AS(publish_trajectory(traj, {0.1, -1, 1}, gs), ConfigError);
  }
}

TEST_CASE("verify_privacy") {
  PublishedTrajectory pub{"p", {{0, {0, 0, 2, 5}}, {18, {0, 0, 5, 2}}}};
  CHECK(verify_privacy(pub, 0.1));
  pub.regions.push_back({36, {0, 0, 3, 3}});
  CHECK_FALSE(verify_privacy(pub, 0.1));
  CHECK(verify_privacy(PublishedTrajectory{"e", {}}, 0.1));
}

TEST_CASE("theoretical_max_error") {
  CHECK(theoretical_max_error(10, 0, 99.383) == doctest::Approx(596.298).epsilon(1e-9));
  CHECK(theoretical_max_error(10, 2, 99.383) == doctest::Approx(795.064).epsilon(1e-9));
  CHECK(theoretical_max_error(10, 1, 148.957) == doctest::Approx(1042.699).epsilon(1e-9));
  // ceil((ell + 1) / 2) on both parities.
  CHECK(theoretical_max_error(1, 0, 100) == doctest::Approx(100));
  CHECK(theoretical_max_error(20, 0, 100) == doctest::Approx(1100));
  CHECK(theoretical_max_error(5, 0, 100) == doctest::Approx(300));
}
