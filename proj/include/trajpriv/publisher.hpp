#pragma once

#include <cstdint>
#include <functional>

#include "trajpriv/grid.hpp"
#include "trajpriv/rng.hpp"

namespace trajpriv {

struct PublishConfig {
  double lambda = 0.1;   // confidence bound, in (0, 1]
  int deviation_d = 0;   // shift in cells
  std::uint64_t seed = 0;

  void check() const;
};

/// Smallest region area whose confidence 1/area does not exceed lambda.
long min_region_size(double lambda);

enum class Axis { kLatitude, kLongitude };

/// Grows `r` by one cell on both sides along `axis`, or on the one side that
/// stays inside the grid. Returns false when neither side can grow.
bool grow_along(Region& r, Axis axis, const GridSpace& gs);

/// Expansion driven by an explicit axis source; `next_axis` is called once per step.
Region expand_region_by(Cell tl, long ell, const GridSpace& gs,
                        const std::function<Axis()>& next_axis);

/// Greedy symmetric expansion from the 1x1 region at `tl` with uniformly drawn
/// axes until the area reaches `ell`. A draw whose axis is blocked on both
/// sides is redrawn on the other axis. Throws RegionSizeError when the grid
/// has fewer than `ell` cells.
Region expand_region(Cell tl, long ell, const GridSpace& gs, Rng& rng);

enum class Direction { kNorth, kEast, kSouth, kWest };

/// Translates `region` by `d` cells, then pulls it back inside the grid.
Region shift_region(const Region& region, Direction dir, int d, const GridSpace& gs);

/// Shifts `region` by `d` cells north, east, south or west, pulling it back
/// inside the grid when it overhangs. Directions that would drop `tl` are
/// redrawn; if all four do, the shift is retried with d-1.
Region apply_deviation(const Region& region, Cell tl, int d, const GridSpace& gs, Rng& rng);

/// Publishes every step of `traj`. The random stream is derived from
/// (cfg.seed, traj.id) so the result does not depend on corpus order.
PublishedTrajectory publish_trajectory(const TrajectoryTrue& traj, const PublishConfig& cfg,
                                       const GridSpace& gs);

/// True iff every region satisfies 1/area <= lambda. Vacuously true when empty.
bool verify_privacy(const PublishedTrajectory& pub, double lambda);

/// Worst-case error (ceil((ell+1)/2) + d) * g in meters.
double theoretical_max_error(long ell, int d, double g);

}  // namespace trajpriv
