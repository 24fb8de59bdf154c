#include "trajpriv/publisher.hpp"

#include <array>
#include <cmath>
#include <string>

#include "trajpriv/errors.hpp"

namespace trajpriv {

void PublishConfig::check() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
  if (deviation_d < 0) throw ConfigError("deviation must be non-negative");
}

long min_region_size(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
  long ell = static_cast<long>(std::ceil(1.0 / lambda - 1e-9));
  while (1.0 / static_cast<double>(ell) > lambda) ++ell;
  return std::max(ell, 1L);
}

bool grow_along(Region& r, Axis axis, const GridSpace& gs) {
  if (axis == Axis::kLatitude) {
    const bool up = r.row0 > 0;
    const bool down = r.row_end() < gs.n_rows();
    if (!up && !down) return false;
    if (up) {
      --r.row0;
      ++r.height;
    }
    if (down) ++r.height;
  } else {
    const bool left = r.col0 > 0;
    const bool right = r.col_end() < gs.n_cols();
    if (!left && !right) return false;
    if (left) {
      --r.col0;
      ++r.width;
    }
    if (right) ++r.width;
  }
  return true;
}

Region expand_region_by(Cell tl, long ell, const GridSpace& gs,
                        const std::function<Axis()>& next_axis) {
  if (!gs.valid(tl)) throw OutOfGridError("true location outside the grid");
  if (ell < 1) throw ConfigError("minimum region size must be at least 1");
  if (gs.n_cells() < ell) {
    throw RegionSizeError("grid has " + std::to_string(gs.n_cells()) +
                          " cells, fewer than the required region size " + std::to_string(ell));
  }
  Region r = Region::singleton(tl);
  while (r.area() < ell) {
    const Axis axis = next_axis();
    if (!grow_along(r, axis, gs)) {
      grow_along(r, axis == Axis::kLatitude ? Axis::kLongitude : Axis::kLatitude, gs);
    }
  }
  return r;
}

Region expand_region(Cell tl, long ell, const GridSpace& gs, Rng& rng) {
  return expand_region_by(tl, ell, gs, [&rng] {
    return uniform_index(rng, 2) == 0 ? Axis::kLatitude : Axis::kLongitude;
  });
}

Region shift_region(const Region& region, Direction dir, int d, const GridSpace& gs) {
  Region r = region;
  switch (dir) {
    case Direction::kNorth: r.row0 -= d; break;
    case Direction::kSouth: r.row0 += d; break;
    case Direction::kEast: r.col0 += d; break;
    case Direction::kWest: r.col0 -= d; break;
  }
  r.row0 = std::clamp(r.row0, 0, std::max(0, gs.n_rows() - r.height));
  r.col0 = std::clamp(r.col0, 0, std::max(0, gs.n_cols() - r.width));
  return r;
}

Region apply_deviation(const Region& region, Cell tl, int d, const GridSpace& gs, Rng& rng) {
  for (int shift = d; shift > 0; --shift) {
    std::array<Direction, 4> remaining = {Direction::kNorth, Direction::kEast, Direction::kSouth,
                                          Direction::kWest};
    std::size_t n = remaining.size();
    while (n > 0) {
      const std::size_t pick = uniform_index(rng, n);
      const Region moved = shift_region(region, remaining[pick], shift, gs);
      if (contains(moved, tl)) return moved;
      remaining[pick] = remaining[n - 1];
      --n;
    }
  }
  return region;
}

PublishedTrajectory publish_trajectory(const TrajectoryTrue& traj, const PublishConfig& cfg,
                                       const GridSpace& gs) {
  cfg.check();
  const long ell = min_region_size(cfg.lambda);
  Rng rng = substream(cfg.seed, traj.id);
  PublishedTrajectory out;
  out.id = traj.id;
  out.regions.reserve(traj.points.size());
  for (const auto& p : traj.points) {
    const Region expanded = expand_region(p.cell, ell, gs, rng);
    out.regions.push_back({p.t, apply_deviation(expanded, p.cell, cfg.deviation_d, gs, rng)});
  }
  return out;
}

bool verify_privacy(const PublishedTrajectory& pub, double lambda) {
  for (const auto& step : pub.regions) {
    if (step.region.area() < 1 || 1.0 / static_cast<double>(step.region.area()) > lambda) {
      return false;
    }
  }
  return true;
}

double theoretical_max_error(long ell, int d, double g) {
  // ceil((ell+1)/2) in integers.
  const long half = (ell + 2) / 2;
  return static_cast<double>(half + d) * g;
}

}  // namespace trajpriv
