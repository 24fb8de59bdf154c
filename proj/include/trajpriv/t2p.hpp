#pragma once

#include "trajpriv/grid.hpp"

namespace trajpriv {

/// The attacker's assumed true-location-to-published-region mapping: a
/// centered region of area >= ell grown by alternating axes, rows first.
/// Deterministic. Throws RegionSizeError when the grid is too small.
Region t2p_predict(Cell tl, long ell, const GridSpace& gs);

/// Intersection over union of two regions, in [0, 1].
inline double iou_reward(const Region& pred, const Region& truth) {
  const long inter = intersection_area(pred, truth);
  return static_cast<double>(inter) / static_cast<double>(pred.area() + truth.area() - inter);
}

}  // namespace trajpriv
