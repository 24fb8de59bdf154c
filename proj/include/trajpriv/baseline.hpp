#pragma once

#include <cstdint>
#include <vector>

#include "trajpriv/grid.hpp"

namespace trajpriv {

/// Guesses one cell uniformly from each published region, independently per
/// step. The stream is derived from (seed, pub.id).
TrajectoryTrue baseline_attack(const PublishedTrajectory& pub, std::uint64_t seed);

std::vector<TrajectoryTrue> baseline_attack(const std::vector<PublishedTrajectory>& pubs,
                                            std::uint64_t seed);

}  // namespace trajpriv
