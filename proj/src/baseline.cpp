#include "trajpriv/baseline.hpp"

#include "trajpriv/errors.hpp"
#include "trajpriv/rng.hpp"

namespace trajpriv {

TrajectoryTrue baseline_attack(const PublishedTrajectory& pub, std::uint64_t seed) {
  if (pub.regions.empty()) throw ConfigError("published trajectory '" + pub.id + "' is empty");
  Rng rng = substream(seed, pub.id);
  TrajectoryTrue out;
  out.id = pub.id;
  out.points.reserve(pub.regions.size());
  for (const auto& step : pub.regions) {
    const Region& r = step.region;
    // Row-major index into the region.
    const auto k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(r.area())));
    out.points.push_back({step.t, {r.row0 + k / r.width, r.col0 + k % r.width}});
  }
  return out;
}

std::vector<TrajectoryTrue> baseline_attack(const std::vector<PublishedTrajectory>& pubs,
                                            std::uint64_t seed) {
  std::vector<TrajectoryTrue> out;
  out.reserve(pubs.size());
  for (const auto& pub : pubs) out.push_back(baseline_attack(pub, seed));
  return out;
}

}  // namespace trajpriv
