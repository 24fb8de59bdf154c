#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trajpriv/grid.hpp"
#include "trajpriv/hmm.hpp"

namespace trajpriv {

/// Candidate true locations: every cell covered by some observed region, row-major.
struct HiddenSpace {
  std::vector<Cell> states;

  std::size_t size() const { return states.size(); }
  std::optional<int> index_of(Cell c) const;
};

/// Candidate published regions in canonical (row0, col0, height, width) order.
struct ObservationAlphabet {
  std::vector<Region> symbols;

  std::size_t size() const { return symbols.size(); }
  std::optional<int> index_of(const Region& r) const;
};

HiddenSpace build_hidden_space(const std::vector<PublishedTrajectory>& pubs);

/// Observed regions plus the attacker's centered guess for every hidden state,
/// keeping areas in [ell, ell + gamma]. Throws ConfigError naming the first
/// observed region whose area falls outside that band.
ObservationAlphabet build_observation_alphabet(const std::vector<PublishedTrajectory>& pubs,
                                               const HiddenSpace& hidden, long ell, int gamma,
                                               const GridSpace& gs);

/// allowed(h, o) == contains(symbol o, state h).
HmmParams::Mask emission_mask(const HiddenSpace& hidden, const ObservationAlphabet& alphabet);

/// Uniform parameters under the emission mask with a seeded +-1% jitter.
/// Throws ConfigError when some hidden state lies in no symbol.
HmmParams init_params(const HiddenSpace& hidden, const ObservationAlphabet& alphabet,
                      std::uint64_t seed);

/// Smallest slack that admits every observed region for the given ell.
int required_gamma(const std::vector<PublishedTrajectory>& pubs, long ell);

/// Symbol indices of one published trajectory.
std::vector<int> encode(const PublishedTrajectory& pub, const ObservationAlphabet& alphabet);

/// State spaces plus parameters; the unit persisted between CLI stages.
struct AttackModel {
  HiddenSpace hidden;
  ObservationAlphabet alphabet;
  HmmParams params;
};

}  // namespace trajpriv
