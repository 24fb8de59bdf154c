#include "trajpriv/state_space.hpp"

#include <algorithm>
#include <string>

#include "trajpriv/errors.hpp"
#include "trajpriv/rng.hpp"
#include "trajpriv/t2p.hpp"

namespace trajpriv {

namespace {

template <typename T>
std::optional<int> sorted_index(const std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return std::nullopt;
  return static_cast<int>(it - v.begin());
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string describe(const Region& r) {
  return "(row0=" + std::to_string(r.row0) + ", col0=" + std::to_string(r.col0) +
         ", h=" + std::to_string(r.height) + ", w=" + std::to_string(r.width) + ")";
}

}  // namespace

std::optional<int> HiddenSpace::index_of(Cell c) const { return sorted_index(states, c); }

std::optional<int> ObservationAlphabet::index_of(const Region& r) const {
  return sorted_index(symbols, r);
}

HiddenSpace build_hidden_space(const std::vector<PublishedTrajectory>& pubs) {
  HiddenSpace hs;
  for (const auto& pub : pubs) {
    for (const auto& step : pub.regions) {
      const Region& r = step.region;
      for (int row = r.row0; row < r.row_end(); ++row) {
        for (int col = r.col0; col < r.col_end(); ++col) hs.states.push_back({row, col});
      }
    }
  }
  sort_unique(hs.states);
  if (hs.states.empty()) throw ConfigError("no published regions to build a hidden space from");
  return hs;
}

int required_gamma(const std::vector<PublishedTrajectory>& pubs, long ell) {
  long worst = ell;
  for (const auto& pub : pubs) {
    for (const auto& step : pub.regions) worst = std::max(worst, step.region.area());
  }
  return static_cast<int>(worst - ell);
}

ObservationAlphabet build_observation_alphabet(const std::vector<PublishedTrajectory>& pubs,
                                               const HiddenSpace& hidden, long ell, int gamma,
                                               const GridSpace& gs) {
  if (gamma < 0) throw ConfigError("gamma must be non-negative");
  const long hi = ell + gamma;
  ObservationAlphabet oa;
  for (const auto& pub : pubs) {
    for (const auto& step : pub.regions) {
      const long area = step.region.area();
      if (area < ell || area > hi) {
        throw GammaTooSmallError("published region " + describe(step.region) +
                                 " of trajectory '" + pub.id + "' has area " + std::to_string(area) + " outside [" +
                          std::to_string(ell) + ", " + std::to_string(hi) +
                          "]; gamma is too small for this corpus");
      }
      oa.symbols.push_back(step.region);
    }
  }
  for (Cell c : hidden.states) {
    const Region guess = t2p_predict(c, ell, gs);
    if (guess.area() >= ell && guess.area() <= hi) oa.symbols.push_back(guess);
  }
  sort_unique(oa.symbols);
  return oa;
}

HmmParams::Mask emission_mask(const HiddenSpace& hidden, const ObservationAlphabet& alphabet) {
  const auto H = static_cast<Eigen::Index>(hidden.size());
  const auto O = static_cast<Eigen::Index>(alphabet.size());
  HmmParams::Mask mask = HmmParams::Mask::Constant(H, O, false);
  for (Eigen::Index o = 0; o < O; ++o) {
    const Region& r = alphabet.symbols[static_cast<std::size_t>(o)];
    for (int row = r.row0; row < r.row_end(); ++row) {
      for (int col = r.col0; col < r.col_end(); ++col) {
        if (auto h = hidden.index_of({row, col})) mask(*h, o) = true;
      }
    }
  }
  return mask;
}

HmmParams init_params(const HiddenSpace& hidden, const ObservationAlphabet& alphabet,
                      std::uint64_t seed) {
  if (hidden.size() == 0 || alphabet.size() == 0) {
    throw ConfigError("hidden space and observation alphabet must be non-empty");
  }
  const auto H = static_cast<Eigen::Index>(hidden.size());
  const auto O = static_cast<Eigen::Index>(alphabet.size());

  HmmParams p;
  p.allowed = emission_mask(hidden, alphabet);
  for (Eigen::Index h = 0; h < H; ++h) {
    if (!p.allowed.row(h).any()) {
      const Cell c = hidden.states[static_cast<std::size_t>(h)];
      throw ConfigError("hidden state (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                        ") lies in no observation symbol");
    }
  }
  p.pi_fwd = HmmParams::Vector::Constant(H, 1.0);
  p.pi_bwd = HmmParams::Vector::Constant(H, 1.0);
  p.a_fwd = HmmParams::Matrix::Constant(H, H, 1.0);
  p.a_bwd = HmmParams::Matrix::Constant(H, H, 1.0);
  p.b = p.allowed.cast<double>().matrix();

  Rng rng = make_rng(derive_seed(seed, "init_params"));
  auto jitter = [&rng](auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) *= 1.0 + 0.01 * (2.0 * uniform01(rng) - 1.0);
    }
  };
  jitter(p.pi_fwd);
  jitter(p.pi_bwd);
  jitter(p.a_fwd);
  jitter(p.a_bwd);
  jitter(p.b);

  p.pi_fwd /= p.pi_fwd.sum();
  p.pi_bwd /= p.pi_bwd.sum();
  normalize_rows(p.a_fwd);
  normalize_rows(p.a_bwd);
  apply_emission_mask(p);
  return p;
}

std::vector<int> encode(const PublishedTrajectory& pub, const ObservationAlphabet& alphabet) {
  std::vector<int> out;
  out.reserve(pub.regions.size());
  for (const auto& step : pub.regions) {
    auto idx = alphabet.index_of(step.region);
    if (!idx) {
      throw ConfigError("published region " + describe(step.region) + " of trajectory '" +
                        pub.id + "' is not in the observation alphabet");
    }
    out.push_back(*idx);
  }
  return out;
}

}  // namespace trajpriv
