#include "trajpriv/rng.hpp"

namespace trajpriv {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, then mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(splitmix64(seed) ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // 2^64 mod n; draws in the final partial block are rejected for exact uniformity.
  const std::uint64_t rem = (0 - n) % n;
  std::uint64_t x = rng();
  while (rem != 0 && x > Rng::max() - rem) x = rng();
  return x % n;
}

}  // namespace trajpriv
