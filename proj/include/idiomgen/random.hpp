#pragma once

#include <cstdint>
#include <random>
#include <variant>

namespace idiomgen {

struct Exhaustive {};
struct Random {
  std::uint64_t seed = 0;
};
using Mode = std::variant<Exhaustive, Random>;

inline bool is_random(const Mode& m) { return std::holds_alternative<Random>(m); }

// Deterministically derives an independent stream seed from a master seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline long long pick_between(Rng& rng, long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

}  // namespace idiomgen
