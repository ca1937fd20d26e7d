#pragma once

#include <cstdint>
#include <random>

namespace setproc {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based split: the seed for sub-stream `stream` of `seed`. Distinct
// (seed, stream) pairs give unrelated generators, so parallel workers can
// each own one without coordination.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(derive_seed(seed, stream));
}

// Stream ids for the subcomponents that draw randomness.
namespace streams {
inline constexpr std::uint64_t kSimulate = 1;
inline constexpr std::uint64_t kGmmInit = 2;
inline constexpr std::uint64_t kEmRestart = 3;
inline constexpr std::uint64_t kGibbs = 4;
inline constexpr std::uint64_t kFolds = 5;
}  // namespace streams

}  // namespace setproc
