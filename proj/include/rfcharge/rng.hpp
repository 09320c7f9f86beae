#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rfcharge {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a path of stream labels, so
/// that e.g. (master, replication, purpose, user) never collide in practice.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(parent);
  for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream purposes for derive_seed.
enum class Stream : std::uint64_t {
  Deployment = 1,
  Mobility = 2,
  Battery = 3,
  Placement = 4,
};

}  // namespace rfcharge
