#pragma once

// Seed derivation and the random streams used by the simulator.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uwloc {

using Rng = std::mt19937_64;

/// One splitmix64 output step applied to `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed from a master seed and a list of indices (stream tag, epoch,
/// anchor, ...). Each index is folded in with its own splitmix round, so the
/// result depends only on the values, never on the order streams are used.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t v : path) s = splitmix64(s ^ splitmix64(v + 0x632be59bd9b4e019ULL));
  return s;
}

/// Zero-mean Gaussian draw; sigma == 0 returns 0 without consuming the stream.
template <class URBG>
double gaussian(URBG& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace uwloc
