#pragma once

// Seeding contract for every random draw in the library.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard for a given 64-bit seed. Distributions are not taken from <random>
// because their algorithms are implementation-defined; the conversions below
// are written out so a seed maps to the same graph on every platform.
//
// Derived streams (one per trial) are keyed by hashing the master seed with
// the trial coordinates through SplitMix64, so the result of a trial does not
// depend on the order in which trials are executed.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qwsearch {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable hash of a seed and an ordered list of integer keys.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Per-trial seed for campaign (master_seed, n, trial_index).
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t n,
                                   std::uint64_t trial_index) noexcept {
  return derive_seed(master, {n, trial_index});
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, bound) by 128-bit multiply-shift.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t bound) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(eng()) * bound;
  return static_cast<std::uint64_t>(prod >> 64);
}

}  // namespace qwsearch
