#pragma once

#include <cstdint>

namespace sgn {

// Counter-based randomness: every draw is a pure function of (key, counter),
// so Monte Carlo trials and synthesis modes are reproducible independently of
// execution order or thread count.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic mix of a key and a counter into a fresh 64-bit word.
inline std::uint64_t mix_seed(std::uint64_t key, std::uint64_t counter) {
    // two rounds keep key and counter bits well separated
    return detail::splitmix64(detail::splitmix64(key ^ 0x5851f42d4c957f2dULL) + counter);
}

/// Uniform double in [0, 1) from (key, counter).
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(mix_seed(key, counter) >> 11) * 0x1.0p-53;
}

}  // namespace sgn
