#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bdsvie::rng {

/// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Stateless counter-based word: every (seed, stream, index) triple maps to
/// one 64-bit word, so any entry of a stream can be produced independently
/// of evaluation order.
inline std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(mix64(seed) ^ mix64(stream ^ 0x5851f42d4c957f2dull)) ^
                 mix64(index ^ 0xda942042e4dd58b5ull));
}

/// Uniform in (0, 1]; strictly positive so log() below is safe.
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return (static_cast<double>(word_at(seed, stream, index) >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes word indices 2q and 2q+1.
inline double gaussian_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t q) {
    const double u1 = uniform_at(seed, stream, 2 * q);
    const double u2 = uniform_at(seed, stream, 2 * q + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bdsvie::rng
