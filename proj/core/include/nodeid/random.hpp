#pragma once

#include <cstdint>
#include <random>

namespace nodeid {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-trial streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `seed`. Streams for distinct indices are
/// decorrelated, so trials can run in any order and still agree bit-for-bit.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(stream_seed(seed, index));
}

}  // namespace nodeid
