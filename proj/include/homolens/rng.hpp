#pragma once

#include <cstdint>
#include <random>

namespace homolens {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based split: each (base, stream) pair names an independent stream.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(derive_seed(seed, stream));
}

// Stream ids used throughout the library.
namespace stream {
inline constexpr std::uint64_t manifold = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t estimator = 3;
}  // namespace stream

}  // namespace homolens
