#pragma once

#include <cstdint>
#include <random>

namespace legible {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of the generator,
/// so results do not depend on library internals.
inline double canonical(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform index in [0, n). Rejection sampling on the raw stream.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

/// splitmix64 step; used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace legible
