#pragma once

#include <cstdint>
#include <random>

namespace scldpc::rng {

using Engine = std::mt19937_64;

// SplitMix64 finalizer, used for seed derivation.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Per-trial seed derived from (master, a, b). Trials get independent streams
// whatever order a scheduler runs them in.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0) {
    uint64_t h = mix64(master);
    h = mix64(h ^ (a * 0xc2b2ae3d27d4eb4full));
    h = mix64(h ^ (b * 0x165667b19e3779f9ull));
    return h;
}

// Unbiased integer in [0, n). Lemire multiply-shift with rejection; avoids
// std::uniform_int_distribution so streams are identical across toolchains.
inline uint64_t uniform_below(Engine& g, uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(g()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
        const uint64_t t = (0 - n) % n;
        while (lo < t) {
            m = static_cast<__uint128_t>(g()) * n;
            lo = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace scldpc::rng
