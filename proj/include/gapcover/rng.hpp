#pragma once

#include <cstdint>

namespace gapcover {

// splitmix64: tiny, seedable, and stable across platforms.  All randomized
// stages derive their streams from a master seed through mix(), so a run is
// reproducible from the single seed recorded in the artifacts.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is < 2^-50 for the n used here (n < 2^14)
        return next() % n;
    }
};

/// Deterministic sub-stream seed from a master seed and up to two labels.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 g(master ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL));
    g.next();
    return g.next();
}

} // namespace gapcover
