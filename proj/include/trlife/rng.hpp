#pragma once

#include <cstdint>

namespace trlife::rng {

// SplitMix64 (Steele, Lea & Flood 2014). The update is fully specified in
// integer arithmetic, so a given seed reproduces the same stream on every
// platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double strictly inside (0, 1).
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Stateless output mix, used to decorrelate derived stream seeds.
constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent substream for a counter value (one per Monte-Carlo trial), so
// trial results do not depend on evaluation order.
constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t counter) {
    return SplitMix64{mix(seed + 0x9e3779b97f4a7c15ULL * (counter + 1))};
}

}  // namespace trlife::rng
