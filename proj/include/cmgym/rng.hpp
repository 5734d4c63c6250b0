#pragma once

#include <cstdint>
#include <random>

namespace cmgym {

using Rng = std::mt19937_64;

/// Purposes for independent random streams. Each flight draws from its own
/// stream per purpose, so changing one hazard setting leaves every other
/// draw in a run untouched.
enum class StreamTag : std::uint64_t {
    Demand = 1,
    Battery = 2,
    Consumption = 3,
    Navigation = 4,
    Policy = 5,
    Sweep = 6,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
    return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ index);
}

inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, tag, index));
}

}  // namespace cmgym
