#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace derval::rng {

// Counter-based deterministic RNG. Every random quantity in the project is a
// pure function of (key, counter), so results do not depend on thread count
// or evaluation order. Keys are derived hierarchically from the master seed.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Key {
    std::uint64_t state = 0;

    constexpr Key child(std::uint64_t v) const { return Key{mix64(state ^ mix64(v))}; }
    constexpr Key child(std::string_view tag) const { return child(hash_str(tag)); }

    constexpr std::uint64_t bits(std::uint64_t counter) const {
        return mix64(state ^ mix64(counter ^ 0xA5A5A5A5A5A5A5A5ULL));
    }

    // Uniform in [0, 1).
    double u01(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes counters 2c and 2c+1.
    double normal(std::uint64_t counter) const {
        const double u1 = static_cast<double>((bits(2 * counter) >> 11) + 1) * 0x1.0p-53;
        const double u2 = u01(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

inline Key master(std::uint64_t seed) { return Key{mix64(seed ^ 0xD1B54A32D192ED03ULL)}; }

}  // namespace derval::rng
