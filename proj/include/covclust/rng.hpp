#pragma once

/**
 * @file rng.hpp
 * @brief Counter-based random streams for reproducible experiments.
 *
 * Every stream is a 64-bit key. Draw number i of a stream is
 *
 *     splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15)
 *
 * which is exactly the SplitMix64 sequence seeded with `key`, so any draw can
 * be computed without generating its predecessors. Keys are derived from
 * (seed, purpose tag, index) by `derive_key`:
 *
 *     k0  = splitmix64_mix(seed ^ fnv1a64(tag))
 *     key = splitmix64_mix(k0 + (index + 1) * 0x9E3779B97F4A7C15)
 *
 * Doubles use the top 53 bits. Normals use Box-Muller on consecutive pairs of
 * draws and return both variates in order (cos branch first).
 */

#include <cstdint>
#include <limits>
#include <string_view>

namespace covclust {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    const std::uint64_t k0 = splitmix64_mix(seed ^ fnv1a64(tag));
    return splitmix64_mix(k0 + (index + 1) * kGoldenGamma);
}

/// Sequential reader over one counter-based stream. Satisfies
/// UniformRandomBitGenerator, but the helpers below are what the library uses,
/// since standard distributions are not reproducible across toolchains.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0)
        : key_(derive_key(seed, tag, index)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Draw at an absolute counter position; does not move the cursor.
    result_type at(std::uint64_t counter) const { return splitmix64_mix(key_ + (counter + 1) * kGoldenGamma); }

    result_type operator()() { return at(counter_++); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on the open interval (0, 1).
    double uniform_open();
    /// Uniform integer on [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace covclust
