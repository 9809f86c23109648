#pragma once

#include <cstdint>

namespace svx {

/// Counter-based generator with splittable streams.
///
/// A stream is identified by a 64-bit key. The i-th output of a stream is
/// mix(key + (i + 1) * 0x9E3779B97F4A7C15), where mix is the SplitMix64
/// finalizer:
///
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
///
/// split(id) derives the child key mix(key ^ mix(id + 0x9E3779B97F4A7C15)).
/// uniform() maps the top 53 bits to [0, 1); normal() is Box-Muller over the
/// two uniforms at counters 2i and 2i + 1. Outputs depend only on (key,
/// counter), so any element can be generated independently.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr CounterRng split(std::uint64_t id) const noexcept { return CounterRng(mix(key_ ^ mix(id + kGolden))); }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept { return mix(key_ + (counter + 1) * kGolden); }
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }
    double normal(std::uint64_t index) const noexcept;

    /// Sequential helpers for code that draws a handful of values in order.
    std::uint64_t next_bits() noexcept { return bits(counter_++); }
    double next_uniform() noexcept { return uniform(counter_++); }
    double next_uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_uniform(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace svx
