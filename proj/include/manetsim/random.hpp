#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace manet {

/// SplitMix64 finalizer. Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash an ordered list of integers under a key.
std::uint64_t hash_words(std::uint64_t key, std::initializer_list<std::uint64_t> words) noexcept;

/// Map the top 53 bits of a word to [0, 1).
constexpr double to_unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A seeded random stream that can be split hierarchically.
///
/// Two access modes are provided. `engine()` is a sequential Mersenne Twister
/// for code that consumes draws in a fixed order (topology placement,
/// shadowing). `uniform_at()` is counter-based: the value depends only on the
/// stream key and the index tuple, so lazily evaluated draws do not depend on
/// evaluation order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key);

    std::uint64_t key() const noexcept { return key_; }

    /// Independent child stream for iteration `index` of a layer.
    RandomStream child(std::uint64_t index) const;

    double uniform_at(std::initializer_list<std::uint64_t> index) const noexcept
    {
        return to_unit_interval(hash_words(key_, index));
    }

    std::mt19937_64& engine() noexcept { return engine_; }

    /// Uniform in [0, 1) from the sequential engine.
    double uniform();
    double normal(double mean, double stddev);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
};

} // namespace manet
