#include "manetsim/random.hpp"

namespace manet {

std::uint64_t hash_words(std::uint64_t key, std::initializer_list<std::uint64_t> words) noexcept
{
    std::uint64_t h = mix64(key);
    std::uint64_t position = 0;
    for (auto w : words) {
        h = mix64(h ^ mix64(w + 0x632be59bd9b4e019ULL * ++position));
    }
    return h;
}

RandomStream::RandomStream(std::uint64_t key)
    : key_(key), engine_(mix64(key ^ 0x5851f42d4c957f2dULL))
{
}

RandomStream RandomStream::child(std::uint64_t index) const
{
    return RandomStream(hash_words(key_, {0xc4ceb9fe1a85ec53ULL, index}));
}

double RandomStream::uniform()
{
    return to_unit_interval(engine_());
}

double RandomStream::normal(double mean, double stddev)
{
    std::normal_distribution<double> dist(mean, stddev);
    return dist(engine_);
}

std::uint64_t RandomStream::below(std::uint64_t n)
{
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
}

} // namespace manet
