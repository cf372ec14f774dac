#include "sumrange/random.hpp"

#include "sumrange/errors.hpp"

namespace sumrange {

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) throw ConfigError("empty range for a random draw");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == UINT64_MAX) return static_cast<std::int64_t>(next());
    const std::uint64_t range = span + 1;
    // 2^64 mod range values at the top would bias the draw.
    const std::uint64_t rem = (UINT64_MAX % range + 1) % range;
    const std::uint64_t limit = UINT64_MAX - rem;
    std::uint64_t x = next();
    while (x > limit) x = next();
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace sumrange
