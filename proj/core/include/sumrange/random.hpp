#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sumrange {

/// Reproducible generator for seeded suites and shuffles.
///
/// Raw words come from std::mt19937_64, whose output sequence is fixed by
/// the standard. Bounded draws use rejection sampling and shuffles are a
/// plain Fisher-Yates pass from the back, so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);

    bool coin() { return (next() >> 63) != 0; }

    template <typename T>
    void shuffle(std::vector<T>& items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer of base + index: independent per-instance seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace sumrange
