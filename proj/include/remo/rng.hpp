#pragma once

#include <cstdint>
#include <limits>

namespace remo {

/// SplitMix64 step; also used as the seed mixer.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of one trial, a pure function of (master, cell, trial) so that any
/// partition of trials over threads reproduces the same draws.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial) noexcept
{
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s = h ^ cell;
    h = splitmix64(s);
    s = h ^ trial;
    return splitmix64(s);
}

class TrialRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr TrialRng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return splitmix64(state_); }

    /// Uniform in [0, bound); bound > 0. Rejection keeps it unbiased and
    /// independent of the standard library's distribution implementation.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept
    {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::uint64_t state_;
};

} // namespace remo
