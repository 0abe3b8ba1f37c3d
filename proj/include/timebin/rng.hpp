#ifndef TIMEBIN_RNG_HPP
#define TIMEBIN_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace timebin {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hashes a seed plus a path of stream identifiers into one 64-bit key.
/// Every (seed, path) gets its own statistically independent substream.
inline constexpr std::uint64_t stream_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t id : path) {
        std::uint64_t t = h ^ (id + 0x632be59bd9b4e019ULL);
        h = splitmix64(t);
    }
    return h;
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) noexcept
    {
        std::uint64_t s = key;
        for (auto& w : state_) w = splitmix64(s);
    }

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
        : Rng(stream_key(seed, path)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_zero() noexcept { return 1.0 - uniform(); }

    double normal() noexcept
    {
        // Box-Muller; second variate discarded so the draw count per call is fixed.
        const double u1 = uniform_open_zero();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Failures before the first success of a Bernoulli(p) process.
    std::uint64_t geometric(double p) noexcept
    {
        if (p >= 1.0) return 0;
        if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
        const double g = std::floor(std::log(uniform_open_zero()) / std::log1p(-p));
        if (g >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
        return static_cast<std::uint64_t>(g);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace timebin

#endif // TIMEBIN_RNG_HPP
